#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "rcs/fuel.hpp"

using namespace rcs;

TEST_CASE("drag reduction lookup") {
  const DragCurves curves = default_drag_curves();
  curves.trailing.validate();
  curves.leader.validate();

  // Exactly at a knot.
  CHECK(drag_reduction(20.0, PlatoonPosition::kTrailing, curves) == doctest::Approx(0.28));
  // Midpoint between knots interpolates linearly.
  CHECK(drag_reduction(25.0, PlatoonPosition::kTrailing, curves) ==
        doctest::Approx((0.28 + 0.21) / 2));
  // Beyond the last knot there is no wake effect left.
  CHECK(drag_reduction(81.0, PlatoonPosition::kTrailing, curves) == 0.0);
  CHECK(drag_reduction(500.0, PlatoonPosition::kLeader, curves) == 0.0);
  // Below the first knot the first value applies.
  CHECK(drag_reduction(2.0, PlatoonPosition::kTrailing, curves) == doctest::Approx(0.42));
  CHECK_THROWS_AS(drag_reduction(-1.0, PlatoonPosition::kTrailing, curves),
                  std::invalid_argument);

  // Monotone non-increasing in gap.
  double prev = 1.0;
  for (double g = 0.0; g <= 100.0; g += 0.5) {
    const double phi = drag_reduction(g, PlatoonPosition::kTrailing, curves);
    CHECK(phi <= prev + 1e-12);
    prev = phi;
  }
}

TEST_CASE("tractive power") {
  AeroParams params;
  const DragCurves curves = default_drag_curves();

  CHECK(tractive_power_w(0.0, 20.0, PlatoonPosition::kTrailing, params, curves) == 0.0);

  // No drag reduction far behind: rolling + full aero drag at 22.2 m/s.
  const double p = tractive_power_w(22.2, 1e6, PlatoonPosition::kTrailing, params, curves);
  CHECK(p == doctest::Approx(83764.75).epsilon(1e-6));

  // With phi -> 1 only rolling resistance would remain; approximate with a
  // custom curve pinned at 0.99.
  DragCurves strong = curves;
  strong.trailing.knots = {{10.0, 0.99}};
  const double rolling_only =
      tractive_power_w(22.2, 10.0, PlatoonPosition::kTrailing, params, strong);
  CHECK(rolling_only ==
        doctest::Approx((1962.0 + 0.01 * 1811.187) * 22.2).epsilon(1e-6));

  // Strictly increasing in speed, strictly decreasing in phi (smaller gap).
  CHECK(tractive_power_w(23.0, 1e6, PlatoonPosition::kTrailing, params, curves) > p);
  CHECK(tractive_power_w(22.2, 10.0, PlatoonPosition::kTrailing, params, curves) < p);
}

TEST_CASE("platoon fuel saving") {
  AeroParams params;
  const DragCurves curves = default_drag_curves();
  const std::vector<double> base = {76.3, 76.3, 76.3};

  SUBCASE("identical gaps save nothing") {
    CHECK(platoon_fuel_saving(base, base, 22.2, params, curves) == doctest::Approx(0.0));
  }

  SUBCASE("any smaller gap saves fuel") {
    const std::vector<double> tighter = {76.3, 40.0, 76.3};
    CHECK(platoon_fuel_saving(base, tighter, 22.2, params, curves) > 0.0);
  }

  SUBCASE("pointwise-smaller gaps never reduce the saving") {
    const std::vector<double> a = {60.0, 60.0, 60.0};
    const std::vector<double> b = {40.0, 60.0, 50.0};
    const double sa = platoon_fuel_saving(base, a, 22.2, params, curves);
    const double sb = platoon_fuel_saving(base, b, 22.2, params, curves);
    CHECK(sb >= sa);
  }

  SUBCASE("widening gaps can cost fuel, bounded above by 1") {
    const std::vector<double> wider = {200.0, 200.0, 200.0};
    const double s = platoon_fuel_saving(std::vector<double>{20.0, 20.0, 20.0}, wider, 22.2, params, curves);
    CHECK(s < 0.0);
    CHECK(s < 1.0);
  }

  SUBCASE("mismatched platoon sizes are rejected") {
    const std::vector<double> two = {20.0, 20.0};
    CHECK_THROWS_AS(platoon_fuel_saving(base, two, 22.2, params, curves),
                    std::invalid_argument);
  }
}

TEST_CASE("trailing-table scaling") {
  const DragCurves curves = default_drag_curves();
  const DragCurves doubled = scale_trailing(curves, 2.0);
  CHECK(doubled.trailing.value(20.0) == doctest::Approx(0.56));
  CHECK(doubled.leader.value(20.0) == curves.leader.value(20.0));
  // Scaling never produces a reduction of 1 or more.
  const DragCurves extreme = scale_trailing(curves, 10.0);
  for (const auto& [gap, phi] : extreme.trailing.knots) CHECK(phi < 1.0);
  CHECK_THROWS_AS(scale_trailing(curves, 0.0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  AeroParams params;
  params.drivetrain_efficiency = 1.5;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params = AeroParams{};
  params.mass_kg = 0.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);

  DragReductionCurve bad;
  bad.knots = {{10.0, 0.2}, {5.0, 0.3}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
