#include "rcs/fuel.hpp"

#include <algorithm>
#include <stdexcept>

#include "rcs/units.hpp"

namespace rcs {

void AeroParams::validate() const {
  const double fields[] = {mass_kg,  cd0,  frontal_area_m2,          air_density_kgm3,
                           c_rr,     drivetrain_efficiency, fuel_energy_density_j_per_l};
  for (double f : fields) {
    if (f <= 0.0) throw std::invalid_argument("aero parameters must be strictly positive");
  }
  if (drivetrain_efficiency > 1.0) {
    throw std::invalid_argument("drivetrain_efficiency must lie in (0, 1]");
  }
}

void DragReductionCurve::validate() const {
  if (knots.empty()) throw std::invalid_argument("drag curve needs at least one knot");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i].second < 0.0 || knots[i].second >= 1.0) {
      throw std::invalid_argument("drag reduction values must lie in [0, 1)");
    }
    if (i > 0) {
      if (knots[i].first <= knots[i - 1].first) {
        throw std::invalid_argument("drag curve gaps must be strictly increasing");
      }
      if (knots[i].second > knots[i - 1].second) {
        throw std::invalid_argument("drag reduction must be non-increasing in gap");
      }
    }
  }
}

double DragReductionCurve::value(double gap_m) const {
  if (gap_m <= knots.front().first) return knots.front().second;
  if (gap_m > knots.back().first) return 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (gap_m <= knots[i].first) {
      const auto& [g0, p0] = knots[i - 1];
      const auto& [g1, p1] = knots[i];
      const double w = (gap_m - g0) / (g1 - g0);
      return p0 + w * (p1 - p0);
    }
  }
  return knots.back().second;
}

DragCurves default_drag_curves() {
  DragCurves curves;
  curves.trailing.knots = {{5, 0.42}, {10, 0.36}, {20, 0.28}, {30, 0.21},
                           {40, 0.16}, {60, 0.11}, {80, 0.07}};
  curves.leader.knots = {{5, 0.08}, {10, 0.06}, {20, 0.04}, {40, 0.02}, {80, 0.0}};
  return curves;
}

DragCurves scale_trailing(const DragCurves& curves, double multiplier) {
  if (multiplier <= 0.0) throw std::invalid_argument("drag multiplier must be > 0");
  DragCurves scaled = curves;
  for (auto& [gap, phi] : scaled.trailing.knots) {
    phi = std::min(phi * multiplier, 0.99);
  }
  return scaled;
}

double drag_reduction(double gap_m, PlatoonPosition position, const DragCurves& curves) {
  if (gap_m < 0.0) throw std::invalid_argument("drag_reduction: gap must be >= 0");
  return position == PlatoonPosition::kLeader ? curves.leader.value(gap_m)
                                              : curves.trailing.value(gap_m);
}

double tractive_power_w(double v_mps, double gap_m, PlatoonPosition position,
                        const AeroParams& params, const DragCurves& curves) {
  if (v_mps < 0.0) throw std::invalid_argument("tractive_power: speed must be >= 0");
  const double phi = drag_reduction(gap_m, position, curves);
  const double rolling = params.mass_kg * kGravityMps2 * params.c_rr;
  const double aero = 0.5 * params.air_density_kgm3 * params.cd0 * (1.0 - phi) *
                      params.frontal_area_m2 * v_mps * v_mps;
  return (rolling + aero) * v_mps;
}

double fuel_rate_lps(double v_mps, double gap_m, PlatoonPosition position,
                     const AeroParams& params, const DragCurves& curves) {
  return tractive_power_w(v_mps, gap_m, position, params, curves) /
         (params.drivetrain_efficiency * params.fuel_energy_density_j_per_l);
}

double platoon_fuel_saving(std::span<const double> gaps_baseline_m,
                           std::span<const double> gaps_new_m, double v_mps,
                           const AeroParams& params, const DragCurves& curves) {
  if (gaps_baseline_m.size() != gaps_new_m.size()) {
    throw std::invalid_argument("platoon_fuel_saving: gap lists must have equal length");
  }
  params.validate();

  auto platoon_rate = [&](std::span<const double> gaps) {
    // Vehicle 0 gains from the follower running close behind it.
    double total = fuel_rate_lps(v_mps, gaps.empty() ? 1e9 : gaps[0],
                                 PlatoonPosition::kLeader, params, curves);
    for (double gap : gaps) {
      total += fuel_rate_lps(v_mps, gap, PlatoonPosition::kTrailing, params, curves);
    }
    return total;
  };

  const double base = platoon_rate(gaps_baseline_m);
  const double now = platoon_rate(gaps_new_m);
  return 1.0 - now / base;
}

}  // namespace rcs
