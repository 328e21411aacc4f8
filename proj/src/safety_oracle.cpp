#include "rcs/safety_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "rcs/rng.hpp"
#include "rcs/safety.hpp"

namespace rcs {

namespace {

// One braking vehicle stepped on a fixed grid. Within a step the speed is
// linear, so trapezoidal position updates are exact; the stop instant is
// handled by splitting the step so the vehicle never overshoots zero speed.
struct BrakingBody {
  double x = 0.0;
  double v = 0.0;
  double decel = 0.0;     // active once braking
  double brake_at = 0.0;  // braking start time

  void step(double t0, double dt) {
    double t = t0;
    double remaining = dt;
    if (t < brake_at) {
      const double cruise = std::min(remaining, brake_at - t);
      x += v * cruise;
      t += cruise;
      remaining -= cruise;
    }
    if (remaining <= 0.0 || v <= 0.0) return;
    const double to_stop = v / decel;
    const double braking = std::min(remaining, to_stop);
    const double v_next = v - decel * braking;
    x += 0.5 * (v + v_next) * braking;
    v = v_next;
    if (braking >= to_stop) v = 0.0;
  }
};

}  // namespace

double min_safe_gap_numeric_m(double v0, double a_lead, double a_follow, double tau,
                              double step) {
  BrakingBody leader{0.0, v0, a_lead, 0.0};
  BrakingBody follower{0.0, v0, a_follow, tau};

  double max_closure = 0.0;
  double t = 0.0;
  while (leader.v > 0.0 || follower.v > 0.0) {
    leader.step(t, step);
    follower.step(t, step);
    t += step;
    max_closure = std::max(max_closure, follower.x - leader.x);
  }
  max_closure = std::max(max_closure, follower.x - leader.x);
  return max_closure;
}

OracleGridResult run_safety_oracle_grid(std::uint64_t seed, int points, double tol_m) {
  RngStream rng(seed, 0xACEDull);
  OracleGridResult result;
  result.points = points;
  for (int i = 0; i < points; ++i) {
    const double v0 = 0.5 + rng.next_unit() * 44.5;
    const double a_lead = 0.8 + rng.next_unit() * 8.7;
    const double a_follow = 0.8 + rng.next_unit() * 8.7;
    const double tau = rng.next_unit() * 6.0;
    const double closed = min_safe_gap_m(v0, a_lead, a_follow, tau);
    const double numeric = min_safe_gap_numeric_m(v0, a_lead, a_follow, tau);
    result.max_abs_err_m = std::max(result.max_abs_err_m, std::fabs(closed - numeric));
  }
  result.pass = result.max_abs_err_m <= tol_m;
  return result;
}

}  // namespace rcs
