#include "rcs/safety.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcs {

double BrakingScenario::follower_decel(int follower_index) const {
  if (!a_follow_mps2.empty()) {
    const std::size_t i = static_cast<std::size_t>(follower_index - 1);
    if (i < a_follow_mps2.size()) return a_follow_mps2[i];
    return a_follow_mps2.back();
  }
  return a_follow_default_mps2;
}

void BrakingScenario::validate() const {
  if (a_lead_mps2 <= 0.0) throw std::invalid_argument("a_lead must be > 0");
  if (a_follow_default_mps2 <= 0.0) throw std::invalid_argument("a_follow must be > 0");
  for (double a : a_follow_mps2) {
    if (a <= 0.0) throw std::invalid_argument("a_follow entries must be > 0");
  }
  if (v0_mps < 0.0) throw std::invalid_argument("v0 must be >= 0");
  if (t_actuation_s < 0.0) throw std::invalid_argument("t_actuation must be >= 0");
  if (epsilon <= 0.0 || epsilon >= 1.0) throw std::invalid_argument("epsilon must lie in (0, 1)");
}

int residual_loss_rounds(double pdr, double epsilon) {
  if (pdr <= 0.0) throw std::invalid_argument("residual_loss_rounds: pdr must be > 0");
  if (pdr > 1.0) pdr = 1.0;
  if (epsilon >= 1.0) return 0;
  const double q = 1.0 - pdr;
  if (q <= 0.0) return 0;
  int k = static_cast<int>(std::ceil(std::log(epsilon) / std::log(q)));
  k = std::max(k, 0);
  // Guard the boundary against rounding in the logarithms.
  while (std::pow(q, k) > epsilon) ++k;
  while (k > 0 && std::pow(q, k - 1) <= epsilon) --k;
  return k;
}

double worst_case_comm_delay_s(double pdr, double mean_latency_s, double period_s,
                               double epsilon) {
  if (pdr <= 0.0) {
    throw std::invalid_argument("worst_case_comm_delay: pdr of 0 has no bounded delay");
  }
  return mean_latency_s + period_s * residual_loss_rounds(pdr, epsilon);
}

double min_safe_gap_m(double v0, double a_lead, double a_follow, double tau) {
  if (a_lead <= 0.0 || a_follow <= 0.0) {
    throw std::invalid_argument("min_safe_gap: decelerations must be > 0");
  }
  if (tau < 0.0) throw std::invalid_argument("min_safe_gap: tau must be >= 0");
  if (v0 < 0.0) throw std::invalid_argument("min_safe_gap: v0 must be >= 0");
  if (v0 == 0.0) return 0.0;

  const double lead_stop_dist = v0 * v0 / (2.0 * a_lead);
  const double follow_stop_dist = v0 * tau + v0 * v0 / (2.0 * a_follow);

  if (a_follow <= a_lead) {
    // The follower is never slower than the leader, so the closure grows
    // until both have stopped.
    return std::max(0.0, follow_stop_dist - lead_stop_dist);
  }

  // Harder-braking follower: speeds meet at t_eq (if the leader is still
  // moving) and that instant carries the maximum closure; otherwise the
  // follower brakes so late that it only stops after the leader has.
  const double t_lead_stop = v0 / a_lead;
  const double t_eq = tau * a_follow / (a_follow - a_lead);
  if (t_eq <= t_lead_stop) {
    const double dt = t_eq - tau;
    const double closure = 0.5 * a_lead * t_eq * t_eq - 0.5 * a_follow * dt * dt;
    return std::max(0.0, closure);
  }
  return std::max(0.0, follow_stop_dist - lead_stop_dist);
}

GapReport platoon_gaps(const BrakingScenario& scenario,
                       std::span<const PathDelayInput> member_paths, double penetration) {
  scenario.validate();
  GapReport report;
  report.penetration = penetration;
  report.tau_s.reserve(member_paths.size());
  report.gap_m.reserve(member_paths.size());
  for (std::size_t i = 0; i < member_paths.size(); ++i) {
    const PathDelayInput& in = member_paths[i];
    const double tau =
        scenario.t_actuation_s +
        worst_case_comm_delay_s(in.pdr, in.latency_s, in.period_s, scenario.epsilon);
    const double a_follow = scenario.follower_decel(static_cast<int>(i) + 1);
    report.tau_s.push_back(tau);
    report.gap_m.push_back(min_safe_gap_m(scenario.v0_mps, scenario.a_lead_mps2, a_follow, tau));
  }
  return report;
}

}  // namespace rcs
