#pragma once

#include <span>
#include <vector>

#include "rcs/units.hpp"

namespace rcs {

struct BrakingScenario {
  double v0_mps = 22.2;           // common initial speed
  double a_lead_mps2 = 6.0;       // leader deceleration
  std::vector<double> a_follow_mps2;  // per follower; empty = uniform default
  double a_follow_default_mps2 = 6.0;
  double t_actuation_s = 0.3;
  double epsilon = 1e-3;  // residual loss probability

  double follower_decel(int follower_index) const;  // 1-based platoon position
  void validate() const;
};

/// Smallest k with (1 - pdr)^k <= epsilon; 0 when pdr == 1.
int residual_loss_rounds(double pdr, double epsilon);

/// Worst-case communication delay: mean latency plus one message period per
/// consecutive loss that must be tolerated to push the residual loss
/// probability below epsilon. pdr == 0 has no bounded delay and is an error.
double worst_case_comm_delay_s(double pdr, double mean_latency_s, double period_s,
                               double epsilon);

/// Minimum initial bumper gap so the follower never reaches the leader when
/// the leader brakes at a_lead from t = 0 and the follower keeps speed v0
/// until tau, then brakes at a_follow. Closed form; validated against the
/// numeric trajectory oracle.
double min_safe_gap_m(double v0_mps, double a_lead_mps2, double a_follow_mps2, double tau_s);

/// Delay inputs of one member's emergency-message path.
struct PathDelayInput {
  double pdr = 1.0;
  double latency_s = 0.0;
  double period_s = 0.5;
};

struct GapReport {
  double penetration = 0.0;
  std::vector<double> tau_s;  // per pair (i-1, i), i = 1..N-1
  std::vector<double> gap_m;
};

/// Gap for pair (i-1, i) computed with the follower's path delay:
/// tau_i = t_actuation + worst_case_comm_delay(member i's inputs).
GapReport platoon_gaps(const BrakingScenario& scenario,
                       std::span<const PathDelayInput> member_paths, double penetration);

}  // namespace rcs
