#pragma once

#include <cstdint>

namespace rcs {

// Validation-only ground truth for min_safe_gap_m: the closed form is never
// consulted here. Both trajectories are integrated on a fixed grid with
// exact handling of the stop instants, and the maximum closure is returned.

double min_safe_gap_numeric_m(double v0_mps, double a_lead_mps2, double a_follow_mps2,
                              double tau_s, double step_s = 1e-3);

struct OracleGridResult {
  int points = 0;
  double max_abs_err_m = 0.0;
  bool pass = false;
};

/// Compares the closed form against the numeric oracle on a seeded random
/// grid of (v0, a_lead, a_follow, tau) points.
OracleGridResult run_safety_oracle_grid(std::uint64_t seed, int points, double tol_m);

}  // namespace rcs
