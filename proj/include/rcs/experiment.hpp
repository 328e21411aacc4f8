#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcs/config.hpp"
#include "rcs/netsim.hpp"
#include "rcs/safety.hpp"

namespace rcs {

struct RunSpec {
  FullConfig config;
  std::vector<double> penetrations{0.0, 0.5, 1.0};
  int replications = 5;
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";
  bool trace = false;

  void validate() const;
};

/// Everything measured and derived for one penetration rate.
struct RateAggregate {
  double rate = 0.0;
  NetStats pooled;  // raw counts merged across replications
  std::vector<double> rep_pdr_pcm;
  std::vector<double> rep_latency_s;
  std::vector<double> rep_scbr;
  std::vector<std::uint64_t> rep_trace_hash;
  std::vector<std::uint64_t> rep_g5_enqueued;
  std::vector<std::pair<double, double>> series;  // rep-averaged (t_s, scbr)
};

struct ExperimentResult {
  std::vector<RateAggregate> rates;
  std::vector<GapReport> gaps;        // one per rate (C-ITS path)
  std::vector<double> mean_gap_m;     // per rate
  std::vector<double> fuel_saving;    // per rate, vs the 0% (or first) rate
  double drag_multiplier = 1.0;
  bool drag_calibration_ok = false;   // both fuel targets inside their bands
};

/// Runs the penetration sweep with replications and derives gaps + fuel.
/// No file output; the acceptance suite consumes this directly.
ExperimentResult run_sweep(const RunSpec& spec);

/// Fuel-target calibration: smallest-deviation scalar multiplier on the
/// trailing drag table within [0.5, 2.0] against 2% at 50% and 5.6% at 100%.
struct DragCalibration {
  double multiplier = 1.0;
  double saving_50 = 0.0;
  double saving_100 = 0.0;
  bool within_bands = false;
};
std::optional<DragCalibration> calibrate_drag_multiplier(
    const std::vector<double>& rates, const std::vector<GapReport>& gaps, double v_mps,
    const AeroParams& params);

/// Full CLI pipeline: sweep, derive, write summary.csv / scbr_timeseries.csv /
/// gaps.csv / fuel.csv / resolved_config.txt atomically under spec.out_dir.
/// Returns the process exit code (0 ok, 1 runtime failure).
int run_experiment(const RunSpec& spec);

}  // namespace rcs
