#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rcs/config.hpp"
#include "rcs/engine.hpp"
#include "rcs/metrics.hpp"

namespace rcs {

struct RunResult {
  NetStats stats;
  // Fleet-mean smoothed CBR at each 100 ms boundary inside the window.
  std::vector<std::pair<double, double>> scbr_series;
  std::uint64_t trace_hash = 0;
  std::uint64_t events_processed = 0;
  std::uint64_t g5_enqueued = 0;       // frames offered to the ITS-G5 MAC
  std::uint64_t g5_transmissions = 0;  // frames that reached the air
  std::uint64_t queue_drops = 0;
  std::uint64_t radcom_messages = 0;
  std::vector<std::uint32_t> pcm_generated_per_vehicle;  // measurement window only
};

/// Runs one full scenario (warmup + measurement) at the given penetration
/// rate. Identical (config, penetration, seed) inputs produce identical
/// results and event traces.
RunResult run_simulation(const FullConfig& config, double penetration, std::uint64_t run_seed,
                         const std::function<void(const Event&)>& trace_sink = nullptr);

}  // namespace rcs
