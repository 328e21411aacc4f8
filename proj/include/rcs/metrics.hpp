#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rcs/facilities.hpp"
#include "rcs/mac.hpp"
#include "rcs/phy.hpp"
#include "rcs/units.hpp"

namespace rcs {

/// One (frame, potential receiver) pair and what became of it.
struct RxRecord {
  std::uint64_t frame_id = 0;
  int sender = -1;
  int receiver = -1;
  double distance_m = 0.0;  // sender-receiver distance at tx start
  TimeNs generated_at = 0;
  TimeNs received_at = -1;  // -1 unless delivered
  RxOutcome outcome = RxOutcome::kLostWeak;
  Service service = Service::kCam;
  TxPath path = TxPath::kG5;
};

/// Delivered / expected over pairs with distance <= max_distance. Expected
/// counts every in-range potential receiver of every frame of the service,
/// including frames lost before the air (queue drops). Zero expected
/// receptions yield an absent result, never 0 or 1.
std::optional<double> pdr(std::span<const RxRecord> records, Service service,
                          double max_distance_m, TxPath path = TxPath::kG5);

/// Mean end-to-end latency in seconds over delivered records (generation to
/// full reception, so queueing + AIFS + backoff + airtime, or RadCom hop
/// delays). Absent when nothing was delivered.
std::optional<double> latency_mean_s(std::span<const RxRecord> records, Service service,
                                     TxPath path = TxPath::kG5);

/// ETSI DCC smoothing recurrence: 0.5 * prev + 0.25 * (c_now + c_prev).
double scbr_update(double prev_s, double c_now, double c_prev);

/// Aggregated counters for one run; mergeable across replications by adding
/// raw counts (never by averaging ratios).
struct NetStats {
  // Indexed [service][path].
  std::uint64_t expected[2][2] = {};
  std::uint64_t delivered[2][2] = {};
  std::uint64_t lost_collision[2][2] = {};
  std::uint64_t lost_weak[2][2] = {};
  std::uint64_t lost_queue[2][2] = {};
  std::int64_t latency_sum_ns[2][2] = {};

  double scbr_sum = 0.0;  // sum of per-node smoothed samples in the window
  std::uint64_t scbr_n = 0;

  std::optional<double> pdr_of(Service s, TxPath p) const;
  std::optional<double> latency_mean_of(Service s, TxPath p) const;
  std::optional<double> scbr_mean() const;
  std::uint64_t losses(Service s, TxPath p) const;

  void merge(const NetStats& other);
};

/// Streams records into NetStats counters; keeps nothing per record.
/// Only pairs with distance <= distance_cap and generation time inside
/// [window_start, window_end) are counted.
class MetricsCollector {
 public:
  MetricsCollector(TimeNs window_start, TimeNs window_end, double distance_cap_m);

  void add(const RxRecord& r);
  void add_scbr_sample(double smoothed);
  bool in_window(TimeNs generated_at) const;

  const NetStats& stats() const { return stats_; }

 private:
  TimeNs start_, end_;
  double cap_;
  NetStats stats_;
};

}  // namespace rcs
