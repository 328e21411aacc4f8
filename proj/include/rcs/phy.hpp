#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "rcs/scenario.hpp"
#include "rcs/units.hpp"

namespace rcs {

struct PhyConfig {
  double tx_power_mw = 20.0;
  double carrier_freq_hz = 5.9e9;
  double bandwidth_hz = 10e6;
  double pathloss_exponent = 2.0;
  double cs_threshold_dbm = -85.0;
  double sinr_threshold_db = 8.0;
  double noise_floor_dbm = -99.0;
  double max_range_m = 1500.0;  // hard propagation cutoff

  void validate() const;  // throws std::invalid_argument
};

/// Log-distance path loss with a 1 m free-space reference:
///   PL(d) = 20 log10(4 pi d_ref f / c) + 10 alpha log10(d / d_ref).
/// Monotone increasing in d; d = 0 is rejected (singularity).
double path_loss_db(double distance_m, const PhyConfig& config);

double rx_power_dbm(double distance_m, const PhyConfig& config);

enum class RxOutcome : std::uint8_t {
  kDelivered = 0,
  kLostCollision,
  kLostWeak,
  kLostQueue,
};

const char* rx_outcome_name(RxOutcome o);

/// Per-node view of the shared 5.9 GHz channel.
///
/// Audible power sums are kept as integer attowatt-scale units so that adding
/// and removing a transmission restores the exact previous state; the busy
/// flag and the CBR busy-time integral are therefore exact to the nanosecond.
/// RadCom traffic never touches this medium.
class ChannelMedium {
 public:
  using BusyCallback = std::function<void(int node, bool busy, TimeNs now)>;

  ChannelMedium(const PhyConfig& config, const World& world, const RingIndex& ring);

  void set_busy_callback(BusyCallback cb) { busy_cb_ = std::move(cb); }

  /// Registers a transmission on the air for [start, end). Applies its power
  /// at every node within max_range and marks the sender itself busy.
  /// Returns a handle used for end_transmission / resolve_reception.
  std::uint64_t begin_transmission(int sender, TimeNs start, TimeNs end);

  void end_transmission(std::uint64_t handle, TimeNs now);

  /// True iff the summed audible power at the node exceeds the carrier-sense
  /// threshold, or the node itself is transmitting.
  bool is_busy(int node) const;

  /// True while the node has a transmission of its own on the air.
  bool own_tx_active(int node) const;

  /// Closes the node's CBR window ending at window_end: returns busy_time /
  /// window and resets the accumulator. Call at a fixed cadence per node.
  double cbr_sample(int node, TimeNs window_end, TimeNs window_ns);

  /// Busy nanoseconds accumulated in the currently open window (exact).
  TimeNs open_window_busy_ns(int node, TimeNs now) const;

  /// Frame reception over the whole transmission duration: delivered iff
  /// rx_power / (noise + max simultaneous interference) clears the SINR
  /// threshold. A receiver transmitting itself loses the frame.
  RxOutcome resolve_reception(std::uint64_t handle, int receiver) const;

  /// Linear received power, with distance floored at the 1 m reference.
  double rx_power_mw_at_distance(double distance_m) const;

  std::uint64_t transmissions_begun() const { return tx_counter_; }

 private:
  struct NodeState {
    std::int64_t audible_units = 0;
    std::int32_t own_tx = 0;
    bool busy = false;
    TimeNs busy_since = 0;
    TimeNs window_busy_ns = 0;
  };

  struct Transmission {
    int sender = -1;
    TimeNs start = 0;
    TimeNs end = 0;
    bool ended = false;
    // Power applied per node, recorded so removal is exact.
    std::vector<std::pair<std::int32_t, std::int64_t>> applied;
  };

  void apply_power(int node, std::int64_t units, TimeNs now);
  void set_own_tx(int node, int delta, TimeNs now);
  void refresh_busy(NodeState& st, int node, TimeNs now);
  const Transmission& tx_of(std::uint64_t handle) const;

  const PhyConfig config_;
  const World* world_;
  const RingIndex* ring_;
  BusyCallback busy_cb_;

  double ref_loss_linear_ = 1.0;  // 10^(PL(1 m) / 10)
  bool exponent_is_two_ = true;
  std::int64_t cs_threshold_units_ = 0;
  double noise_mw_ = 0.0;
  double sinr_threshold_linear_ = 1.0;

  std::vector<NodeState> nodes_;
  // Static same-direction neighbourhoods (relative distances never change).
  std::vector<std::vector<std::pair<std::int32_t, std::int64_t>>> same_dir_units_;

  std::deque<Transmission> log_;
  std::uint64_t log_base_ = 0;
  std::uint64_t tx_counter_ = 0;
  TimeNs max_airtime_seen_ = 0;

  static constexpr double kUnitsPerMw = 1e16;
};

}  // namespace rcs
