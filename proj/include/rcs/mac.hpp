#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>

#include "rcs/engine.hpp"
#include "rcs/rng.hpp"
#include "rcs/units.hpp"

namespace rcs {

// 802.11p timing at 10 MHz channelization.
inline constexpr TimeNs kSifsNs = 32'000;
inline constexpr TimeNs kSlotNs = 13'000;
inline constexpr TimeNs kPreambleSignalNs = 40'000;
inline constexpr TimeNs kSymbolNs = 8'000;

// Carrier-sense reaction time: a countdown that completes within one slot of
// a busy transition has not sensed it yet and still transmits. This is the
// CSMA vulnerability window; without it concurrent transmissions would only
// ever start at exact nanosecond ties.
inline constexpr TimeNs kCcaReactionNs = kSlotNs;

struct AccessCategory {
  int aifsn = 2;
  int cw_min = 3;
  int cw_max = 3;
};

enum class TrafficClass : std::uint8_t { kTc0 = 0, kTc1 = 1, kTc2 = 2, kTc3 = 3 };
enum class Service : std::uint8_t { kCam = 0, kPcm = 1 };

/// ETSI ITS-G5 EDCA profile; index 0 is the highest priority (AC_VO).
const std::array<AccessCategory, 4>& edca_table();

/// TC0 -> AC_VO, TC1 -> AC_VI, TC2 -> AC_BE, TC3 -> AC_BK.
int ac_index_for(TrafficClass tc);

TimeNs aifs_ns(const AccessCategory& ac);

/// OFDM frame airtime: preamble+signal plus one 8 us symbol per
/// ceil((22 + 8*payload) / bits_per_symbol) data bits, where bits_per_symbol
/// is 24 / 48 / 96 at 3 / 6 / 12 Mbit/s. Other rates are rejected.
TimeNs airtime_ns(int payload_bytes, double data_rate_bps);

struct FrameDescriptor {
  std::uint64_t frame_id = 0;
  int sender = -1;
  int payload_bytes = 0;
  TrafficClass traffic_class = TrafficClass::kTc2;
  bool broadcast = true;
  int dest = -1;  // unicast destination when broadcast is false
  TimeNs generated_at = 0;
  Service service = Service::kCam;
};

/// Per-node EDCA CSMA/CA access.
///
/// Every frame waits for the medium to be idle for AIFS from its access-cycle
/// start, then counts down a uniform {0..cw} slot backoff that freezes while
/// the medium is busy. Broadcast frames are sent exactly once: no ACK, no
/// retry, no contention-window doubling. Unicast frames (off-default PCM
/// mode) retry up to kMaxRetries with CW doubling, driven by the caller
/// reporting ACK outcomes.
class EdcaMac {
 public:
  static constexpr int kQueueCap = 10;
  static constexpr int kMaxRetries = 7;

  struct Callbacks {
    // Caller puts the frame on the air (schedules tx start/end events).
    std::function<void(const FrameDescriptor&, TimeNs now)> transmit;
    // A frame fell off the head of a full queue.
    std::function<void(const FrameDescriptor&, TimeNs now)> queue_drop;
  };

  enum class UnicastResult { kCompleted, kRetry, kDropped };

  EdcaMac(Engine& engine, int node, RngStream backoff_rng, Callbacks cb);

  void enqueue(FrameDescriptor frame, TimeNs now);

  /// Wired to ChannelMedium's busy transitions for this node.
  void on_medium_busy(bool busy, TimeNs now);

  /// Dispatch target for kAccessAttempt events (a = AC index, b = token).
  void on_access_event(int ac, std::uint64_t token, TimeNs now);

  /// Called when this node's own transmission leaves the air.
  void on_own_tx_end(TimeNs now);

  /// Unicast only: report whether the ACK for the in-flight frame arrived.
  UnicastResult on_unicast_result(bool acked, TimeNs now);

  bool transmitting() const { return transmitting_; }
  std::uint64_t drops() const { return drop_count_; }
  const FrameDescriptor* head_of(int ac) const;

 private:
  struct AcState {
    std::deque<FrameDescriptor> q;
    bool drawn = false;
    bool awaiting_ack = false;
    int remaining = 0;
    int cw = 0;
    int retries = 0;
    TimeNs cycle_start = 0;
    TimeNs expiry = -1;
    std::uint64_t token = 0;
  };

  void start_cycle(int ac, TimeNs now);
  void redraw(int ac, TimeNs now);
  void schedule_expiry(int ac);

  Engine& engine_;
  int node_;
  RngStream rng_;
  Callbacks cb_;
  std::array<AcState, 4> acs_;
  bool medium_busy_ = false;
  bool transmitting_ = false;
  int tx_ac_ = -1;
  std::uint64_t drop_count_ = 0;
};

}  // namespace rcs
