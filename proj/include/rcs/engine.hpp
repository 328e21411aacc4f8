#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "rcs/units.hpp"

namespace rcs {

enum class EventKind : std::uint8_t {
  kGenTick = 0,
  kAccessAttempt,
  kTxStart,
  kTxEnd,
  kCbrSample,
  kMeasureBoundary,
  kRadcomArrive,
  kAckTimeout,
};

const char* event_kind_name(EventKind k);

struct Event {
  TimeNs time = 0;
  std::uint64_t seq = 0;  // tie-break: insertion order at equal times
  EventKind kind = EventKind::kGenTick;
  std::int32_t node = -1;  // vehicle id, -1 for fleet-wide events
  std::uint32_t a = 0;     // handler-defined
  std::uint64_t b = 0;     // handler-defined
};

/// Single-threaded discrete-event scheduler.
///
/// Events dequeue in (time, seq) lexicographic order; the clock never runs
/// backwards. A running FNV-1a hash over every processed event provides a
/// cheap cross-run trace fingerprint.
class Engine {
 public:
  using Handler = std::function<void(const Event&)>;
  using TraceSink = std::function<void(const Event&)>;

  void set_handler(Handler h) { handler_ = std::move(h); }
  void set_trace_sink(TraceSink s) { trace_ = std::move(s); }

  TimeNs now() const { return now_; }
  std::uint64_t processed() const { return processed_; }
  std::uint64_t pending() const { return queue_.size(); }
  std::uint64_t trace_hash() const { return hash_; }

  /// Enqueues an event. Scheduling in the past is a fatal logic error.
  void schedule(TimeNs time, EventKind kind, std::int32_t node, std::uint32_t a = 0,
                std::uint64_t b = 0);

  /// Processes every event with time <= t_end, then advances the clock to t_end.
  void run_until(TimeNs t_end);

 private:
  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      if (x.time != y.time) return x.time > y.time;
      return x.seq > y.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  Handler handler_;
  TraceSink trace_;
  TimeNs now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  std::uint64_t hash_ = 14695981039346656037ull;
};

}  // namespace rcs
