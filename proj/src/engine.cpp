#include "rcs/engine.hpp"

#include <stdexcept>
#include <string>

namespace rcs {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::kGenTick: return "gen_tick";
    case EventKind::kAccessAttempt: return "access_attempt";
    case EventKind::kTxStart: return "tx_start";
    case EventKind::kTxEnd: return "tx_end";
    case EventKind::kCbrSample: return "cbr_sample";
    case EventKind::kMeasureBoundary: return "measure_boundary";
    case EventKind::kRadcomArrive: return "radcom_arrive";
    case EventKind::kAckTimeout: return "ack_timeout";
  }
  return "unknown";
}

void Engine::schedule(TimeNs time, EventKind kind, std::int32_t node, std::uint32_t a,
                      std::uint64_t b) {
  if (time < now_) {
    throw std::logic_error("Engine::schedule: event time " + std::to_string(time) +
                           " ns lies before current time " + std::to_string(now_) + " ns");
  }
  Event e;
  e.time = time;
  e.seq = next_seq_++;
  e.kind = kind;
  e.node = node;
  e.a = a;
  e.b = b;
  queue_.push(e);
}

void Engine::run_until(TimeNs t_end) {
  if (t_end < now_) {
    throw std::logic_error("Engine::run_until: target time lies in the past");
  }
  while (!queue_.empty() && queue_.top().time <= t_end) {
    const Event e = queue_.top();
    queue_.pop();
    now_ = e.time;
    ++processed_;

    // FNV-1a over the event identity tuple.
    auto mix = [this](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        hash_ ^= (v >> (8 * i)) & 0xFFu;
        hash_ *= 1099511628211ull;
      }
    };
    mix(static_cast<std::uint64_t>(e.time));
    mix(e.seq);
    mix(static_cast<std::uint64_t>(e.kind));
    mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(e.node)));

    if (trace_) trace_(e);
    if (handler_) handler_(e);
  }
  now_ = t_end;
}

}  // namespace rcs
