#include "rcs/mac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcs {

const std::array<AccessCategory, 4>& edca_table() {
  static const std::array<AccessCategory, 4> table{{
      {2, 3, 7},     // AC_VO
      {3, 7, 15},    // AC_VI
      {6, 15, 1023}, // AC_BE
      {9, 15, 1023}, // AC_BK
  }};
  return table;
}

int ac_index_for(TrafficClass tc) { return static_cast<int>(tc); }

TimeNs aifs_ns(const AccessCategory& ac) { return kSifsNs + ac.aifsn * kSlotNs; }

TimeNs airtime_ns(int payload_bytes, double data_rate_bps) {
  if (payload_bytes < 0) throw std::invalid_argument("airtime: payload must be >= 0");
  int bits_per_symbol = 0;
  if (std::fabs(data_rate_bps - 3e6) < 1.0) bits_per_symbol = 24;
  else if (std::fabs(data_rate_bps - 6e6) < 1.0) bits_per_symbol = 48;
  else if (std::fabs(data_rate_bps - 12e6) < 1.0) bits_per_symbol = 96;
  else throw std::invalid_argument("airtime: unsupported data rate (3, 6 or 12 Mbit/s)");

  const long long bits = 22 + 8LL * payload_bytes;  // 16 service + 6 tail
  const long long symbols = (bits + bits_per_symbol - 1) / bits_per_symbol;
  return kPreambleSignalNs + kSymbolNs * symbols;
}

EdcaMac::EdcaMac(Engine& engine, int node, RngStream backoff_rng, Callbacks cb)
    : engine_(engine), node_(node), rng_(backoff_rng), cb_(std::move(cb)) {
  for (std::size_t i = 0; i < acs_.size(); ++i) {
    acs_[i].cw = edca_table()[i].cw_min;
  }
}

const FrameDescriptor* EdcaMac::head_of(int ac) const {
  const AcState& st = acs_[static_cast<std::size_t>(ac)];
  return st.q.empty() ? nullptr : &st.q.front();
}

void EdcaMac::schedule_expiry(int ac) {
  AcState& st = acs_[static_cast<std::size_t>(ac)];
  const AccessCategory& cat = edca_table()[static_cast<std::size_t>(ac)];
  st.expiry = st.cycle_start + aifs_ns(cat) + static_cast<TimeNs>(st.remaining) * kSlotNs;
  ++st.token;
  engine_.schedule(st.expiry, EventKind::kAccessAttempt, node_,
                   static_cast<std::uint32_t>(ac), st.token);
}

void EdcaMac::start_cycle(int ac, TimeNs now) {
  AcState& st = acs_[static_cast<std::size_t>(ac)];
  st.drawn = true;
  st.remaining = static_cast<int>(rng_.next_below(static_cast<std::uint32_t>(st.cw + 1)));
  st.cycle_start = now;
  if (medium_busy_) {
    st.expiry = -1;  // frozen; resumes on the idle transition
  } else {
    schedule_expiry(ac);
  }
}

void EdcaMac::redraw(int ac, TimeNs now) {
  AcState& st = acs_[static_cast<std::size_t>(ac)];
  st.remaining = static_cast<int>(rng_.next_below(static_cast<std::uint32_t>(st.cw + 1)));
  st.cycle_start = now;
  if (medium_busy_) {
    st.expiry = -1;
    ++st.token;
  } else {
    schedule_expiry(ac);
  }
}

void EdcaMac::enqueue(FrameDescriptor frame, TimeNs now) {
  const int ac = ac_index_for(frame.traffic_class);
  AcState& st = acs_[static_cast<std::size_t>(ac)];

  if (static_cast<int>(st.q.size()) >= kQueueCap) {
    // Drop the oldest frame that is not currently in flight.
    std::size_t victim = st.awaiting_ack ? 1 : 0;
    if (victim < st.q.size()) {
      FrameDescriptor dropped = st.q[victim];
      st.q.erase(st.q.begin() + static_cast<std::ptrdiff_t>(victim));
      ++drop_count_;
      if (cb_.queue_drop) cb_.queue_drop(dropped, now);
    }
  }
  st.q.push_back(std::move(frame));

  if (!st.drawn && !st.awaiting_ack && !(transmitting_ && tx_ac_ == ac)) {
    start_cycle(ac, now);
  }
}

void EdcaMac::on_medium_busy(bool busy, TimeNs now) {
  if (busy == medium_busy_) return;
  medium_busy_ = busy;
  if (busy) {
    for (std::size_t ac = 0; ac < acs_.size(); ++ac) {
      AcState& st = acs_[ac];
      if (!st.drawn || st.expiry < 0) continue;
      if (st.expiry <= now + kCcaReactionNs) continue;  // inside the CCA window: fires anyway
      const AccessCategory& cat = edca_table()[ac];
      const TimeNs counted = now - st.cycle_start - aifs_ns(cat);
      if (counted > 0) {
        const int consumed =
            std::min<long long>(counted / kSlotNs, static_cast<long long>(st.remaining));
        st.remaining -= consumed;
      }
      st.expiry = -1;
      ++st.token;  // invalidate the pending event
    }
  } else {
    for (std::size_t ac = 0; ac < acs_.size(); ++ac) {
      AcState& st = acs_[ac];
      if (st.drawn && st.expiry < 0) {
        st.cycle_start = now;
        schedule_expiry(static_cast<int>(ac));
      }
    }
  }
}

void EdcaMac::on_access_event(int ac, std::uint64_t token, TimeNs now) {
  AcState& st = acs_[static_cast<std::size_t>(ac)];
  if (token != st.token || !st.drawn) return;  // superseded
  if (st.q.empty()) {
    st.drawn = false;
    st.expiry = -1;
    return;
  }
  if (transmitting_) {
    // Own transmission raced this countdown to the same instant.
    redraw(ac, now);
    return;
  }
  // Internal contention: a higher-priority AC completing at this exact
  // instant transmits; this one re-draws.
  for (int other = 0; other < ac; ++other) {
    const AcState& o = acs_[static_cast<std::size_t>(other)];
    if (o.drawn && o.expiry == now) {
      redraw(ac, now);
      return;
    }
  }

  st.expiry = -1;
  st.drawn = false;
  FrameDescriptor frame = st.q.front();
  if (frame.broadcast) {
    st.q.pop_front();
  } else {
    st.awaiting_ack = true;  // frame stays at HOL until ACKed or dropped
  }
  transmitting_ = true;
  tx_ac_ = ac;
  cb_.transmit(frame, now);
}

void EdcaMac::on_own_tx_end(TimeNs now) {
  transmitting_ = false;
  const int ac = tx_ac_;
  tx_ac_ = -1;
  if (ac < 0) return;
  AcState& st = acs_[static_cast<std::size_t>(ac)];
  if (st.awaiting_ack) return;  // unicast: resolution arrives via on_unicast_result
  if (!st.q.empty() && !st.drawn) start_cycle(ac, now);
}

EdcaMac::UnicastResult EdcaMac::on_unicast_result(bool acked, TimeNs now) {
  for (std::size_t ac = 0; ac < acs_.size(); ++ac) {
    AcState& st = acs_[ac];
    if (!st.awaiting_ack) continue;
    st.awaiting_ack = false;
    const AccessCategory& cat = edca_table()[ac];
    UnicastResult result;
    if (acked) {
      result = UnicastResult::kCompleted;
    } else if (st.retries >= kMaxRetries) {
      result = UnicastResult::kDropped;
    } else {
      ++st.retries;
      st.cw = std::min(2 * (st.cw + 1) - 1, cat.cw_max);
      start_cycle(static_cast<int>(ac), now);
      return UnicastResult::kRetry;
    }
    st.q.pop_front();
    st.retries = 0;
    st.cw = cat.cw_min;
    if (!st.q.empty()) start_cycle(static_cast<int>(ac), now);
    return result;
  }
  throw std::logic_error("on_unicast_result: no frame awaiting an ACK");
}

}  // namespace rcs
