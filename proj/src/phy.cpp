#include "rcs/phy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcs {

void PhyConfig::validate() const {
  if (tx_power_mw <= 0.0) throw std::invalid_argument("tx_power must be > 0");
  if (max_range_m <= 0.0) throw std::invalid_argument("max_range must be > 0");
  if (sinr_threshold_db <= 0.0) throw std::invalid_argument("sinr_threshold must be > 0 dB");
  if (carrier_freq_hz <= 0.0) throw std::invalid_argument("carrier_freq must be > 0");
  if (bandwidth_hz <= 0.0) throw std::invalid_argument("bandwidth must be > 0");
  if (pathloss_exponent <= 0.0) throw std::invalid_argument("pathloss_exponent must be > 0");
}

double path_loss_db(double distance_m, const PhyConfig& config) {
  if (distance_m <= 0.0) {
    throw std::invalid_argument("path_loss_db: distance must be > 0");
  }
  const double ref =
      20.0 * std::log10(4.0 * M_PI * config.carrier_freq_hz / kSpeedOfLightMps);
  return ref + 10.0 * config.pathloss_exponent * std::log10(distance_m);
}

double rx_power_dbm(double distance_m, const PhyConfig& config) {
  return mw_to_dbm(config.tx_power_mw) - path_loss_db(distance_m, config);
}

const char* rx_outcome_name(RxOutcome o) {
  switch (o) {
    case RxOutcome::kDelivered: return "delivered";
    case RxOutcome::kLostCollision: return "lost_collision";
    case RxOutcome::kLostWeak: return "lost_weak";
    case RxOutcome::kLostQueue: return "lost_queue";
  }
  return "unknown";
}

ChannelMedium::ChannelMedium(const PhyConfig& config, const World& world, const RingIndex& ring)
    : config_(config), world_(&world), ring_(&ring) {
  config_.validate();
  const double ref_db = path_loss_db(1.0, config_);
  ref_loss_linear_ = std::pow(10.0, ref_db / 10.0);
  exponent_is_two_ = config_.pathloss_exponent == 2.0;
  cs_threshold_units_ =
      static_cast<std::int64_t>(std::llround(dbm_to_mw(config_.cs_threshold_dbm) * kUnitsPerMw));
  noise_mw_ = dbm_to_mw(config_.noise_floor_dbm);
  sinr_threshold_linear_ = std::pow(10.0, config_.sinr_threshold_db / 10.0);

  nodes_.resize(world.vehicles.size());
  same_dir_units_.resize(world.vehicles.size());
  for (const Vehicle& v : world.vehicles) {
    auto& list = same_dir_units_[static_cast<std::size_t>(v.id)];
    const RingIndex::Group& g = ring_->group_of(v.id);
    for (std::size_t i = 0; i < g.id.size(); ++i) {
      if (g.id[i] == v.id) continue;
      const double d = ring_distance(g.x0[i], v.position_m, world.road_length_m);
      if (d <= config_.max_range_m) {
        const double mw = rx_power_mw_at_distance(d);
        list.emplace_back(g.id[i],
                          static_cast<std::int64_t>(std::llround(mw * kUnitsPerMw)));
      }
    }
  }
}

double ChannelMedium::rx_power_mw_at_distance(double distance_m) const {
  const double d = std::max(distance_m, 1.0);  // near-field floor at the reference distance
  const double gain =
      exponent_is_two_ ? d * d : std::pow(d, config_.pathloss_exponent);
  return config_.tx_power_mw / (ref_loss_linear_ * gain);
}

void ChannelMedium::refresh_busy(NodeState& st, int node, TimeNs now) {
  const bool busy = st.own_tx > 0 || st.audible_units > cs_threshold_units_;
  if (busy == st.busy) return;
  if (st.busy) {
    st.window_busy_ns += now - st.busy_since;
  } else {
    st.busy_since = now;
  }
  st.busy = busy;
  if (busy_cb_) busy_cb_(node, busy, now);
}

void ChannelMedium::apply_power(int node, std::int64_t units, TimeNs now) {
  NodeState& st = nodes_[static_cast<std::size_t>(node)];
  st.audible_units += units;
  refresh_busy(st, node, now);
}

void ChannelMedium::set_own_tx(int node, int delta, TimeNs now) {
  NodeState& st = nodes_[static_cast<std::size_t>(node)];
  st.own_tx += delta;
  refresh_busy(st, node, now);
}

std::uint64_t ChannelMedium::begin_transmission(int sender, TimeNs start, TimeNs end) {
  Transmission tx;
  tx.sender = sender;
  tx.start = start;
  tx.end = end;
  max_airtime_seen_ = std::max(max_airtime_seen_, end - start);

  const double t_s = ns_to_seconds(start);
  // Same-direction neighbours: static precomputed powers.
  tx.applied = same_dir_units_[static_cast<std::size_t>(sender)];
  // Opposite-direction neighbours move relative to the sender; compute now.
  const Vehicle& sv = world_->vehicles[static_cast<std::size_t>(sender)];
  const RingIndex::Group& opposite =
      sv.direction == Direction::kEast ? ring_->west() : ring_->east();
  const double sender_pos = ring_->position_at(sender, t_s);
  ring_->for_each_in_group(opposite, sender, sender_pos, t_s, config_.max_range_m,
                           [&](int node, double d) {
                             const double mw = rx_power_mw_at_distance(d);
                             tx.applied.emplace_back(
                                 node, static_cast<std::int64_t>(std::llround(mw * kUnitsPerMw)));
                           });

  for (const auto& [node, units] : tx.applied) apply_power(node, units, start);
  set_own_tx(sender, +1, start);

  // Prune transmissions that can no longer overlap anything in flight.
  const TimeNs horizon = start - 2 * max_airtime_seen_ - 1;
  while (!log_.empty() && log_.front().ended && log_.front().end < horizon) {
    log_.pop_front();
    ++log_base_;
  }

  log_.push_back(std::move(tx));
  ++tx_counter_;
  return log_base_ + log_.size() - 1;
}

void ChannelMedium::end_transmission(std::uint64_t handle, TimeNs now) {
  Transmission& tx = log_[static_cast<std::size_t>(handle - log_base_)];
  for (const auto& [node, units] : tx.applied) apply_power(node, -units, now);
  set_own_tx(tx.sender, -1, now);
  tx.ended = true;
  tx.applied.clear();
  tx.applied.shrink_to_fit();
}

bool ChannelMedium::is_busy(int node) const {
  const NodeState& st = nodes_[static_cast<std::size_t>(node)];
  return st.busy;
}

bool ChannelMedium::own_tx_active(int node) const {
  return nodes_[static_cast<std::size_t>(node)].own_tx > 0;
}

double ChannelMedium::cbr_sample(int node, TimeNs window_end, TimeNs window_ns) {
  NodeState& st = nodes_[static_cast<std::size_t>(node)];
  if (st.busy) {
    st.window_busy_ns += window_end - st.busy_since;
    st.busy_since = window_end;
  }
  const double ratio =
      static_cast<double>(st.window_busy_ns) / static_cast<double>(window_ns);
  st.window_busy_ns = 0;
  return ratio;
}

TimeNs ChannelMedium::open_window_busy_ns(int node, TimeNs now) const {
  const NodeState& st = nodes_[static_cast<std::size_t>(node)];
  return st.window_busy_ns + (st.busy ? now - st.busy_since : 0);
}

const ChannelMedium::Transmission& ChannelMedium::tx_of(std::uint64_t handle) const {
  return log_[static_cast<std::size_t>(handle - log_base_)];
}

RxOutcome ChannelMedium::resolve_reception(std::uint64_t handle, int receiver) const {
  const Transmission& frame = tx_of(handle);
  const double t_s = ns_to_seconds(frame.start);
  const double dist = ring_->ring_distance_at(frame.sender, receiver, t_s);
  if (dist > config_.max_range_m) return RxOutcome::kLostWeak;

  const double signal_mw = rx_power_mw_at_distance(dist);
  if (signal_mw < sinr_threshold_linear_ * noise_mw_) return RxOutcome::kLostWeak;

  // Gather transmissions overlapping [start, end). The log is start-ordered,
  // so everything relevant sits after start - max_airtime.
  struct Edge {
    TimeNs t;
    double delta_mw;
  };
  std::vector<Edge> edges;
  double at_start_mw = 0.0;

  const TimeNs lo = frame.start - max_airtime_seen_;
  std::size_t idx = 0;
  {
    // Binary search on start times within the retained window.
    std::size_t a = 0, b = log_.size();
    while (a < b) {
      const std::size_t mid = (a + b) / 2;
      if (log_[mid].start < lo) {
        a = mid + 1;
      } else {
        b = mid;
      }
    }
    idx = a;
  }
  const double lock_threshold_mw = dbm_to_mw(config_.cs_threshold_dbm);
  for (std::size_t i = idx; i < log_.size(); ++i) {
    const Transmission& other = log_[i];
    if (other.start >= frame.end) break;
    if (&other == &frame) continue;
    if (other.end <= frame.start) continue;
    if (other.sender == receiver) return RxOutcome::kLostCollision;  // half-duplex
    const double d = ring_->ring_distance_at(other.sender, receiver, t_s);
    if (d > config_.max_range_m) continue;
    const double p = rx_power_mw_at_distance(d);
    if (other.start <= frame.start) {
      // No capture: a receiver already synchronised onto an earlier audible
      // frame cannot re-lock onto this one (equal starts lock neither way).
      if (other.start < frame.start && p > lock_threshold_mw) {
        return RxOutcome::kLostCollision;
      }
      at_start_mw += p;
    } else {
      edges.push_back({other.start, p});
    }
    if (other.end < frame.end) {
      edges.push_back({other.end, -p});
    }
  }

  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    if (x.t != y.t) return x.t < y.t;
    return x.delta_mw < y.delta_mw;  // removals first at equal times
  });

  double running = at_start_mw;
  double max_interference = running;
  for (const Edge& e : edges) {
    running += e.delta_mw;
    max_interference = std::max(max_interference, running);
  }

  if (signal_mw >= sinr_threshold_linear_ * (noise_mw_ + max_interference)) {
    return RxOutcome::kDelivered;
  }
  return RxOutcome::kLostCollision;
}

}  // namespace rcs
