#include "rcs/radcom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcs {

void RadComConfig::validate() const {
  if (hop_data_rate_bps <= 0.0) throw std::invalid_argument("radcom hop data rate must be > 0");
  if (per_hop_reliability <= 0.0 || per_hop_reliability > 1.0) {
    throw std::invalid_argument("radcom per-hop reliability must lie in (0, 1]");
  }
  if (per_hop_processing_s < 0.0) throw std::invalid_argument("radcom processing must be >= 0");
  if (max_hop_gap_m <= 0.0) throw std::invalid_argument("radcom max hop gap must be > 0");
}

CapacityCheck capacity_check(const RadComConfig& config, double msg_rate_hz, int payload_bytes) {
  if (config.hop_data_rate_bps < 6e6) {
    return {false, "hop data rate below the 6 Mbit/s ETSI ITS-G5 default"};
  }
  if (msg_rate_hz < 1.0) {
    return {false, "message rate below the 1 Hz minimum"};
  }
  if (msg_rate_hz > 40.0) {
    return {false, "message rate above the 40 Hz maximum"};
  }
  const double airtime_s = payload_bytes * 8.0 / config.hop_data_rate_bps;
  if (!(airtime_s < 1.0 / msg_rate_hz)) {
    return {false, "per-hop airtime does not fit the message period"};
  }
  return {true, ""};
}

std::vector<RadComDelivery> radcom_deliver(const Platoon& platoon, int src_vehicle,
                                           int payload_bytes, TimeNs now,
                                           const RadComConfig& config, RngStream& loss_rng) {
  if (!platoon.radcom_enabled) {
    throw std::invalid_argument("radcom_deliver: platoon is not RadCom-enabled");
  }
  const auto it =
      std::find(platoon.ordered_members.begin(), platoon.ordered_members.end(), src_vehicle);
  if (it == platoon.ordered_members.end()) {
    throw std::invalid_argument("radcom_deliver: source is not a platoon member");
  }
  const int src_idx = static_cast<int>(it - platoon.ordered_members.begin());
  const int n = static_cast<int>(platoon.ordered_members.size());

  const TimeNs hop_delay = seconds_to_ns(payload_bytes * 8.0 / config.hop_data_rate_bps +
                                         config.per_hop_processing_s);

  std::vector<RadComDelivery> out;
  out.reserve(static_cast<std::size_t>(n - 1));

  auto propagate = [&](int step) {
    bool alive = true;
    for (int i = src_idx + step; i >= 0 && i < n; i += step) {
      const int hops = std::abs(i - src_idx);
      const int gap_idx = step > 0 ? i - 1 : i;
      if (alive) {
        const bool link_ok = platoon.gaps_m[static_cast<std::size_t>(gap_idx)] <=
                             config.max_hop_gap_m;
        const bool hop_ok = loss_rng.next_unit() < config.per_hop_reliability;
        alive = link_ok && hop_ok;
      }
      out.push_back({platoon.ordered_members[static_cast<std::size_t>(i)], hops, alive,
                     now + static_cast<TimeNs>(hops) * hop_delay});
    }
  };
  propagate(-1);  // toward the front
  propagate(+1);  // toward the rear
  return out;
}

}  // namespace rcs
