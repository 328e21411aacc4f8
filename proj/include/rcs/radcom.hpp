#pragma once

#include <string>
#include <vector>

#include "rcs/rng.hpp"
#include "rcs/scenario.hpp"
#include "rcs/units.hpp"

namespace rcs {

struct RadComConfig {
  double hop_data_rate_bps = 100e6;
  double per_hop_processing_s = 1e-3;
  double per_hop_reliability = 0.999;
  double max_hop_gap_m = 60.0;

  void validate() const;
};

struct CapacityCheck {
  bool pass = false;
  std::string reason;  // empty on pass
};

/// Static check that a RadCom link meets the ETSI ITS-G5 minimums: at least
/// the 6 Mbit/s default data rate, message rate within [1, 40] Hz, and per-hop
/// airtime short enough to sustain the message rate.
CapacityCheck capacity_check(const RadComConfig& config, double msg_rate_hz, int payload_bytes);

struct RadComDelivery {
  int vehicle = -1;
  int hops = 0;
  bool delivered = false;
  TimeNs arrival = 0;
};

/// Store-and-forward delivery over the bumper-to-bumper chain: from the
/// source, the message hops outward in both directions; a member h hops away
/// receives at now + h * (payload_airtime + per_hop_processing) with success
/// probability per_hop_reliability^h. A failed hop (or a hop gap above
/// max_hop_gap) truncates propagation past that vehicle. Hops toward the
/// front are drawn first, then toward the rear.
std::vector<RadComDelivery> radcom_deliver(const Platoon& platoon, int src_vehicle,
                                           int payload_bytes, TimeNs now,
                                           const RadComConfig& config, RngStream& loss_rng);

}  // namespace rcs
