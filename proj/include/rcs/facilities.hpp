#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rcs/mac.hpp"
#include "rcs/scenario.hpp"
#include "rcs/units.hpp"

namespace rcs {

/// Kinematic sample fed to the CAM trigger. Position is an unwrapped
/// odometer reading (metres travelled along the path), so displacement since
/// the last CAM is a plain difference.
struct KinematicState {
  double position_m = 0.0;
  double heading_deg = 0.0;
  double speed_mps = 0.0;
};

struct CamTriggerState {
  bool has_last = false;
  TimeNs last_cam_time = 0;
  KinematicState last;
};

enum class CamDecision : std::uint8_t { kGenerate = 0, kSkip = 1 };

/// ETSI kinematic CAM rule, evaluated on the t_min check grid: generate when
/// t_max elapsed, or when t_min elapsed and heading moved >= 4 deg, position
/// moved >= 4 m, or speed changed >= 0.5 m/s since the last CAM.
CamDecision cam_check(const KinematicState& now_state, TimeNs now, const CamTriggerState& trig,
                      const CamRules& rules);

struct OffloadPolicy {
  bool member_pcm_to_radcom = true;
  bool member_cam_suppression = true;
  bool leader_keeps_g5 = true;  // platoon leaders always stay on ITS-G5
};

enum class TxPath : std::uint8_t { kG5 = 0, kRadcom = 1 };

/// Per-vehicle emission plan derived from platoon RadCom enablement.
struct EmissionPlan {
  bool cam_on_g5 = true;
  TxPath pcm_path = TxPath::kG5;
};

/// Resolves which services each vehicle emits on which medium. Members of
/// RadCom-enabled platoons route PCMs to RadCom; with cam suppression they
/// also stop emitting CAMs on ITS-G5. Leaders always transmit on ITS-G5.
std::vector<EmissionPlan> apply_offload(const World& world, const OffloadPolicy& policy);

enum class DccMode : std::uint8_t { kOff = 0, kReactive = 1, kAdaptive = 2 };

/// Decentralized congestion control gate between the facilities layer and
/// the MAC (off by default). Consecutive releases are spaced by an off-time;
/// frames arriving while the gate is closed wait in a one-slot-per-service
/// queue where a newer frame of the same service replaces the older one.
/// PCMs are released ahead of CAMs.
///
/// Reactive mode maps the node's smoothed CBR to a fixed off-time table.
/// Adaptive mode runs the ETSI linear-control loop: a duty-cycle share
/// delta is nudged toward the 0.68 channel-load target every 200 ms and the
/// off-time after a frame of airtime T_on is T_on * (1/delta - 1), clamped
/// to [25 ms, 1 s].
class DccGate {
 public:
  explicit DccGate(DccMode mode = DccMode::kOff) : mode_(mode) {}

  struct Admit {
    bool release_now = false;
    bool evicted = false;
    FrameDescriptor evicted_frame;
  };

  /// Called every 100 ms with the node's smoothed CBR.
  void on_cbr_update(double smoothed_cbr);

  /// Gate admission for a freshly generated frame (airtime supplied by the
  /// caller). When not released immediately the frame is parked and the
  /// caller must keep a release event scheduled at next_release_time().
  Admit on_generated(const FrameDescriptor& frame, TimeNs airtime, TimeNs now);

  /// Fired at a release boundary; returns the next frame to hand to the MAC.
  std::optional<FrameDescriptor> on_release(TimeNs now);

  bool pending() const { return slot_[0].has_value() || slot_[1].has_value(); }
  TimeNs next_release_time() const { return next_allowed_; }
  double duty_share() const { return delta_; }

  static constexpr double kCbrTarget = 0.65;

 private:
  TimeNs off_time_ns(TimeNs airtime) const;

  DccMode mode_;
  double delta_ = 0.03;        // adaptive duty share, within [0.0006, 0.03]
  TimeNs reactive_off_ = 0;    // current reactive-table off-time
  TimeNs next_allowed_ = 0;
  int cbr_updates_ = 0;
  struct Parked {
    FrameDescriptor frame;
    TimeNs airtime = 0;
  };
  std::optional<Parked> slot_[2];  // indexed by Service
};

}  // namespace rcs
