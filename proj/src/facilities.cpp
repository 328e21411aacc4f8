#include "rcs/facilities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcs {

namespace {

double heading_delta_deg(double a, double b) {
  double d = std::fabs(std::fmod(a - b, 360.0));
  if (d > 180.0) d = 360.0 - d;
  return d;
}

}  // namespace

CamDecision cam_check(const KinematicState& now_state, TimeNs now, const CamTriggerState& trig,
                      const CamRules& rules) {
  if (!trig.has_last) return CamDecision::kGenerate;
  const TimeNs elapsed = now - trig.last_cam_time;
  const TimeNs t_max = seconds_to_ns(rules.t_max_s);
  const TimeNs t_min = seconds_to_ns(rules.t_min_s);
  if (elapsed >= t_max) return CamDecision::kGenerate;
  if (elapsed < t_min) return CamDecision::kSkip;
  if (heading_delta_deg(now_state.heading_deg, trig.last.heading_deg) >=
      rules.heading_delta_deg) {
    return CamDecision::kGenerate;
  }
  if (std::fabs(now_state.position_m - trig.last.position_m) >= rules.position_delta_m) {
    return CamDecision::kGenerate;
  }
  if (std::fabs(now_state.speed_mps - trig.last.speed_mps) >= rules.speed_delta_mps) {
    return CamDecision::kGenerate;
  }
  return CamDecision::kSkip;
}

std::vector<EmissionPlan> apply_offload(const World& world, const OffloadPolicy& policy) {
  if (!policy.leader_keeps_g5) {
    throw std::invalid_argument("apply_offload: platoon leaders must stay on ITS-G5");
  }
  std::vector<EmissionPlan> plans(world.vehicles.size());
  for (const Vehicle& v : world.vehicles) {
    EmissionPlan& plan = plans[static_cast<std::size_t>(v.id)];
    const Platoon& platoon = world.platoons[static_cast<std::size_t>(v.platoon_id)];
    const bool offloaded_member =
        platoon.radcom_enabled && v.role == Role::kMember && policy.member_pcm_to_radcom;
    plan.pcm_path = offloaded_member ? TxPath::kRadcom : TxPath::kG5;
    plan.cam_on_g5 = !(offloaded_member && policy.member_cam_suppression);
  }
  return plans;
}

void DccGate::on_cbr_update(double smoothed_cbr) {
  if (mode_ == DccMode::kReactive) {
    // Reactive state machine: tighter channel load, longer off-time.
    if (smoothed_cbr < 0.19) reactive_off_ = seconds_to_ns(0.06);
    else if (smoothed_cbr < 0.27) reactive_off_ = seconds_to_ns(0.10);
    else if (smoothed_cbr < 0.35) reactive_off_ = seconds_to_ns(0.18);
    else if (smoothed_cbr < 0.43) reactive_off_ = seconds_to_ns(0.26);
    else reactive_off_ = seconds_to_ns(0.46);
  } else if (mode_ == DccMode::kAdaptive) {
    // Linear control toward the CBR target, evaluated every 200 ms.
    if (++cbr_updates_ % 2 == 0) {
      constexpr double kAlpha = 0.016;
      constexpr double kBeta = 0.0012;
      delta_ = (1.0 - kAlpha) * delta_ + kBeta * (kCbrTarget - smoothed_cbr);
      delta_ = std::clamp(delta_, 0.0006, 0.03);
    }
  }
}

TimeNs DccGate::off_time_ns(TimeNs airtime) const {
  if (mode_ == DccMode::kReactive) return reactive_off_;
  const double off = static_cast<double>(airtime) * (1.0 / delta_ - 1.0);
  return std::clamp(static_cast<TimeNs>(off), seconds_to_ns(0.025), seconds_to_ns(1.0));
}

DccGate::Admit DccGate::on_generated(const FrameDescriptor& frame, TimeNs airtime, TimeNs now) {
  Admit admit;
  if (mode_ == DccMode::kOff || (now >= next_allowed_ && !pending())) {
    admit.release_now = true;
    if (mode_ != DccMode::kOff) next_allowed_ = now + off_time_ns(airtime);
    return admit;
  }
  auto& slot = slot_[static_cast<std::size_t>(frame.service)];
  if (slot.has_value()) {
    admit.evicted = true;
    admit.evicted_frame = slot->frame;
  }
  slot = Parked{frame, airtime};
  return admit;
}

std::optional<FrameDescriptor> DccGate::on_release(TimeNs now) {
  if (now < next_allowed_) return std::nullopt;
  // PCMs carry platoon control and leave ahead of CAMs.
  for (std::size_t s : {static_cast<std::size_t>(Service::kPcm),
                        static_cast<std::size_t>(Service::kCam)}) {
    if (slot_[s].has_value()) {
      const Parked parked = *slot_[s];
      slot_[s].reset();
      next_allowed_ = now + off_time_ns(parked.airtime);
      return parked.frame;
    }
  }
  return std::nullopt;
}

}  // namespace rcs
