#include "rcs/netsim.hpp"

#include <unordered_map>

#include "rcs/facilities.hpp"
#include "rcs/mac.hpp"
#include "rcs/phy.hpp"
#include "rcs/radcom.hpp"
#include "rcs/rng.hpp"

namespace rcs {

namespace {

constexpr TimeNs kCbrWindowNs = 100'000'000;  // 100 ms
constexpr double kDrainTailS = 5.0;           // lets queued window frames resolve
constexpr int kAckPayloadBytes = 14;

class Simulation {
 public:
  Simulation(const FullConfig& config, double penetration, std::uint64_t run_seed)
      : config_(config),
        penetration_(penetration),
        seed_(run_seed),
        world_(make_world(config, penetration, run_seed)),
        ring_(world_),
        medium_(config.phy, world_, ring_),
        warmup_ns_(seconds_to_ns(config.scenario.warmup_s)),
        total_ns_(seconds_to_ns(config.scenario.warmup_s + config.scenario.measure_s)),
        horizon_ns_(total_ns_ + seconds_to_ns(kDrainTailS)),
        collector_(warmup_ns_, total_ns_, config.metrics.pdr_distance_m) {
    OffloadPolicy policy;
    policy.member_cam_suppression = config.scenario.member_cam_suppression;
    plans_ = apply_offload(world_, policy);

    const std::size_t n = world_.vehicles.size();
    macs_.reserve(n);
    cam_trigger_.resize(n);
    scbr_.assign(n, 0.0);
    cbr_prev_.assign(n, 0.0);
    pcm_phase_ns_.resize(n);
    cam_offset_ns_.resize(n);
    pcm_count_.assign(n, 0);
    if (config_.mac.dcc != DccMode::kOff) {
      dcc_.assign(n, DccGate(config_.mac.dcc));
      gate_token_.assign(n, 0);
    }

    for (std::size_t i = 0; i < n; ++i) {
      const int node = static_cast<int>(i);
      RngStream jitter = RngStream::vehicle_stream(seed_, static_cast<std::uint32_t>(i),
                                                   RngStream::Purpose::kJitter);
      pcm_phase_ns_[i] = seconds_to_ns(jitter.next_unit() * config_.scenario.pcm_period_s);
      cam_offset_ns_[i] = seconds_to_ns(jitter.next_unit() * config_.scenario.cam_rules.t_min_s);

      EdcaMac::Callbacks cb;
      cb.transmit = [this, node](const FrameDescriptor& f, TimeNs now) {
        start_flight(node, f, now);
      };
      cb.queue_drop = [this](const FrameDescriptor& f, TimeNs now) { record_queue_drop(f, now); };
      macs_.emplace_back(engine_, node,
                         RngStream::vehicle_stream(seed_, static_cast<std::uint32_t>(i),
                                                   RngStream::Purpose::kBackoff),
                         std::move(cb));
      radcom_rng_.emplace_back(RngStream::vehicle_stream(seed_, static_cast<std::uint32_t>(i),
                                                         RngStream::Purpose::kRadcomLoss));
    }

    medium_.set_busy_callback([this](int node, bool busy, TimeNs now) {
      macs_[static_cast<std::size_t>(node)].on_medium_busy(busy, now);
    });
    engine_.set_handler([this](const Event& e) { dispatch(e); });
  }

  RunResult run(const std::function<void(const Event&)>& trace_sink) {
    if (trace_sink) engine_.set_trace_sink(trace_sink);

    for (std::size_t i = 0; i < world_.vehicles.size(); ++i) {
      engine_.schedule(pcm_phase_ns_[i], EventKind::kGenTick, static_cast<int>(i), kTickPcm);
      engine_.schedule(cam_offset_ns_[i], EventKind::kGenTick, static_cast<int>(i), kTickCam);
    }
    engine_.schedule(kCbrWindowNs, EventKind::kCbrSample, -1);
    engine_.schedule(warmup_ns_, EventKind::kMeasureBoundary, -1);
    engine_.schedule(total_ns_, EventKind::kMeasureBoundary, -1);

    engine_.run_until(horizon_ns_);

    RunResult result;
    result.stats = collector_.stats();
    result.scbr_series = std::move(scbr_series_);
    result.trace_hash = engine_.trace_hash();
    result.events_processed = engine_.processed();
    result.g5_enqueued = g5_enqueued_;
    result.g5_transmissions = g5_transmissions_;
    result.queue_drops = queue_drops_;
    result.radcom_messages = radcom_messages_;
    result.pcm_generated_per_vehicle = std::move(pcm_count_);
    return result;
  }

 private:
  static constexpr std::uint32_t kTickPcm = 0;
  static constexpr std::uint32_t kTickCam = 1;
  static constexpr std::uint32_t kTickDccRelease = 2;

  struct Flight {
    FrameDescriptor frame;
    TimeNs start = 0;
    TimeNs end = 0;
    std::uint64_t handle = 0;
    bool is_ack = false;
    std::uint32_t data_slot = 0;  // for ACK flights
    bool ack_received = false;
  };

  struct UnicastProgress {
    bool delivered = false;
    TimeNs received_at = -1;
    double distance_m = 0.0;
    RxOutcome last_outcome = RxOutcome::kLostWeak;
  };

  static World make_world(const FullConfig& config, double penetration, std::uint64_t seed) {
    ScenarioConfig sc = config.scenario;
    sc.seed = seed;
    return assign_penetration(build_world(sc), penetration, seed);
  }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::kGenTick:
        if (e.a == kTickPcm) {
          pcm_tick(e.node, e.time);
        } else if (e.a == kTickCam) {
          cam_tick(e.node, e.time);
        } else {
          gate_release(e.node, e.b, e.time);
        }
        break;
      case EventKind::kAccessAttempt:
        macs_[static_cast<std::size_t>(e.node)].on_access_event(static_cast<int>(e.a), e.b,
                                                                e.time);
        break;
      case EventKind::kTxStart: tx_start(e.a, e.time); break;
      case EventKind::kTxEnd: tx_end(e.a, e.time); break;
      case EventKind::kCbrSample: cbr_sample_all(e.time); break;
      case EventKind::kMeasureBoundary: break;  // trace marker
      case EventKind::kRadcomArrive:
        collector_.add(radcom_pending_[static_cast<std::size_t>(e.b)]);
        break;
      case EventKind::kAckTimeout: ack_timeout(static_cast<std::uint32_t>(e.a), e.time); break;
    }
  }

  // -- facilities ------------------------------------------------------------

  void pcm_tick(int node, TimeNs now) {
    const EmissionPlan& plan = plans_[static_cast<std::size_t>(node)];
    if (collector_.in_window(now)) ++pcm_count_[static_cast<std::size_t>(node)];

    if (plan.pcm_path == TxPath::kRadcom) {
      send_radcom_pcm(node, now);
    } else {
      FrameDescriptor f;
      f.frame_id = next_frame_id_++;
      f.sender = node;
      f.payload_bytes = 301;
      f.traffic_class = TrafficClass::kTc1;
      f.generated_at = now;
      f.service = Service::kPcm;
      if (config_.mac.pcm_unicast) {
        f.broadcast = false;
        f.dest = unicast_dest(node);
      }
      offer_to_g5(std::move(f), now);
    }

    const TimeNs next = now + seconds_to_ns(config_.scenario.pcm_period_s);
    if (next < horizon_ns_) engine_.schedule(next, EventKind::kGenTick, node, kTickPcm);
  }

  int unicast_dest(int node) const {
    // Members report to the leader; the leader commands its first follower.
    const Vehicle& v = world_.vehicles[static_cast<std::size_t>(node)];
    const Platoon& p = world_.platoons[static_cast<std::size_t>(v.platoon_id)];
    if (v.role == Role::kMember) return p.ordered_members[0];
    return p.ordered_members.size() > 1 ? p.ordered_members[1] : p.ordered_members[0];
  }

  void cam_tick(int node, TimeNs now) {
    const std::size_t i = static_cast<std::size_t>(node);
    const Vehicle& v = world_.vehicles[i];
    KinematicState state;
    state.position_m = v.position_m + v.speed_mps * ns_to_seconds(now);  // odometer
    state.heading_deg = v.direction == Direction::kEast ? 90.0 : 270.0;
    state.speed_mps = v.speed_mps;

    if (cam_check(state, now, cam_trigger_[i], config_.scenario.cam_rules) ==
        CamDecision::kGenerate) {
      cam_trigger_[i].has_last = true;
      cam_trigger_[i].last_cam_time = now;
      cam_trigger_[i].last = state;
      if (plans_[i].cam_on_g5) {
        FrameDescriptor f;
        f.frame_id = next_frame_id_++;
        f.sender = node;
        f.payload_bytes = 285;
        f.traffic_class = TrafficClass::kTc2;
        f.generated_at = now;
        f.service = Service::kCam;
        offer_to_g5(std::move(f), now);
      }
    }
    const TimeNs next = now + seconds_to_ns(config_.scenario.cam_rules.t_min_s);
    if (next < horizon_ns_) engine_.schedule(next, EventKind::kGenTick, node, kTickCam);
  }

  // Routes a generated frame through the node's DCC gate (when enabled)
  // into the MAC.
  void offer_to_g5(FrameDescriptor f, TimeNs now) {
    ++g5_enqueued_;
    const std::size_t i = static_cast<std::size_t>(f.sender);
    if (config_.mac.dcc == DccMode::kOff) {
      macs_[i].enqueue(std::move(f), now);
      return;
    }
    DccGate& gate = dcc_[i];
    const bool was_pending = gate.pending();
    const TimeNs air = airtime_ns(f.payload_bytes, config_.mac.data_rate_bps);
    const int sender = f.sender;
    const auto admit = gate.on_generated(f, air, now);
    if (admit.release_now) {
      macs_[i].enqueue(std::move(f), now);
      return;
    }
    if (admit.evicted) record_queue_drop(admit.evicted_frame, now);
    if (!was_pending) schedule_gate_release(sender);
  }

  void schedule_gate_release(int node) {
    const std::size_t i = static_cast<std::size_t>(node);
    const TimeNs at = std::max(engine_.now(), dcc_[i].next_release_time());
    engine_.schedule(at, EventKind::kGenTick, node, kTickDccRelease, ++gate_token_[i]);
  }

  void gate_release(int node, std::uint64_t token, TimeNs now) {
    const std::size_t i = static_cast<std::size_t>(node);
    if (token != gate_token_[i]) return;
    DccGate& gate = dcc_[i];
    if (auto f = gate.on_release(now)) {
      macs_[i].enqueue(std::move(*f), now);
    }
    if (gate.pending()) schedule_gate_release(node);
  }

  // -- radcom ----------------------------------------------------------------

  void send_radcom_pcm(int node, TimeNs now) {
    ++radcom_messages_;
    const Vehicle& v = world_.vehicles[static_cast<std::size_t>(node)];
    const Platoon& platoon = world_.platoons[static_cast<std::size_t>(v.platoon_id)];
    const std::uint64_t frame_id = next_frame_id_++;
    const auto deliveries = radcom_deliver(platoon, node, 301, now, config_.radcom,
                                           radcom_rng_[static_cast<std::size_t>(node)]);
    if (!collector_.in_window(now)) return;
    const double t_s = ns_to_seconds(now);
    for (const RadComDelivery& d : deliveries) {
      RxRecord rec;
      rec.frame_id = frame_id;
      rec.sender = node;
      rec.receiver = d.vehicle;
      rec.distance_m = ring_.ring_distance_at(node, d.vehicle, t_s);
      rec.generated_at = now;
      rec.service = Service::kPcm;
      rec.path = TxPath::kRadcom;
      if (d.delivered) {
        rec.received_at = d.arrival;
        rec.outcome = RxOutcome::kDelivered;
        radcom_pending_.push_back(rec);
        engine_.schedule(d.arrival, EventKind::kRadcomArrive, d.vehicle, 0,
                         radcom_pending_.size() - 1);
      } else {
        rec.outcome = RxOutcome::kLostWeak;
        collector_.add(rec);
      }
    }
  }

  // -- phy / mac glue ----------------------------------------------------------

  std::uint32_t alloc_flight() {
    if (!free_flights_.empty()) {
      const std::uint32_t slot = free_flights_.back();
      free_flights_.pop_back();
      return slot;
    }
    flights_.emplace_back();
    return static_cast<std::uint32_t>(flights_.size() - 1);
  }

  void start_flight(int node, const FrameDescriptor& f, TimeNs now) {
    const std::uint32_t slot = alloc_flight();
    Flight& fl = flights_[slot];
    fl = Flight{};
    fl.frame = f;
    fl.start = now;
    fl.end = now + airtime_ns(f.payload_bytes, config_.mac.data_rate_bps);
    engine_.schedule(now, EventKind::kTxStart, node, slot);
  }

  void tx_start(std::uint32_t slot, TimeNs now) {
    Flight& fl = flights_[slot];
    fl.handle = medium_.begin_transmission(fl.frame.sender, fl.start, fl.end);
    ++g5_transmissions_;
    engine_.schedule(fl.end, EventKind::kTxEnd, fl.frame.sender, slot);
    (void)now;
  }

  void tx_end(std::uint32_t slot, TimeNs now) {
    Flight& fl = flights_[slot];
    medium_.end_transmission(fl.handle, now);

    if (fl.is_ack) {
      Flight& data = flights_[fl.data_slot];
      if (medium_.resolve_reception(fl.handle, data.frame.sender) == RxOutcome::kDelivered) {
        data.ack_received = true;
      }
      free_flights_.push_back(slot);
      return;
    }

    if (fl.frame.broadcast) {
      if (collector_.in_window(fl.frame.generated_at)) {
        const double t_s = ns_to_seconds(fl.start);
        ring_.for_each_in_range(
            fl.frame.sender, t_s, config_.metrics.pdr_distance_m, [&](int rx, double d) {
              RxRecord rec;
              rec.frame_id = fl.frame.frame_id;
              rec.sender = fl.frame.sender;
              rec.receiver = rx;
              rec.distance_m = d;
              rec.generated_at = fl.frame.generated_at;
              rec.service = fl.frame.service;
              rec.path = TxPath::kG5;
              rec.outcome = medium_.resolve_reception(fl.handle, rx);
              if (rec.outcome == RxOutcome::kDelivered) rec.received_at = fl.end;
              collector_.add(rec);
            });
      }
      macs_[static_cast<std::size_t>(fl.frame.sender)].on_own_tx_end(now);
      free_flights_.push_back(slot);
      return;
    }

    // Unicast data frame: resolve at the destination, solicit an ACK.
    // Copy out what is needed first: allocating the ACK slot can reallocate
    // the flight vector and invalidate fl.
    const int sender = fl.frame.sender;
    const int dest = fl.frame.dest;
    const std::uint64_t frame_id = fl.frame.frame_id;
    const TimeNs f_start = fl.start;
    const TimeNs f_end = fl.end;
    const RxOutcome outcome = medium_.resolve_reception(fl.handle, dest);
    UnicastProgress& progress = unicast_progress_[frame_id];
    progress.last_outcome = outcome;
    progress.distance_m = ring_.ring_distance_at(sender, dest, ns_to_seconds(f_start));
    if (outcome == RxOutcome::kDelivered && !progress.delivered) {
      progress.delivered = true;
      progress.received_at = f_end;
    }
    const TimeNs ack_air = airtime_ns(kAckPayloadBytes, config_.mac.data_rate_bps);
    if (outcome == RxOutcome::kDelivered && !medium_.own_tx_active(dest)) {
      const std::uint32_t ack_slot = alloc_flight();
      Flight& ack = flights_[ack_slot];
      ack = Flight{};
      ack.frame.frame_id = next_frame_id_++;
      ack.frame.sender = dest;
      ack.frame.payload_bytes = kAckPayloadBytes;
      ack.frame.generated_at = now;
      ack.is_ack = true;
      ack.data_slot = slot;
      ack.start = now + kSifsNs;
      ack.end = ack.start + ack_air;
      engine_.schedule(ack.start, EventKind::kTxStart, dest, ack_slot);
    }
    engine_.schedule(now + kSifsNs + ack_air + kSlotNs, EventKind::kAckTimeout, sender, slot);
    macs_[static_cast<std::size_t>(sender)].on_own_tx_end(now);
  }

  void ack_timeout(std::uint32_t slot, TimeNs now) {
    // Copy the flight: the MAC callback below may transmit the retry and
    // reallocate the flight vector.
    const Flight fl = flights_[slot];
    auto it = unicast_progress_.find(fl.frame.frame_id);
    const auto result = macs_[static_cast<std::size_t>(fl.frame.sender)].on_unicast_result(
        fl.ack_received, now);
    if (result == EdcaMac::UnicastResult::kRetry) {
      free_flights_.push_back(slot);
      return;
    }
    RxRecord rec;
    rec.frame_id = fl.frame.frame_id;
    rec.sender = fl.frame.sender;
    rec.receiver = fl.frame.dest;
    rec.generated_at = fl.frame.generated_at;
    rec.service = fl.frame.service;
    rec.path = TxPath::kG5;
    rec.distance_m = it->second.distance_m;
    if (it->second.delivered) {
      rec.outcome = RxOutcome::kDelivered;
      rec.received_at = it->second.received_at;
    } else {
      rec.outcome = it->second.last_outcome;
    }
    collector_.add(rec);
    unicast_progress_.erase(it);
    free_flights_.push_back(slot);
  }

  void record_queue_drop(const FrameDescriptor& f, TimeNs now) {
    ++queue_drops_;
    if (!collector_.in_window(f.generated_at)) return;
    if (!f.broadcast) {
      RxRecord rec;
      rec.frame_id = f.frame_id;
      rec.sender = f.sender;
      rec.receiver = f.dest;
      rec.distance_m = ring_.ring_distance_at(f.sender, f.dest, ns_to_seconds(now));
      rec.generated_at = f.generated_at;
      rec.outcome = RxOutcome::kLostQueue;
      rec.service = f.service;
      rec.path = TxPath::kG5;
      collector_.add(rec);
      return;
    }
    const double t_s = ns_to_seconds(now);
    ring_.for_each_in_range(f.sender, t_s, config_.metrics.pdr_distance_m,
                            [&](int rx, double d) {
                              RxRecord rec;
                              rec.frame_id = f.frame_id;
                              rec.sender = f.sender;
                              rec.receiver = rx;
                              rec.distance_m = d;
                              rec.generated_at = f.generated_at;
                              rec.outcome = RxOutcome::kLostQueue;
                              rec.service = f.service;
                              rec.path = TxPath::kG5;
                              collector_.add(rec);
                            });
  }

  // -- cbr -------------------------------------------------------------------

  void cbr_sample_all(TimeNs now) {
    const bool in_window = now > warmup_ns_ && now <= total_ns_;
    double fleet_sum = 0.0;
    for (std::size_t i = 0; i < scbr_.size(); ++i) {
      const double c = medium_.cbr_sample(static_cast<int>(i), now, kCbrWindowNs);
      scbr_[i] = scbr_update(scbr_[i], c, cbr_prev_[i]);
      cbr_prev_[i] = c;
      if (config_.mac.dcc != DccMode::kOff) dcc_[i].on_cbr_update(scbr_[i]);
      if (in_window) {
        collector_.add_scbr_sample(scbr_[i]);
        fleet_sum += scbr_[i];
      }
    }
    if (in_window) {
      scbr_series_.emplace_back(ns_to_seconds(now), fleet_sum / static_cast<double>(scbr_.size()));
    }
    if (now + kCbrWindowNs <= total_ns_) {
      engine_.schedule(now + kCbrWindowNs, EventKind::kCbrSample, -1);
    }
  }

  // -- state -------------------------------------------------------------------

  FullConfig config_;
  double penetration_;
  std::uint64_t seed_;
  World world_;
  RingIndex ring_;
  ChannelMedium medium_;
  Engine engine_;
  TimeNs warmup_ns_, total_ns_, horizon_ns_;
  MetricsCollector collector_;

  std::vector<EmissionPlan> plans_;
  std::vector<EdcaMac> macs_;
  std::vector<RngStream> radcom_rng_;
  std::vector<CamTriggerState> cam_trigger_;
  std::vector<DccGate> dcc_;
  std::vector<std::uint64_t> gate_token_;
  std::vector<double> scbr_, cbr_prev_;
  std::vector<TimeNs> pcm_phase_ns_, cam_offset_ns_;
  std::vector<std::uint32_t> pcm_count_;
  std::vector<std::pair<double, double>> scbr_series_;

  std::vector<Flight> flights_;
  std::vector<std::uint32_t> free_flights_;
  std::vector<RxRecord> radcom_pending_;
  std::unordered_map<std::uint64_t, UnicastProgress> unicast_progress_;

  std::uint64_t next_frame_id_ = 1;
  std::uint64_t g5_enqueued_ = 0;
  std::uint64_t g5_transmissions_ = 0;
  std::uint64_t queue_drops_ = 0;
  std::uint64_t radcom_messages_ = 0;
};

}  // namespace

RunResult run_simulation(const FullConfig& config, double penetration, std::uint64_t run_seed,
                         const std::function<void(const Event&)>& trace_sink) {
  config.validate();
  Simulation sim(config, penetration, run_seed);
  return sim.run(trace_sink);
}

}  // namespace rcs
