// Acceptance suite: exercises the complete pipeline against the published
// targets. Criteria:
//   A  calibrated baseline channel load, then PDR trend + level bands
//   B  PCM latency ordering and bands
//   C  exact MAC/PHY arithmetic
//   D  braking closed form vs the numeric oracle
//   E  safe-gap monotonicity across penetration rates
//   F  fuel-saving calibration against the 2% / 5.6% targets
//   G  bit-identical reruns
//   H  CAM kinematic-trigger conformance
// One [PASS]/[FAIL] line per criterion; exit status reflects the whole run.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rcs/config.hpp"
#include "rcs/experiment.hpp"
#include "rcs/facilities.hpp"
#include "rcs/mac.hpp"
#include "rcs/metrics.hpp"
#include "rcs/netsim.hpp"
#include "rcs/phy.hpp"
#include "rcs/safety.hpp"
#include "rcs/safety_oracle.hpp"

namespace fs = std::filesystem;
using namespace rcs;

namespace {

int failures = 0;

void report(char criterion, bool ok, const std::string& detail) {
  std::printf("[%s] %c: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

/// The shipped experiment profile: spec defaults plus the calibrated
/// operating point (pathloss exponent and carrier-sense threshold tuned so
/// the baseline smoothed CBR lands at 0.62 +/- 0.05) and the adaptive DCC
/// the congested baseline requires.
FullConfig paper_profile() {
  FullConfig cfg;
  cfg.phy.pathloss_exponent = 1.9;
  cfg.phy.cs_threshold_dbm = -93.0;
  cfg.mac.dcc = DccMode::kAdaptive;
  cfg.scenario.seed = 20260809;
  return cfg;
}

// --- criterion C -------------------------------------------------------------

void criterion_c() {
  bool ok = airtime_ns(285, 6e6) == 424'000 && airtime_ns(301, 6e6) == 448'000;
  report('C', ok, "airtime(285 B) = 424 us, airtime(301 B) = 448 us");

  // Single-transmitter CBR accounting, exact to the nanosecond.
  {
    World w;
    w.road_length_m = 1000.0;
    for (int i = 0; i < 2; ++i) {
      Vehicle v;
      v.id = i;
      v.position_m = 10.0 * i;
      v.direction = Direction::kEast;
      w.vehicles.push_back(v);
    }
    w.platoons.push_back({0, {0, 1}, {10.0}, false});
    const RingIndex ring(w);
    ChannelMedium medium(PhyConfig{}, w, ring);

    constexpr TimeNs kWindow = 100'000'000;
    TimeNs t = 123'457;
    TimeNs total_air = 0;
    std::vector<std::pair<std::uint64_t, TimeNs>> live;
    TimeNs accounted = 0;
    TimeNs window_end = kWindow;
    for (int i = 0; i < 25; ++i) {
      const TimeNs air = 424'000 + 17'000 * (i % 3);
      while (window_end <= t) {
        accounted += medium.open_window_busy_ns(1, window_end);
        (void)medium.cbr_sample(1, window_end, kWindow);
        window_end += kWindow;
      }
      const auto h = medium.begin_transmission(0, t, t + air);
      medium.end_transmission(h, t + air);
      total_air += air;
      t += air + 100'000 + 31'000 * (i % 5);
      (void)live;
    }
    accounted += medium.open_window_busy_ns(1, window_end);
    const bool exact = accounted == total_air;
    report('C', exact,
           "single-transmitter CBR busy time exact to 1 ns (" + std::to_string(accounted) +
               " == " + std::to_string(total_air) + ")");
  }

  // Idle-channel access latency: AIFS + drawn backoff * slot + airtime.
  {
    Engine engine;
    std::vector<TimeNs> tx_times;
    std::unique_ptr<EdcaMac> mac;
    engine.set_handler([&](const Event& e) {
      if (e.kind == EventKind::kAccessAttempt) {
        mac->on_access_event(static_cast<int>(e.a), e.b, e.time);
      } else if (e.kind == EventKind::kTxEnd) {
        mac->on_own_tx_end(e.time);
      }
    });
    EdcaMac::Callbacks cb;
    cb.transmit = [&](const FrameDescriptor& f, TimeNs now) {
      tx_times.push_back(now);
      engine.schedule(now + airtime_ns(f.payload_bytes, 6e6), EventKind::kTxEnd, 0);
    };
    const std::uint64_t seed = 404;
    mac = std::make_unique<EdcaMac>(
        engine, 0, RngStream::vehicle_stream(seed, 0, RngStream::Purpose::kBackoff),
        std::move(cb));

    RngStream expect = RngStream::vehicle_stream(seed, 0, RngStream::Purpose::kBackoff);
    const TimeNs draw = expect.next_below(8);  // AC_VI contention window

    FrameDescriptor f;
    f.sender = 0;
    f.payload_bytes = 301;
    f.traffic_class = TrafficClass::kTc1;
    f.service = Service::kPcm;
    mac->enqueue(f, 0);
    engine.run_until(10'000'000);

    const TimeNs expected_latency = aifs_ns(edca_table()[1]) + draw * kSlotNs + 448'000;
    const bool ok2 = tx_times.size() == 1 && tx_times[0] + 448'000 == expected_latency;
    report('C', ok2,
           "idle-channel latency == AIFS + " + std::to_string(draw) +
               " slots + airtime == " + std::to_string(expected_latency) + " ns exactly");
  }
}

// --- criterion D -------------------------------------------------------------

void criterion_d() {
  const auto grid = run_safety_oracle_grid(42, 10'000, 1e-3);
  report('D', grid.pass,
         "closed form vs 1 ms numeric oracle on " + std::to_string(grid.points) +
             " random points: max error " + fmt("%.3e", grid.max_abs_err_m) + " m (tol 1e-3)");

  // Property checks: monotone in tau and v0, anti-monotone in a_follow.
  RngStream rng(4242, 11);
  bool mono = true;
  for (int i = 0; i < 2000 && mono; ++i) {
    const double v0 = 1.0 + rng.next_unit() * 40.0;
    const double al = 1.0 + rng.next_unit() * 8.0;
    const double af = 1.0 + rng.next_unit() * 8.0;
    const double tau = rng.next_unit() * 5.0;
    const double g = min_safe_gap_m(v0, al, af, tau);
    mono = min_safe_gap_m(v0, al, af, tau + 0.25) >= g - 1e-9 &&
           min_safe_gap_m(v0 + 1.0, al, af, tau) >= g - 1e-9 &&
           min_safe_gap_m(v0, al, af + 0.25, tau) <= g + 1e-9;
  }
  report('D', mono, "gap monotonicity in tau, v0 and a_follow over 2000 random points");
}

// --- criterion H -------------------------------------------------------------

void criterion_h() {
  const CamRules rules;
  auto intervals = [&](const std::function<KinematicState(double)>& trajectory,
                       double duration_s) {
    CamTriggerState trig;
    std::vector<TimeNs> gaps;
    TimeNs last = -1;
    const TimeNs step = seconds_to_ns(rules.t_min_s);
    for (TimeNs t = 0; t <= seconds_to_ns(duration_s); t += step) {
      const KinematicState s = trajectory(ns_to_seconds(t));
      if (cam_check(s, t, trig, rules) == CamDecision::kGenerate) {
        if (last >= 0) gaps.push_back(t - last);
        last = t;
        trig.has_last = true;
        trig.last_cam_time = t;
        trig.last = s;
      }
    }
    return gaps;
  };

  bool ok = true;
  std::string detail;

  auto all_equal = [](const std::vector<TimeNs>& gaps, TimeNs want) {
    return !gaps.empty() &&
           std::all_of(gaps.begin(), gaps.end(), [&](TimeNs g) { return g == want; });
  };

  const auto stationary =
      intervals([](double) { return KinematicState{0.0, 90.0, 0.0}; }, 12.0);
  ok &= all_equal(stationary, seconds_to_ns(1.0));

  const auto cruising =
      intervals([](double t) { return KinematicState{22.2 * t, 90.0, 22.2}; }, 12.0);
  ok &= all_equal(cruising, seconds_to_ns(0.2));

  const auto heading_step = intervals(
      [](double t) { return KinematicState{0.0, t >= 0.55 ? 95.0 : 90.0, 0.0}; }, 3.0);
  ok &= !heading_step.empty() && heading_step.front() == seconds_to_ns(0.6);

  const auto speed_step = intervals(
      [](double t) { return KinematicState{0.0, 90.0, t >= 0.25 ? 0.6 : 0.0}; }, 3.0);
  ok &= !speed_step.empty() && speed_step.front() == seconds_to_ns(0.3);

  // Bounds on a jittery mixed trajectory.
  const auto mixed = intervals(
      [](double t) {
        const double speed = 15.0 + ((static_cast<int>(t * 10) % 9) == 0 ? 2.0 : 0.0);
        return KinematicState{15.0 * t, 90.0, speed};
      },
      30.0);
  for (TimeNs g : mixed) {
    ok &= g >= seconds_to_ns(rules.t_min_s) && g <= seconds_to_ns(rules.t_max_s);
  }

  report('H', ok,
         "stationary 1000 ms, cruising 200 ms, heading/speed steps on the check grid, all "
         "intervals within [100, 1000] ms");
}

// --- criterion G -------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_g() {
  RunSpec spec;
  spec.config = paper_profile();
  spec.config.scenario.road_length_m = 1200.0;
  spec.config.scenario.lanes_per_direction = 1;
  spec.config.scenario.density_veh_per_km_lane = 10.0;
  spec.config.scenario.warmup_s = 5.0;
  spec.config.scenario.measure_s = 5.0;
  spec.replications = 2;
  spec.master_seed = 77;

  const fs::path base = fs::temp_directory_path() / "radcomsim_acceptance_g";
  fs::remove_all(base);
  spec.out_dir = (base / "a").string();
  const int rc1 = run_experiment(spec);
  spec.out_dir = (base / "b").string();
  const int rc2 = run_experiment(spec);

  bool ok = rc1 == 0 && rc2 == 0;
  for (const char* name : {"summary.csv", "gaps.csv", "fuel.csv", "resolved_config.txt",
                           "scbr_timeseries.csv"}) {
    ok = ok && slurp(base / "a" / name) == slurp(base / "b" / name);
  }
  // resolved_config.txt embeds the per-run event-trace hashes, so equality
  // above already pins the traces; double-check directly as well.
  const RunResult r1 = run_simulation(spec.config, 0.5, 99);
  const RunResult r2 = run_simulation(spec.config, 0.5, 99);
  ok = ok && r1.trace_hash == r2.trace_hash;

  report('G', ok, "byte-identical summary/gaps/fuel/resolved outputs and equal trace hashes");
}

// --- criteria A, B, E, F (one shared sweep) ----------------------------------

void criteria_abef() {
  RunSpec spec;
  spec.config = paper_profile();
  spec.penetrations = {0.0, 0.5, 1.0};
  spec.replications = 5;
  spec.master_seed = spec.config.scenario.seed;

  std::printf("running the full sweep: 3 rates x %d replications, 1200 vehicles, 150 s "
              "simulated each (this takes a while)\n",
              spec.replications);
  std::fflush(stdout);
  const ExperimentResult result = run_sweep(spec);

  const RateAggregate& r0 = result.rates[0];
  const RateAggregate& r50 = result.rates[1];
  const RateAggregate& r100 = result.rates[2];

  const double pdr0 = r0.pooled.pdr_of(Service::kPcm, TxPath::kG5).value_or(0.0);
  const double pdr50 = r50.pooled.pdr_of(Service::kPcm, TxPath::kG5).value_or(0.0);
  const double pdr100 = r100.pooled.pdr_of(Service::kPcm, TxPath::kG5).value_or(0.0);
  const double scbr0 = r0.pooled.scbr_mean().value_or(0.0);
  const double scbr50 = r50.pooled.scbr_mean().value_or(0.0);
  const double scbr100 = r100.pooled.scbr_mean().value_or(0.0);
  const double lat0 = r0.pooled.latency_mean_of(Service::kPcm, TxPath::kG5).value_or(0.0);
  const double lat50 = r50.pooled.latency_mean_of(Service::kPcm, TxPath::kG5).value_or(0.0);
  const double lat100 = r100.pooled.latency_mean_of(Service::kPcm, TxPath::kG5).value_or(0.0);

  // A1: calibration target on the baseline channel load.
  report('A', std::fabs(scbr0 - 0.62) <= 0.05,
         "baseline S-CBR " + fmt("%.4f", scbr0) + " within 0.62 +/- 0.05");

  // A2: PDR ordering in every replication.
  bool ordering = true;
  for (std::size_t rep = 0; rep < r0.rep_pdr_pcm.size(); ++rep) {
    ordering = ordering && r0.rep_pdr_pcm[rep] < r50.rep_pdr_pcm[rep] &&
               r50.rep_pdr_pcm[rep] < r100.rep_pdr_pcm[rep];
  }
  report('A', ordering, "PDR(0%) < PDR(50%) < PDR(100%) holds in every replication");

  // A3: PDR level bands.
  report('A', std::fabs(pdr0 - 0.70) <= 0.10,
         "PDR(0%) " + fmt("%.4f", pdr0) + " within 0.70 +/- 0.10 (paper 0.6985)");
  report('A', std::fabs(pdr100 - 0.90) <= 0.08,
         "PDR(100%) " + fmt("%.4f", pdr100) + " within 0.90 +/- 0.08 (paper 0.9015)");

  // A4: channel occupation bands.
  report('A', std::fabs(scbr50 - scbr0) <= 0.05,
         "S-CBR(50%) " + fmt("%.4f", scbr50) + " within 0.05 of baseline " +
             fmt("%.4f", scbr0) + " (paper 0.6119 vs 0.6176)");
  report('A', scbr100 <= 0.35,
         "S-CBR(100%) " + fmt("%.4f", scbr100) + " <= 0.35 (paper 0.2217)");

  // B: latency ordering and bands.
  report('B', lat0 > lat50 && lat50 > lat100,
         "latency ordering " + fmt("%.2f", lat0 * 1e3) + " > " + fmt("%.2f", lat50 * 1e3) +
             " > " + fmt("%.2f", lat100 * 1e3) + " ms (paper 136.80 / 109.57 / 1.45)");
  report('B', lat100 <= 0.010, "latency(100%) " + fmt("%.3f", lat100 * 1e3) + " ms <= 10 ms");
  report('B', lat0 >= 0.050, "latency(0%) " + fmt("%.2f", lat0 * 1e3) + " ms >= 50 ms");

  // E: per-pair gap monotonicity across penetration rates.
  bool gaps_ok = !result.gaps[0].gap_m.empty() && !result.gaps[1].gap_m.empty() &&
                 !result.gaps[2].gap_m.empty();
  if (gaps_ok) {
    for (std::size_t pair = 0; pair < result.gaps[0].gap_m.size(); ++pair) {
      gaps_ok = gaps_ok && result.gaps[2].gap_m[pair] <= result.gaps[1].gap_m[pair] &&
                result.gaps[1].gap_m[pair] <= result.gaps[0].gap_m[pair];
    }
  }
  report('E', gaps_ok,
         "per-pair gaps shrink with penetration: " + fmt("%.2f", result.mean_gap_m[0]) +
             " m -> " + fmt("%.2f", result.mean_gap_m[1]) + " m -> " +
             fmt("%.2f", result.mean_gap_m[2]) + " m");

  // F: one trailing-drag multiplier must land both fuel-saving targets.
  const auto calib = calibrate_drag_multiplier(spec.penetrations, result.gaps,
                                               spec.config.braking.v0_mps, spec.config.aero);
  if (!calib.has_value()) {
    report('F', false, "fuel calibration could not run (missing gap reports)");
  } else {
    const bool in_range = calib->multiplier >= 0.5 && calib->multiplier <= 2.0;
    report('F', calib->within_bands && in_range,
           "multiplier " + fmt("%.3f", calib->multiplier) + " gives saving(50%) " +
               fmt("%.4f", calib->saving_50) + " (target 0.02 +/- 0.01) and saving(100%) " +
               fmt("%.4f", calib->saving_100) + " (target 0.056 +/- 0.015)");
  }
}

}  // namespace

int main() {
  criterion_c();
  criterion_d();
  criterion_h();
  criterion_g();
  criteria_abef();

  if (failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d check(s) failed\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
