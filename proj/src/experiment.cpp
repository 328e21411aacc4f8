#include "rcs/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "rcs/fuel.hpp"
#include "rcs/rng.hpp"

namespace rcs {

namespace fs = std::filesystem;

namespace {

std::string format_double(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double sample_sd(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

/// Writes content to path via a temp file + rename so readers never see a
/// partial file.
void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

void RunSpec::validate() const {
  config.validate();
  if (penetrations.empty()) throw std::invalid_argument("penetration list is empty");
  double prev = -1.0;
  for (double p : penetrations) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("penetration values must lie in [0, 1]");
    if (p <= prev) throw std::invalid_argument("penetration values must be strictly increasing");
    prev = p;
  }
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
}

ExperimentResult run_sweep(const RunSpec& spec) {
  spec.validate();
  const std::size_t n_rates = spec.penetrations.size();
  const std::size_t n_reps = static_cast<std::size_t>(spec.replications);
  const std::size_t jobs = n_rates * n_reps;

  std::vector<RunResult> results(jobs);
  std::vector<std::string> traces(spec.trace ? jobs : 0);

  auto run_job = [&](std::size_t j) {
    const std::size_t rate_i = j / n_reps;
    const std::size_t rep = j % n_reps;
    const std::uint64_t run_seed = RngStream::mix(spec.master_seed, rep);
    std::function<void(const Event&)> sink;
    if (spec.trace) {
      std::string* buf = &traces[j];
      sink = [buf](const Event& e) {
        char line[96];
        std::snprintf(line, sizeof line, "%lld\t%llu\t%s\t%d\n",
                      static_cast<long long>(e.time),
                      static_cast<unsigned long long>(e.seq), event_kind_name(e.kind), e.node);
        *buf += line;
      };
    }
    results[j] = run_simulation(spec.config, spec.penetrations[rate_i], run_seed, sink);
  };

  // Replications are independent simulations; order of completion cannot
  // matter because results land in per-job slots and are reduced in index
  // order afterwards.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, jobs));
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t j = next.fetch_add(1); j < jobs; j = next.fetch_add(1)) run_job(j);
      });
    }
    for (auto& t : pool) t.join();
  }

  if (spec.trace) {
    fs::create_directories(spec.out_dir);
    for (std::size_t j = 0; j < jobs; ++j) {
      const std::size_t rate_i = j / n_reps;
      const std::size_t rep = j % n_reps;
      char name[96];
      std::snprintf(name, sizeof name, "trace_p%g_r%zu.tsv", spec.penetrations[rate_i], rep);
      write_atomic(fs::path(spec.out_dir) / name, traces[j]);
    }
  }

  ExperimentResult out;
  out.rates.resize(n_rates);
  for (std::size_t ri = 0; ri < n_rates; ++ri) {
    RateAggregate& agg = out.rates[ri];
    agg.rate = spec.penetrations[ri];
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
      const RunResult& r = results[ri * n_reps + rep];
      agg.pooled.merge(r.stats);
      agg.rep_pdr_pcm.push_back(r.stats.pdr_of(Service::kPcm, TxPath::kG5).value_or(0.0));
      agg.rep_latency_s.push_back(
          r.stats.latency_mean_of(Service::kPcm, TxPath::kG5).value_or(0.0));
      agg.rep_scbr.push_back(r.stats.scbr_mean().value_or(0.0));
      agg.rep_trace_hash.push_back(r.trace_hash);
      agg.rep_g5_enqueued.push_back(r.g5_enqueued);
      if (rep == 0) {
        agg.series = r.scbr_series;
      } else {
        for (std::size_t k = 0; k < agg.series.size() && k < r.scbr_series.size(); ++k) {
          agg.series[k].second += r.scbr_series[k].second;
        }
      }
    }
    for (auto& [t, s] : agg.series) s /= static_cast<double>(n_reps);
  }

  // Safe-gap reports: the emergency-message path evaluated here is the
  // C-ITS channel with the measured PCM statistics of each penetration run;
  // all pairs of the nominal platoon share that path.
  const int members = spec.config.scenario.platoon_size - 1;
  out.gaps.resize(n_rates);
  out.mean_gap_m.assign(n_rates, 0.0);
  for (std::size_t ri = 0; ri < n_rates; ++ri) {
    const auto pdr = out.rates[ri].pooled.pdr_of(Service::kPcm, TxPath::kG5);
    const auto lat = out.rates[ri].pooled.latency_mean_of(Service::kPcm, TxPath::kG5);
    if (!pdr.has_value() || *pdr <= 0.0 || !lat.has_value()) {
      std::cerr << "warning: no usable PCM statistics at penetration " << out.rates[ri].rate
                << "; gap report skipped\n";
      continue;
    }
    PathDelayInput input{*pdr, *lat, spec.config.scenario.pcm_period_s};
    std::vector<PathDelayInput> inputs(static_cast<std::size_t>(members), input);
    out.gaps[ri] = platoon_gaps(spec.config.braking, inputs, out.rates[ri].rate);
    double sum = 0.0;
    for (double g : out.gaps[ri].gap_m) sum += g;
    out.mean_gap_m[ri] =
        out.gaps[ri].gap_m.empty() ? 0.0 : sum / static_cast<double>(out.gaps[ri].gap_m.size());
  }

  // Fuel savings against the no-RadCom baseline.
  out.fuel_saving.assign(n_rates, 0.0);
  std::size_t base_i = 0;
  for (std::size_t ri = 0; ri < n_rates; ++ri) {
    if (out.rates[ri].rate == 0.0) base_i = ri;
  }
  if (std::isnan(spec.config.drag_multiplier)) {
    const auto calib = calibrate_drag_multiplier(spec.penetrations, out.gaps,
                                                 spec.config.braking.v0_mps, spec.config.aero);
    if (calib.has_value()) {
      out.drag_multiplier = calib->multiplier;
      out.drag_calibration_ok = calib->within_bands;
    } else {
      out.drag_multiplier = 1.0;
      out.drag_calibration_ok = false;
    }
  } else {
    out.drag_multiplier = spec.config.drag_multiplier;
  }
  const DragCurves curves = scale_trailing(default_drag_curves(), out.drag_multiplier);
  if (!out.gaps[base_i].gap_m.empty()) {
    for (std::size_t ri = 0; ri < n_rates; ++ri) {
      if (out.gaps[ri].gap_m.empty()) continue;
      out.fuel_saving[ri] = platoon_fuel_saving(out.gaps[base_i].gap_m, out.gaps[ri].gap_m,
                                                spec.config.braking.v0_mps, spec.config.aero,
                                                curves);
    }
    if (!std::isnan(spec.config.drag_multiplier)) {
      // Report whether a fixed multiplier still meets the fuel targets.
      auto near = [&](double rate) -> const std::vector<double>* {
        for (std::size_t ri = 0; ri < n_rates; ++ri) {
          if (std::fabs(out.rates[ri].rate - rate) < 1e-9 && !out.gaps[ri].gap_m.empty()) {
            return &out.gaps[ri].gap_m;
          }
        }
        return nullptr;
      };
      const auto* g50 = near(0.5);
      const auto* g100 = near(1.0);
      if (g50 && g100) {
        const double s50 = platoon_fuel_saving(out.gaps[base_i].gap_m, *g50,
                                               spec.config.braking.v0_mps, spec.config.aero,
                                               curves);
        const double s100 = platoon_fuel_saving(out.gaps[base_i].gap_m, *g100,
                                                spec.config.braking.v0_mps, spec.config.aero,
                                                curves);
        out.drag_calibration_ok =
            std::fabs(s50 - 0.02) <= 0.01 && std::fabs(s100 - 0.056) <= 0.015;
      }
    }
  }
  return out;
}

std::optional<DragCalibration> calibrate_drag_multiplier(
    const std::vector<double>& rates, const std::vector<GapReport>& gaps, double v_mps,
    const AeroParams& params) {
  const std::vector<double>* base = nullptr;
  const std::vector<double>* g50 = nullptr;
  const std::vector<double>* g100 = nullptr;
  for (std::size_t i = 0; i < rates.size() && i < gaps.size(); ++i) {
    if (gaps[i].gap_m.empty()) continue;
    if (rates[i] == 0.0) base = &gaps[i].gap_m;
    if (std::fabs(rates[i] - 0.5) < 1e-9) g50 = &gaps[i].gap_m;
    if (std::fabs(rates[i] - 1.0) < 1e-9) g100 = &gaps[i].gap_m;
  }
  if (!base || !g50 || !g100) return std::nullopt;

  DragCalibration best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1500; ++i) {
    const double m = 0.5 + 0.001 * i;
    const DragCurves curves = scale_trailing(default_drag_curves(), m);
    const double s50 = platoon_fuel_saving(*base, *g50, v_mps, params, curves);
    const double s100 = platoon_fuel_saving(*base, *g100, v_mps, params, curves);
    const double obj =
        std::max(std::fabs(s50 - 0.02) / 0.01, std::fabs(s100 - 0.056) / 0.015);
    if (obj < best_obj) {
      best_obj = obj;
      best = {m, s50, s100, obj <= 1.0};
    }
  }
  return best;
}

int run_experiment(const RunSpec& spec) {
  std::vector<fs::path> written;
  try {
    spec.validate();
    fs::create_directories(spec.out_dir);
    const fs::path dir(spec.out_dir);

    const ExperimentResult result = run_sweep(spec);

    auto emit = [&](const char* name, const std::string& content) {
      const fs::path p = dir / name;
      write_atomic(p, content);
      written.push_back(p);
    };

    {
      std::string csv = "penetration,pdr_pcm,pdr_sd,scbr,scbr_sd,latency_ms,latency_sd\n";
      for (const RateAggregate& agg : result.rates) {
        const double pdr = agg.pooled.pdr_of(Service::kPcm, TxPath::kG5).value_or(0.0);
        const double scbr = agg.pooled.scbr_mean().value_or(0.0);
        const double lat_ms =
            agg.pooled.latency_mean_of(Service::kPcm, TxPath::kG5).value_or(0.0) * 1e3;
        std::vector<double> lat_ms_reps;
        for (double s : agg.rep_latency_s) lat_ms_reps.push_back(s * 1e3);
        csv += format_double("%g", agg.rate);
        csv += "," + format_double("%.6f", pdr);
        csv += "," + format_double("%.6f", sample_sd(agg.rep_pdr_pcm));
        csv += "," + format_double("%.6f", scbr);
        csv += "," + format_double("%.6f", sample_sd(agg.rep_scbr));
        csv += "," + format_double("%.4f", lat_ms);
        csv += "," + format_double("%.4f", sample_sd(lat_ms_reps));
        csv += "\n";
      }
      emit("summary.csv", csv);
    }

    {
      std::string csv = "penetration,t_s,scbr\n";
      for (const RateAggregate& agg : result.rates) {
        for (const auto& [t, s] : agg.series) {
          csv += format_double("%g", agg.rate);
          csv += "," + format_double("%.1f", t);
          csv += "," + format_double("%.6f", s);
          csv += "\n";
        }
      }
      emit("scbr_timeseries.csv", csv);
    }

    {
      std::string csv = "penetration,pair_index,tau_s,gap_m\n";
      for (const GapReport& report : result.gaps) {
        for (std::size_t i = 0; i < report.gap_m.size(); ++i) {
          csv += format_double("%g", report.penetration);
          csv += "," + std::to_string(i + 1);
          csv += "," + format_double("%.6f", report.tau_s[i]);
          csv += "," + format_double("%.4f", report.gap_m[i]);
          csv += "\n";
        }
      }
      emit("gaps.csv", csv);
    }

    {
      std::string csv = "penetration,mean_gap_m,saving_fraction\n";
      for (std::size_t ri = 0; ri < result.rates.size(); ++ri) {
        if (result.gaps[ri].gap_m.empty()) continue;
        csv += format_double("%g", result.rates[ri].rate);
        csv += "," + format_double("%.4f", result.mean_gap_m[ri]);
        csv += "," + format_double("%.6f", result.fuel_saving[ri]);
        csv += "\n";
      }
      emit("fuel.csv", csv);
    }

    {
      FullConfig resolved = spec.config;
      resolved.drag_multiplier = result.drag_multiplier;
      std::vector<std::string> extra;
      extra.push_back("# drag_multiplier resolved by " +
                      std::string(std::isnan(spec.config.drag_multiplier)
                                      ? "calibration against the fuel targets"
                                      : "explicit configuration"));
      extra.push_back(std::string("# fuel targets met: ") +
                      (result.drag_calibration_ok ? "yes" : "no"));
      extra.push_back(
          "# radcom hop model assumptions: per_hop_reliability, per_hop_processing and "
          "hop_data_rate are stated inputs, not measured values");
      for (const RateAggregate& agg : result.rates) {
        for (std::size_t rep = 0; rep < agg.rep_trace_hash.size(); ++rep) {
          char line[128];
          std::snprintf(line, sizeof line, "# trace_hash p=%g rep=%zu 0x%016llx", agg.rate, rep,
                        static_cast<unsigned long long>(agg.rep_trace_hash[rep]));
          extra.push_back(line);
        }
      }
      for (const RateAggregate& agg : result.rates) {
        const auto rad_pdr = agg.pooled.pdr_of(Service::kPcm, TxPath::kRadcom);
        const auto rad_lat = agg.pooled.latency_mean_of(Service::kPcm, TxPath::kRadcom);
        if (rad_pdr.has_value()) {
          char line[160];
          std::snprintf(line, sizeof line, "# radcom_path p=%g pdr=%.6f latency_ms=%.4f",
                        agg.rate, *rad_pdr, rad_lat.value_or(0.0) * 1e3);
          extra.push_back(line);
        }
      }
      emit("resolved_config.txt", resolved_config_text(resolved, extra));
    }

    for (const RateAggregate& agg : result.rates) {
      std::cout << "penetration " << agg.rate << ": pdr_pcm="
                << agg.pooled.pdr_of(Service::kPcm, TxPath::kG5).value_or(0.0)
                << " scbr=" << agg.pooled.scbr_mean().value_or(0.0) << " latency_ms="
                << agg.pooled.latency_mean_of(Service::kPcm, TxPath::kG5).value_or(0.0) * 1e3
                << "\n";
    }
    std::cout << "drag_multiplier=" << result.drag_multiplier
              << (result.drag_calibration_ok ? " (fuel targets met)" : "") << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const fs::path& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    return 1;
  }
}

}  // namespace rcs
