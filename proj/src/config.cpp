#include "rcs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "rcs/mac.hpp"

namespace rcs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return i;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long i = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return i;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(line, "expected true/false, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double(trim(item), line));
  }
  if (out.empty()) throw ConfigError(line, "expected a comma-separated list of numbers");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

using Setter = std::function<void(FullConfig&, const std::string&, int)>;
using Getter = std::function<std::string(const FullConfig&)>;

struct KeySpec {
  const char* name;
  Setter set;
  Getter get;
};

const std::vector<KeySpec>& key_registry() {
  static const std::vector<KeySpec> keys = {
      // scenario
      {"road_length",
       [](FullConfig& c, const std::string& v, int l) { c.scenario.road_length_m = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.scenario.road_length_m); }},
      {"lanes_per_direction",
       [](FullConfig& c, const std::string& v, int l) {
         c.scenario.lanes_per_direction = static_cast<int>(parse_int(v, l));
       },
       [](const FullConfig& c) { return std::to_string(c.scenario.lanes_per_direction); }},
      {"density",
       [](FullConfig& c, const std::string& v, int l) {
         c.scenario.density_veh_per_km_lane = parse_double(v, l);
       },
       [](const FullConfig& c) { return fmt(c.scenario.density_veh_per_km_lane); }},
      {"speed",
       [](FullConfig& c, const std::string& v, int l) { c.scenario.speed_mps = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.scenario.speed_mps); }},
      {"platoon_size",
       [](FullConfig& c, const std::string& v, int l) {
         c.scenario.platoon_size = static_cast<int>(parse_int(v, l));
       },
       [](const FullConfig& c) { return std::to_string(c.scenario.platoon_size); }},
      {"penetration_rate",
       [](FullConfig& c, const std::string& v, int l) {
         c.scenario.penetration_rate = parse_double(v, l);
         if (c.scenario.penetration_rate < 0.0 || c.scenario.penetration_rate > 1.0) {
           throw ConfigError(l, "penetration_rate out of range [0, 1]");
         }
       },
       [](const FullConfig& c) { return fmt(c.scenario.penetration_rate); }},
      {"warmup",
       [](FullConfig& c, const std::string& v, int l) { c.scenario.warmup_s = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.scenario.warmup_s); }},
      {"measure",
       [](FullConfig& c, const std::string& v, int l) { c.scenario.measure_s = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.scenario.measure_s); }},
      {"seed",
       [](FullConfig& c, const std::string& v, int l) { c.scenario.seed = parse_u64(v, l); },
       [](const FullConfig& c) { return std::to_string(c.scenario.seed); }},
      {"pcm_period",
       [](FullConfig& c, const std::string& v, int l) { c.scenario.pcm_period_s = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.scenario.pcm_period_s); }},
      {"member_cam_suppression",
       [](FullConfig& c, const std::string& v, int l) {
         c.scenario.member_cam_suppression = parse_bool(v, l);
       },
       [](const FullConfig& c) { return c.scenario.member_cam_suppression ? "true" : "false"; }},
      {"vehicle_length",
       [](FullConfig& c, const std::string& v, int l) { c.scenario.vehicle_length_m = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.scenario.vehicle_length_m); }},
      {"initial_gap",
       [](FullConfig& c, const std::string& v, int l) { c.scenario.initial_gap_m = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.scenario.initial_gap_m); }},
      {"cam_heading_delta",
       [](FullConfig& c, const std::string& v, int l) {
         c.scenario.cam_rules.heading_delta_deg = parse_double(v, l);
       },
       [](const FullConfig& c) { return fmt(c.scenario.cam_rules.heading_delta_deg); }},
      {"cam_position_delta",
       [](FullConfig& c, const std::string& v, int l) {
         c.scenario.cam_rules.position_delta_m = parse_double(v, l);
       },
       [](const FullConfig& c) { return fmt(c.scenario.cam_rules.position_delta_m); }},
      {"cam_speed_delta",
       [](FullConfig& c, const std::string& v, int l) {
         c.scenario.cam_rules.speed_delta_mps = parse_double(v, l);
       },
       [](const FullConfig& c) { return fmt(c.scenario.cam_rules.speed_delta_mps); }},
      {"cam_t_min",
       [](FullConfig& c, const std::string& v, int l) { c.scenario.cam_rules.t_min_s = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.scenario.cam_rules.t_min_s); }},
      {"cam_t_max",
       [](FullConfig& c, const std::string& v, int l) { c.scenario.cam_rules.t_max_s = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.scenario.cam_rules.t_max_s); }},
      // phy
      {"tx_power",
       [](FullConfig& c, const std::string& v, int l) { c.phy.tx_power_mw = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.phy.tx_power_mw); }},
      {"carrier_freq",
       [](FullConfig& c, const std::string& v, int l) { c.phy.carrier_freq_hz = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.phy.carrier_freq_hz); }},
      {"bandwidth",
       [](FullConfig& c, const std::string& v, int l) { c.phy.bandwidth_hz = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.phy.bandwidth_hz); }},
      {"pathloss_exponent",
       [](FullConfig& c, const std::string& v, int l) { c.phy.pathloss_exponent = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.phy.pathloss_exponent); }},
      {"cs_threshold",
       [](FullConfig& c, const std::string& v, int l) { c.phy.cs_threshold_dbm = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.phy.cs_threshold_dbm); }},
      {"sinr_threshold",
       [](FullConfig& c, const std::string& v, int l) { c.phy.sinr_threshold_db = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.phy.sinr_threshold_db); }},
      {"noise_floor",
       [](FullConfig& c, const std::string& v, int l) { c.phy.noise_floor_dbm = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.phy.noise_floor_dbm); }},
      {"max_range",
       [](FullConfig& c, const std::string& v, int l) { c.phy.max_range_m = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.phy.max_range_m); }},
      // mac
      {"data_rate",
       [](FullConfig& c, const std::string& v, int l) { c.mac.data_rate_bps = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.mac.data_rate_bps); }},
      {"pcm_unicast",
       [](FullConfig& c, const std::string& v, int l) { c.mac.pcm_unicast = parse_bool(v, l); },
       [](const FullConfig& c) { return c.mac.pcm_unicast ? "true" : "false"; }},
      {"dcc",
       [](FullConfig& c, const std::string& v, int l) {
         if (v == "off") c.mac.dcc = DccMode::kOff;
         else if (v == "reactive") c.mac.dcc = DccMode::kReactive;
         else if (v == "adaptive") c.mac.dcc = DccMode::kAdaptive;
         else throw ConfigError(l, "dcc must be off, reactive or adaptive");
       },
       [](const FullConfig& c) {
         switch (c.mac.dcc) {
           case DccMode::kReactive: return std::string("reactive");
           case DccMode::kAdaptive: return std::string("adaptive");
           default: return std::string("off");
         }
       }},
      // radcom
      {"radcom_hop_data_rate",
       [](FullConfig& c, const std::string& v, int l) { c.radcom.hop_data_rate_bps = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.radcom.hop_data_rate_bps); }},
      {"radcom_per_hop_processing",
       [](FullConfig& c, const std::string& v, int l) {
         c.radcom.per_hop_processing_s = parse_double(v, l);
       },
       [](const FullConfig& c) { return fmt(c.radcom.per_hop_processing_s); }},
      {"radcom_per_hop_reliability",
       [](FullConfig& c, const std::string& v, int l) {
         c.radcom.per_hop_reliability = parse_double(v, l);
       },
       [](const FullConfig& c) { return fmt(c.radcom.per_hop_reliability); }},
      {"radcom_max_hop_gap",
       [](FullConfig& c, const std::string& v, int l) { c.radcom.max_hop_gap_m = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.radcom.max_hop_gap_m); }},
      // braking
      {"braking_v0",
       [](FullConfig& c, const std::string& v, int l) { c.braking.v0_mps = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.braking.v0_mps); }},
      {"a_lead",
       [](FullConfig& c, const std::string& v, int l) { c.braking.a_lead_mps2 = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.braking.a_lead_mps2); }},
      {"a_follow",
       [](FullConfig& c, const std::string& v, int l) {
         const auto list = parse_double_list(v, l);
         if (list.size() == 1) {
           c.braking.a_follow_default_mps2 = list[0];
           c.braking.a_follow_mps2.clear();
         } else {
           c.braking.a_follow_mps2 = list;
         }
       },
       [](const FullConfig& c) {
         if (c.braking.a_follow_mps2.empty()) return fmt(c.braking.a_follow_default_mps2);
         std::string out;
         for (std::size_t i = 0; i < c.braking.a_follow_mps2.size(); ++i) {
           if (i) out += ",";
           out += fmt(c.braking.a_follow_mps2[i]);
         }
         return out;
       }},
      {"t_actuation",
       [](FullConfig& c, const std::string& v, int l) { c.braking.t_actuation_s = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.braking.t_actuation_s); }},
      {"epsilon",
       [](FullConfig& c, const std::string& v, int l) { c.braking.epsilon = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.braking.epsilon); }},
      // aero
      {"mass",
       [](FullConfig& c, const std::string& v, int l) { c.aero.mass_kg = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.aero.mass_kg); }},
      {"cd0",
       [](FullConfig& c, const std::string& v, int l) { c.aero.cd0 = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.aero.cd0); }},
      {"frontal_area",
       [](FullConfig& c, const std::string& v, int l) { c.aero.frontal_area_m2 = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.aero.frontal_area_m2); }},
      {"air_density",
       [](FullConfig& c, const std::string& v, int l) { c.aero.air_density_kgm3 = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.aero.air_density_kgm3); }},
      {"c_rr",
       [](FullConfig& c, const std::string& v, int l) { c.aero.c_rr = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.aero.c_rr); }},
      {"drivetrain_efficiency",
       [](FullConfig& c, const std::string& v, int l) {
         c.aero.drivetrain_efficiency = parse_double(v, l);
       },
       [](const FullConfig& c) { return fmt(c.aero.drivetrain_efficiency); }},
      {"fuel_energy_density",
       [](FullConfig& c, const std::string& v, int l) {
         c.aero.fuel_energy_density_j_per_l = parse_double(v, l);
       },
       [](const FullConfig& c) { return fmt(c.aero.fuel_energy_density_j_per_l); }},
      {"drag_multiplier",
       [](FullConfig& c, const std::string& v, int l) {
         if (v == "auto") {
           c.drag_multiplier = std::numeric_limits<double>::quiet_NaN();
         } else {
           c.drag_multiplier = parse_double(v, l);
           if (c.drag_multiplier <= 0.0) throw ConfigError(l, "drag_multiplier must be > 0");
         }
       },
       [](const FullConfig& c) {
         return std::isnan(c.drag_multiplier) ? std::string("auto") : fmt(c.drag_multiplier);
       }},
      // metrics
      {"pdr_distance",
       [](FullConfig& c, const std::string& v, int l) { c.metrics.pdr_distance_m = parse_double(v, l); },
       [](const FullConfig& c) { return fmt(c.metrics.pdr_distance_m); }},
  };
  return keys;
}

}  // namespace

std::string ConfigError::format(int line, const std::string& msg) {
  if (line > 0) return "config error (line " + std::to_string(line) + "): " + msg;
  return "config error: " + msg;
}

void FullConfig::validate() const {
  scenario.validate();
  phy.validate();
  radcom.validate();
  braking.validate();
  aero.validate();
  if (metrics.pdr_distance_m <= 0.0) {
    throw std::invalid_argument("pdr_distance must be > 0");
  }
  // Data rate feasibility is checked where airtime is computed, but a config
  // should fail fast.
  (void)airtime_ns(0, mac.data_rate_bps);
}

FullConfig parse_config(const std::string& text) {
  FullConfig config;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(line_no, "expected 'key = value'");
    }
    bool found = false;
    for (const KeySpec& spec : key_registry()) {
      if (key == spec.name) {
        spec.set(config, value, line_no);
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError(line_no, "unknown key '" + key + "'");
  }
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  return config;
}

FullConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string resolved_config_text(const FullConfig& config,
                                 const std::vector<std::string>& extra_lines) {
  std::string out;
  for (const KeySpec& spec : key_registry()) {
    out += spec.name;
    out += " = ";
    out += spec.get(config);
    out += "\n";
  }
  for (const std::string& line : extra_lines) {
    out += line;
    out += "\n";
  }
  return out;
}

}  // namespace rcs
