#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rcs/facilities.hpp"
#include "rcs/fuel.hpp"
#include "rcs/phy.hpp"
#include "rcs/radcom.hpp"
#include "rcs/safety.hpp"
#include "rcs/scenario.hpp"

namespace rcs {

struct MacConfig {
  double data_rate_bps = 6e6;
  bool pcm_unicast = false;  // ACKed unicast PCMs with retries; broadcast by default
  DccMode dcc = DccMode::kOff;
};

struct MetricsConfig {
  double pdr_distance_m = 200.0;
};

struct FullConfig {
  ScenarioConfig scenario;
  PhyConfig phy;
  MacConfig mac;
  RadComConfig radcom;
  BrakingScenario braking;
  AeroParams aero;
  MetricsConfig metrics;
  // Scalar multiplier on the trailing drag-reduction table; NaN selects
  // automatic calibration against the fuel-saving targets.
  double drag_multiplier = std::numeric_limits<double>::quiet_NaN();

  void validate() const;
};

/// Config-file failure with the 1-based offending line (0 for cross-field
/// violations not tied to a single line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg)
      : std::runtime_error(format(line, msg)), line_(line) {}
  int line() const { return line_; }

 private:
  static std::string format(int line, const std::string& msg);
  int line_;
};

/// Parses the line-oriented `key = value` format ('#' starts a comment).
/// Unknown keys are rejected; missing keys keep their documented defaults.
FullConfig parse_config(const std::string& text);

FullConfig parse_config_file(const std::string& path);

/// Canonical echo of every key with its resolved value, ready to be parsed
/// back. Extra lines are appended verbatim (use "#" to keep them comments).
std::string resolved_config_text(const FullConfig& config,
                                 const std::vector<std::string>& extra_lines = {});

}  // namespace rcs
