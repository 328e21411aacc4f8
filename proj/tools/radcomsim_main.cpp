// Command-line front end: penetration sweeps with replications, plus the
// standalone braking-oracle validation mode.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcs/config.hpp"
#include "rcs/experiment.hpp"
#include "rcs/safety_oracle.hpp"

namespace {

std::vector<double> parse_penetrations(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw rcs::ConfigError(0, "bad --penetrations entry '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Platooning V2X channel-offloading simulator"};

  std::string config_path;
  std::string out_dir = "out";
  std::string penetrations_csv;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int replications = 5;
  bool trace = false;
  bool oracle_check = false;

  app.add_option("--config", config_path, "configuration file (key = value lines)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed")->each([&](const std::string&) {
    seed_given = true;
  });
  app.add_option("--penetrations", penetrations_csv,
                 "comma-separated penetration rates (default 0,0.5,1)");
  app.add_option("--replications", replications, "replications per rate");
  app.add_flag("--trace", trace, "dump per-event traces");
  app.add_flag("--oracle-check", oracle_check,
               "validate the braking closed form against the numeric oracle and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  if (oracle_check) {
    const auto result = rcs::run_safety_oracle_grid(42, 10000, 1e-3);
    std::printf("safety oracle grid: %d points, max |closed - numeric| = %.3e m -> %s\n",
                result.points, result.max_abs_err_m, result.pass ? "PASS" : "FAIL");
    return result.pass ? 0 : 1;
  }

  rcs::RunSpec spec;
  try {
    if (!config_path.empty()) {
      spec.config = rcs::parse_config_file(config_path);
    } else {
      spec.config.validate();
    }
    spec.out_dir = out_dir;
    spec.replications = replications;
    spec.trace = trace;
    spec.master_seed = seed_given ? seed : spec.config.scenario.seed;
    if (!penetrations_csv.empty()) {
      spec.penetrations = parse_penetrations(penetrations_csv);
    }
    spec.validate();
  } catch (const rcs::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  return rcs::run_experiment(spec);
}
