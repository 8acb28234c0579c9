#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "capstokes/evolution.hpp"
#include "capstokes/grid.hpp"

namespace capstokes {

// Configuration problems carry exit code 2; the message names the key.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BumpSpec {
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;
};

struct ProfileSpec {
  std::string family = "flat";  // flat | gaussian | bump_sum | file
  double amplitude = 0.0;
  double width = 1.0;
  std::vector<BumpSpec> bumps;
  std::string path;
};

struct RunConfig {
  double L = 16.0;
  int N = 512;
  ProfileSpec profile;
  PhysicalParams params;
  double T = 0.0;
  Controls controls;
  std::uint64_t seed = 1;
  std::vector<double> mu_plus_list;            // sweep
  std::vector<std::pair<double, double>> points;  // fields
  bool has_time = false;
};

RunConfig load_config(const std::string& path);
GridFunction materialize_profile(const RunConfig& cfg);

// %.17g: shortest exact round-trip for doubles, fixed across runs.
std::string format_full(double x);

void write_trajectory_csv(const std::string& path, const std::vector<SimulationState>& traj);

}  // namespace capstokes
