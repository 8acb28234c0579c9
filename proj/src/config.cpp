#include "capstokes/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace capstokes {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw ConfigError("config error at key '" + key + "': " + why);
}

const json& require_key(const json& j, const std::string& parent, const std::string& key) {
  if (!j.is_object()) bad_key(parent.empty() ? key : parent, "expected an object");
  auto it = j.find(key);
  const std::string full = parent.empty() ? key : parent + "." + key;
  if (it == j.end()) bad_key(full, "missing required key");
  return *it;
}

double require_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad_key(key, "expected a number");
  return j.get<double>();
}

int require_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad_key(key, "expected an integer");
  return j.get<int>();
}

std::string require_string(const json& j, const std::string& key) {
  if (!j.is_string()) bad_key(key, "expected a string");
  return j.get<std::string>();
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config error: top level must be an object");

  RunConfig cfg;

  {
    const json& grid = require_key(root, "", "grid");
    cfg.L = require_number(require_key(grid, "grid", "L"), "grid.L");
    if (!(cfg.L > 0.0)) bad_key("grid.L", "half-length must be positive");
    cfg.N = require_int(require_key(grid, "grid", "N"), "grid.N");
    if (cfg.N < 8 || cfg.N % 2 != 0) bad_key("grid.N", "node count must be an even integer >= 8");
  }

  {
    const json& prof = require_key(root, "", "profile");
    cfg.profile.family = require_string(require_key(prof, "profile", "family"), "profile.family");
    const std::string& fam = cfg.profile.family;
    if (fam == "flat") {
      // no parameters
    } else if (fam == "gaussian") {
      cfg.profile.amplitude = require_number(require_key(prof, "profile", "amplitude"), "profile.amplitude");
      cfg.profile.width = require_number(require_key(prof, "profile", "width"), "profile.width");
      if (!(cfg.profile.width > 0.0)) bad_key("profile.width", "width must be positive");
    } else if (fam == "bump_sum") {
      const json& bumps = require_key(prof, "profile", "bumps");
      if (!bumps.is_array() || bumps.empty()) bad_key("profile.bumps", "expected a non-empty array");
      for (std::size_t i = 0; i < bumps.size(); ++i) {
        const std::string base = "profile.bumps[" + std::to_string(i) + "]";
        BumpSpec b;
        b.amplitude = require_number(require_key(bumps[i], base, "amplitude"), base + ".amplitude");
        b.width = require_number(require_key(bumps[i], base, "width"), base + ".width");
        if (!(b.width > 0.0)) bad_key(base + ".width", "width must be positive");
        b.center = require_number(require_key(bumps[i], base, "center"), base + ".center");
        cfg.profile.bumps.push_back(b);
      }
    } else if (fam == "file") {
      cfg.profile.path = require_string(require_key(prof, "profile", "path"), "profile.path");
    } else {
      bad_key("profile.family", "unknown family '" + fam + "' (flat, gaussian, bump_sum, file)");
    }
  }

  if (root.contains("physics")) {
    const json& ph = root["physics"];
    if (!ph.is_object()) bad_key("physics", "expected an object");
    if (ph.contains("mu")) cfg.params.mu = require_number(ph["mu"], "physics.mu");
    if (ph.contains("mu_plus")) cfg.params.mu_plus = require_number(ph["mu_plus"], "physics.mu_plus");
    if (ph.contains("sigma")) cfg.params.sigma = require_number(ph["sigma"], "physics.sigma");
    if (!(cfg.params.mu > 0.0)) bad_key("physics.mu", "viscosity must be positive");
    if (!(cfg.params.mu_plus >= 0.0)) bad_key("physics.mu_plus", "viscosity must be nonnegative");
    if (!(cfg.params.sigma > 0.0)) bad_key("physics.sigma", "surface tension must be positive");
  }

  if (root.contains("time")) {
    const json& tm = root["time"];
    if (!tm.is_object()) bad_key("time", "expected an object");
    cfg.T = require_number(require_key(tm, "time", "T"), "time.T");
    if (!(cfg.T >= 0.0)) bad_key("time.T", "final time must be nonnegative");
    cfg.has_time = true;
    if (tm.contains("output_times")) {
      if (!tm["output_times"].is_array()) bad_key("time.output_times", "expected an array of numbers");
      for (const auto& v : tm["output_times"])
        cfg.controls.output_times.push_back(require_number(v, "time.output_times"));
    }
  }

  if (root.contains("controls")) {
    const json& c = root["controls"];
    if (!c.is_object()) bad_key("controls", "expected an object");
    if (c.contains("rk_tol")) cfg.controls.rk_tol = require_number(c["rk_tol"], "controls.rk_tol");
    if (c.contains("c_cfl")) cfg.controls.c_cfl = require_number(c["c_cfl"], "controls.c_cfl");
    if (c.contains("error_norm_s"))
      cfg.controls.error_norm_s = require_number(c["error_norm_s"], "controls.error_norm_s");
    if (c.contains("contamination_threshold"))
      cfg.controls.contamination_threshold =
          require_number(c["contamination_threshold"], "controls.contamination_threshold");
    if (!(cfg.controls.rk_tol > 0.0)) bad_key("controls.rk_tol", "tolerance must be positive");
    if (!(cfg.controls.c_cfl > 0.0)) bad_key("controls.c_cfl", "CFL factor must be positive");
    if (cfg.controls.error_norm_s < 0.0 || cfg.controls.error_norm_s > 3.0)
      bad_key("controls.error_norm_s", "order must lie in [0, 3]");
  }

  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer()) bad_key("seed", "expected an integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }

  if (root.contains("sweep")) {
    const json& sw = root["sweep"];
    if (!sw.is_object()) bad_key("sweep", "expected an object");
    const json& list = require_key(sw, "sweep", "mu_plus_list");
    if (!list.is_array()) bad_key("sweep.mu_plus_list", "expected an array of numbers");
    if (list.empty()) bad_key("sweep.mu_plus_list", "list must not be empty");
    for (const auto& v : list) {
      const double m = require_number(v, "sweep.mu_plus_list");
      if (!(m > 0.0)) bad_key("sweep.mu_plus_list", "entries must be positive");
      cfg.mu_plus_list.push_back(m);
    }
  }

  if (root.contains("points")) {
    const json& pts = root["points"];
    if (!pts.is_array()) bad_key("points", "expected an array of [x1, x2] pairs");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string base = "points[" + std::to_string(i) + "]";
      if (!pts[i].is_array() || pts[i].size() != 2) bad_key(base, "expected an [x1, x2] pair");
      cfg.points.push_back({require_number(pts[i][0], base), require_number(pts[i][1], base)});
    }
  }

  return cfg;
}

GridFunction materialize_profile(const RunConfig& cfg) {
  Grid g = make_grid(cfg.L, cfg.N);
  GridFunction f = zero_function(g);
  const ProfileSpec& p = cfg.profile;
  if (p.family == "flat") {
    return f;
  }
  if (p.family == "gaussian") {
    for (int j = 0; j < g.N; ++j) {
      const double xi = g.node(j) / p.width;
      f.values[j] = p.amplitude * std::exp(-xi * xi);
    }
    return f;
  }
  if (p.family == "bump_sum") {
    for (int j = 0; j < g.N; ++j) {
      double acc = 0.0;
      for (const BumpSpec& b : p.bumps) {
        const double xi = (g.node(j) - b.center) / b.width;
        acc += b.amplitude * std::exp(-xi * xi);
      }
      f.values[j] = acc;
    }
    return f;
  }
  if (p.family == "file") {
    std::ifstream in(p.path);
    if (!in) throw ConfigError("config error at key 'profile.path': cannot open '" + p.path + "'");
    std::vector<double> vals;
    double x;
    while (in >> x) vals.push_back(x);
    if (static_cast<int>(vals.size()) != g.N)
      throw ConfigError("config error at key 'profile.path': expected " + std::to_string(g.N) +
                        " samples, found " + std::to_string(vals.size()));
    for (int j = 0; j < g.N; ++j) f.values[j] = vals[j];
    return f;
  }
  throw ConfigError("config error at key 'profile.family': unknown family '" + p.family + "'");
}

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trajectory_csv(const std::string& path, const std::vector<SimulationState>& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  if (traj.empty()) return;
  const int N = traj.front().f.grid.N;
  out << "t";
  for (int j = 0; j < N; ++j) out << ",f_" << j;
  out << "\n";
  for (const auto& st : traj) {
    out << format_full(st.t);
    for (int j = 0; j < N; ++j) out << "," << format_full(st.f.values[j]);
    out << "\n";
  }
}

}  // namespace capstokes
