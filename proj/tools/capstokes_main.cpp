#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "capstokes/config.hpp"
#include "capstokes/evolution.hpp"
#include "capstokes/fields.hpp"
#include "capstokes/solver.hpp"
#include "capstokes/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace capstokes;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_error_json(const fs::path& outdir, const std::string& command, const std::string& what) {
  ordered_json j;
  j["command"] = command;
  j["error"] = what;
  std::error_code ec;
  fs::create_directories(outdir, ec);
  std::ofstream out(outdir / "error.json");
  if (out) out << j.dump(2) << "\n";
}

ordered_json summarize(const std::vector<SimulationState>& traj) {
  const SimulationState& last = traj.back();
  ordered_json j;
  j["grid"] = {{"L", last.f.grid.L}, {"N", last.f.grid.N}};
  j["physics"] = {{"mu", last.params.mu}, {"mu_plus", last.params.mu_plus}, {"sigma", last.params.sigma}};
  j["final_time"] = last.t;
  ordered_json trail = ordered_json::array();
  for (const auto& [t, n] : last.diagnostics.norm_trail) trail.push_back({t, n});
  j["norm_trail"] = trail;
  j["contamination"] = last.diagnostics.contamination;
  j["solver_calls"] = last.diagnostics.solver_calls;
  j["max_solver_residual"] = last.diagnostics.max_solver_residual;
  j["steps_accepted"] = last.diagnostics.steps_accepted;
  j["steps_rejected"] = last.diagnostics.steps_rejected;
  return j;
}

int cmd_simulate(const std::string& config_path, const fs::path& outdir, bool quiet) {
  RunConfig cfg = load_config(config_path);
  if (!cfg.has_time) throw ConfigError("config error at key 'time.T': missing required key");
  const GridFunction f0 = materialize_profile(cfg);
  std::vector<SimulationState> traj;
  try {
    traj = simulate(f0, cfg.params, cfg.T, cfg.controls);
  } catch (const std::exception& e) {
    write_error_json(outdir, "simulate", e.what());
    std::cerr << "simulate failed: " << e.what() << "\n";
    return 1;
  }
  fs::create_directories(outdir);
  write_trajectory_csv((outdir / "trajectory.csv").string(), traj);
  write_text(outdir / "summary.json", summarize(traj).dump(2) + "\n");
  if (!quiet) {
    for (const auto& st : traj) {
      std::printf("t = %s: H^1.75 norm = %s\n", format_full(st.t).c_str(),
                  format_full(sobolev_norm(st.f, 1.75)).c_str());
    }
  }
  return 0;
}

ordered_json report_to_json(const IdentityReport& r) {
  ordered_json j;
  j["identity"] = r.identity_id;
  j["residual_l2"] = r.residual_l2;
  j["reference_norm"] = r.reference_norm;
  j["relative"] = r.relative();
  j["grid"] = {{"L", r.grid_L}, {"N", r.grid_N}};
  if (r.refinement_order) j["refinement_order"] = *r.refinement_order;
  return j;
}

int cmd_verify(const std::string& suite, const fs::path& outdir, bool quiet) {
  SuiteResult res;
  try {
    res = run_suite(suite);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  ordered_json j;
  j["suite"] = res.name;
  j["passed"] = res.passed;
  ordered_json reports = ordered_json::array();
  for (const auto& r : res.reports) reports.push_back(report_to_json(r));
  j["reports"] = reports;
  j["notes"] = res.notes;
  fs::create_directories(outdir);
  write_text(outdir / "verify_report.json", j.dump(2) + "\n");
  if (!quiet) {
    for (const auto& n : res.notes) std::printf("%s\n", n.c_str());
    std::printf("suite %s: %s\n", res.name.c_str(), res.passed ? "all bounds met" : "BOUND VIOLATED");
  }
  return res.passed ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const fs::path& outdir, bool quiet) {
  RunConfig cfg = load_config(config_path);
  if (!cfg.has_time) throw ConfigError("config error at key 'time.T': missing required key");
  if (cfg.mu_plus_list.empty())
    throw ConfigError("config error at key 'sweep.mu_plus_list': missing required key");
  const GridFunction f0 = materialize_profile(cfg);
  RateReport report;
  std::vector<std::vector<SimulationState>> trajs;
  try {
    report = mu_sweep(f0, cfg.params.mu, cfg.params.sigma, cfg.T, cfg.mu_plus_list, cfg.controls);
    // Reproduce the per-run trajectories for the CSV export.
    Controls C = cfg.controls;
    if (C.output_times.empty())
      for (int i = 1; i <= 8; ++i) C.output_times.push_back(cfg.T * i / 8.0);
    trajs.push_back(simulate(f0, {cfg.params.mu, 0.0, cfg.params.sigma}, cfg.T, C));
    for (double mp : cfg.mu_plus_list)
      trajs.push_back(simulate(f0, {cfg.params.mu, mp, cfg.params.sigma}, cfg.T, C));
  } catch (const std::exception& e) {
    write_error_json(outdir, "sweep", e.what());
    std::cerr << "sweep failed: " << e.what() << "\n";
    return 1;
  }
  fs::create_directories(outdir);
  {
    char name[64];
    std::snprintf(name, sizeof(name), "run_mu_%g.csv", 0.0);
    write_trajectory_csv((outdir / name).string(), trajs[0]);
    for (std::size_t i = 0; i < cfg.mu_plus_list.size(); ++i) {
      std::snprintf(name, sizeof(name), "run_mu_%g.csv", cfg.mu_plus_list[i]);
      write_trajectory_csv((outdir / name).string(), trajs[i + 1]);
    }
  }
  ordered_json j;
  j["mu"] = cfg.params.mu;
  j["sigma"] = cfg.params.sigma;
  j["T"] = cfg.T;
  ordered_json runs = ordered_json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"mu_plus", r.mu_plus},
                    {"error_high", r.error_high},
                    {"error_low", r.error_low},
                    {"total", r.total()}});
  }
  j["runs"] = runs;
  j["slope"] = report.slope;
  write_text(outdir / "rate_report.json", j.dump(2) + "\n");
  if (!quiet) std::printf("fitted slope: %s\n", format_full(report.slope).c_str());
  return 0;
}

int cmd_fields(const std::string& config_path, const fs::path& outdir, bool quiet) {
  RunConfig cfg = load_config(config_path);
  if (cfg.points.empty()) throw ConfigError("config error at key 'points': missing required key");
  const GridFunction f0 = materialize_profile(cfg);
  fs::create_directories(outdir);

  DensityPair beta = zero_pair(f0.grid);
  try {
    // Layer density of the quasistationary solution at t = 0: the interface
    // equation scaled by the surface tension coefficient.
    const InterfaceGeometry geo = geometry_of(f0);
    DensityPair rhs = geo.g;
    rhs.first.values *= cfg.params.sigma;
    rhs.second.values *= cfg.params.sigma;
    auto [b, rep] = solve_density(f0, 0.5, 1.0, rhs, /*compute_spectrum=*/false);
    beta = b;
  } catch (const std::exception& e) {
    write_error_json(outdir, "fields", e.what());
    std::cerr << "fields failed: " << e.what() << "\n";
    return 1;
  }

  std::ofstream out(outdir / "fields.csv");
  if (!out) throw std::runtime_error("cannot write fields.csv");
  out << "x1,x2,v1,v2,p,residual,status\n";
  int rejected = 0;
  for (const auto& [x1, x2] : cfg.points) {
    try {
      const FieldSample s = stokes_solution(f0, beta, {x1, x2}, cfg.params.mu);
      const double res = interior_stokes_residual(f0, beta, {x1, x2}, cfg.params.mu);
      out << format_full(x1) << "," << format_full(x2) << "," << format_full(s.velocity[0]) << ","
          << format_full(s.velocity[1]) << "," << format_full(s.pressure) << ","
          << format_full(res) << ",ok\n";
    } catch (const std::runtime_error&) {
      out << format_full(x1) << "," << format_full(x2) << ",,,,,rejected-near-boundary\n";
      ++rejected;
    }
  }
  if (!quiet)
    std::printf("sampled %zu points (%d rejected near the boundary)\n", cfg.points.size(), rejected);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-integral simulator for capillarity-driven Stokes flow over a graph interface"};
  app.require_subcommand(1);

  std::string config_path;
  std::string outdir = ".";
  std::string suite = "all";
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");
  app.add_option("--out", outdir, "output directory (default: current)");

  CLI::App* sim = app.add_subcommand("simulate", "run the interface evolution");
  sim->add_option("--config", config_path, "JSON run configuration")->required();
  CLI::App* ver = app.add_subcommand("verify", "run an identity-residual suite");
  ver->add_option("--suite", suite, "all|comder|anticommute|rellich|fder|ffff|geometry");
  CLI::App* swp = app.add_subcommand("sweep", "two-phase to one-phase viscosity sweep");
  swp->add_option("--config", config_path, "JSON sweep configuration")->required();
  CLI::App* fld = app.add_subcommand("fields", "sample bulk velocity and pressure");
  fld->add_option("--config", config_path, "JSON fields configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, outdir, quiet);
    if (ver->parsed()) return cmd_verify(suite, outdir, quiet);
    if (swp->parsed()) return cmd_sweep(config_path, outdir, quiet);
    if (fld->parsed()) return cmd_fields(config_path, outdir, quiet);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
