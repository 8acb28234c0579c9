#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "capstokes/grid.hpp"
#include "capstokes/solver.hpp"

namespace capstokes {

struct PhysicalParams {
  double mu = 1.0;       // viscosity below the graph
  double mu_plus = 0.0;  // viscosity above the graph; 0 selects the one-phase problem
  double sigma = 1.0;    // surface tension coefficient

  double viscosity_contrast() const { return (mu_plus - mu) / (mu_plus + mu); }
};

struct Controls {
  double rk_tol = 1e-8;
  double c_cfl = 0.5;
  double error_norm_s = 1.75;
  double contamination_threshold = 0.05;
  std::vector<double> output_times;  // empty: only the final time is recorded
};

struct Diagnostics {
  std::vector<std::pair<double, double>> norm_trail;  // (t, H^1.75 norm of f)
  double contamination = 0.0;  // max |f| on the outer 10% of nodes, relative to max |f|
  long solver_calls = 0;
  double max_solver_residual = 0.0;
  long steps_accepted = 0;
  long steps_rejected = 0;
  double last_error_estimate = 0.0;
  double last_dt = 0.0;
};

struct SimulationState {
  double t = 0.0;
  GridFunction f;
  PhysicalParams params;
  Controls controls;
  Diagnostics diagnostics;
};

// Right-hand side of the interface motion: normal velocity of the graph,
//   dphi = sigma/(mu_plus + mu) * gamma . (-f', 1),
// where gamma solves (1/2 + a D(f)) gamma = V(f)[g(f)] and a is the viscosity
// contrast. Equal viscosities need no solve (gamma = 2 V g); mu_plus = 0 is
// the one-phase evolution sigma/mu * V[beta] . (-f', 1) with (1/2 + D) beta = g.
GridFunction phi(const PhysicalParams& params, const GridFunction& f);
GridFunction phi(const PhysicalParams& params, const GridFunction& f, SolverReport* report);

SimulationState make_state(const GridFunction& f0, const PhysicalParams& params,
                           const Controls& controls);

// One adaptive embedded Runge-Kutta step (Dormand-Prince 5(4)); the error
// proxy is the H^1.75 norm of the difference of the two orders. dt is capped
// by dt_max and by the stability bound c_cfl * h * (mu_plus + mu) / sigma.
void step(SimulationState& state, double dt_max);

// March to time T, recording the state at each requested output time (the
// initial state is always first, the final one last).
std::vector<SimulationState> simulate(const GridFunction& f0, const PhysicalParams& params,
                                      double T, const Controls& controls);

struct RateRun {
  double mu_plus = 0.0;
  double error_high = 0.0;  // max_t H^1.75 distance of the interfaces
  double error_low = 0.0;   // max_t H^0.75 distance of the velocities
  double total() const { return error_high + error_low; }
};

struct RateReport {
  std::vector<RateRun> runs;
  double slope = 0.0;  // least-squares slope of log total error vs log mu_plus
};

// Compare two-phase trajectories against the one-phase limit for each entry
// of mu_plus_list and fit the convergence rate.
RateReport mu_sweep(const GridFunction& f0, double mu, double sigma, double T,
                    const std::vector<double>& mu_plus_list, const Controls& controls);

}  // namespace capstokes
