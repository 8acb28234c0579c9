#include "capstokes/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "capstokes/potentials.hpp"

namespace capstokes {

namespace {

void validate_params(const PhysicalParams& p) {
  if (!(p.mu > 0.0)) throw std::invalid_argument("evolution: viscosity mu must be positive");
  if (!(p.mu_plus >= 0.0)) throw std::invalid_argument("evolution: viscosity mu_plus must be nonnegative");
  if (!(p.sigma > 0.0)) throw std::invalid_argument("evolution: surface tension sigma must be positive");
}

GridFunction phi_impl(const PhysicalParams& params, const GridFunction& f,
                      SolverReport* report, bool* did_solve) {
  validate_params(params);
  OperatorSet S = make_operator_set(f);
  const Grid& g = f.grid;

  Vec vg1, vg2;
  apply_V(S, S.geo.g.first.values, S.geo.g.second.values, vg1, vg2);

  Vec gamma1, gamma2;
  if (params.mu_plus == params.mu) {
    // Zero viscosity contrast: the layer equation is (1/2) gamma = V g.
    gamma1 = 2.0 * vg1;
    gamma2 = 2.0 * vg2;
    if (did_solve) *did_solve = false;
  } else {
    const double a = params.viscosity_contrast();
    DensityPair rhs = zero_pair(g);
    rhs.first.values = vg1;
    rhs.second.values = vg2;
    auto [gamma, rep] = solve_density(S, 0.5, a, rhs, /*compute_spectrum=*/false);
    gamma1 = gamma.first.values;
    gamma2 = gamma.second.values;
    if (report) *report = rep;
    if (did_solve) *did_solve = true;
  }

  GridFunction out = zero_function(g);
  const double scale = params.sigma / (params.mu_plus + params.mu);
  out.values = scale * (-S.geo.fprime.values.array() * gamma1.array() + gamma2.array()).matrix();
  return out;
}

double relative_contamination(const GridFunction& f) {
  const int N = f.grid.N;
  const int edge = std::max(1, N / 20);  // 10% of the nodes, split across both ends
  double outer = 0.0;
  for (int j = 0; j < edge; ++j) {
    outer = std::max(outer, std::abs(f.values[j]));
    outer = std::max(outer, std::abs(f.values[N - 1 - j]));
  }
  const double peak = f.values.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  return outer / peak;
}

}  // namespace

GridFunction phi(const PhysicalParams& params, const GridFunction& f) {
  return phi_impl(params, f, nullptr, nullptr);
}

GridFunction phi(const PhysicalParams& params, const GridFunction& f, SolverReport* report) {
  return phi_impl(params, f, report, nullptr);
}

SimulationState make_state(const GridFunction& f0, const PhysicalParams& params,
                           const Controls& controls) {
  validate_params(params);
  if (!f0.values.allFinite()) throw std::invalid_argument("evolution: initial profile has non-finite entries");
  if (!(controls.rk_tol > 0.0)) throw std::invalid_argument("evolution: rk_tol must be positive");
  if (!(controls.c_cfl > 0.0)) throw std::invalid_argument("evolution: c_cfl must be positive");
  SimulationState st;
  st.t = 0.0;
  st.f = f0;
  st.params = params;
  st.controls = controls;
  st.diagnostics.norm_trail.push_back({0.0, sobolev_norm(f0, 1.75)});
  st.diagnostics.contamination = relative_contamination(f0);
  return st;
}

void step(SimulationState& st, double dt_max) {
  if (!(dt_max > 0.0)) throw std::invalid_argument("step: dt_max must be positive");
  const Grid& g = st.f.grid;
  const PhysicalParams& P = st.params;
  const Controls& C = st.controls;
  const bool needs_solve = (P.mu_plus != P.mu);

  const double cfl_cap = C.c_cfl * g.h * (P.mu_plus + P.mu) / P.sigma;
  double dt = std::min(dt_max, cfl_cap);

  auto rhs = [&](const Vec& y) {
    GridFunction yf = st.f;
    yf.values = y;
    SolverReport rep;
    GridFunction r = phi_impl(P, yf, &rep, nullptr);
    if (needs_solve) {
      st.diagnostics.solver_calls += 1;
      st.diagnostics.max_solver_residual = std::max(st.diagnostics.max_solver_residual, rep.residual_norm);
    }
    return r.values;
  };

  // Dormand-Prince 5(4) tableau.
  const Vec k1 = rhs(st.f.values);
  Vec y5;
  double err = 0.0;
  while (true) {
    const Vec k2 = rhs(st.f.values + dt * (1.0 / 5.0) * k1);
    const Vec k3 = rhs(st.f.values + dt * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2));
    const Vec k4 = rhs(st.f.values + dt * ((44.0 / 45.0) * k1 - (56.0 / 15.0) * k2 + (32.0 / 9.0) * k3));
    const Vec k5 = rhs(st.f.values + dt * ((19372.0 / 6561.0) * k1 - (25360.0 / 2187.0) * k2 +
                                           (64448.0 / 6561.0) * k3 - (212.0 / 729.0) * k4));
    const Vec k6 = rhs(st.f.values + dt * ((9017.0 / 3168.0) * k1 - (355.0 / 33.0) * k2 +
                                           (46732.0 / 5247.0) * k3 + (49.0 / 176.0) * k4 -
                                           (5103.0 / 18656.0) * k5));
    y5 = st.f.values + dt * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 -
                             (2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6);
    const Vec k7 = rhs(y5);

    GridFunction errf = zero_function(g);
    errf.values = dt * ((71.0 / 57600.0) * k1 - (71.0 / 16695.0) * k3 + (71.0 / 1920.0) * k4 -
                        (17253.0 / 339200.0) * k5 + (22.0 / 525.0) * k6 - (1.0 / 40.0) * k7);
    err = sobolev_norm(errf, C.error_norm_s);
    st.diagnostics.last_error_estimate = err;
    if (err <= C.rk_tol) break;

    st.diagnostics.steps_rejected += 1;
    const double factor = std::clamp(0.9 * std::pow(C.rk_tol / err, 0.2), 0.2, 5.0);
    dt *= factor;
    if (dt < 1e-12) {
      std::ostringstream msg;
      msg << "stiffness/blow-up suspected: step size underflow (dt = " << dt << ") at t = " << st.t;
      throw std::runtime_error(msg.str());
    }
  }

  st.f.values = y5;
  st.t += dt;
  st.diagnostics.steps_accepted += 1;
  st.diagnostics.last_dt = dt;
  st.diagnostics.norm_trail.push_back({st.t, sobolev_norm(st.f, 1.75)});
  st.diagnostics.contamination = relative_contamination(st.f);
  if (st.diagnostics.contamination > C.contamination_threshold) {
    std::ostringstream msg;
    msg << "boundary contamination " << st.diagnostics.contamination
        << " exceeds threshold " << C.contamination_threshold << " at t = " << st.t
        << "; enlarge the domain half-length";
    throw std::runtime_error(msg.str());
  }
}

std::vector<SimulationState> simulate(const GridFunction& f0, const PhysicalParams& params,
                                      double T, const Controls& controls) {
  if (!(T >= 0.0)) throw std::invalid_argument("simulate: final time must be nonnegative");
  std::vector<SimulationState> out;
  SimulationState st = make_state(f0, params, controls);
  out.push_back(st);
  if (T == 0.0) return out;

  std::vector<double> targets;
  for (double t : controls.output_times) {
    if (t > 0.0 && t < T) targets.push_back(t);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  targets.push_back(T);

  for (double target : targets) {
    while (st.t < target - 1e-12) {
      step(st, target - st.t);
    }
    st.t = target;
    out.push_back(st);
  }
  return out;
}

RateReport mu_sweep(const GridFunction& f0, double mu, double sigma, double T,
                    const std::vector<double>& mu_plus_list, const Controls& controls) {
  if (mu_plus_list.empty()) throw std::invalid_argument("mu_sweep: mu_plus_list must not be empty");
  for (double m : mu_plus_list) {
    if (!(m > 0.0)) throw std::invalid_argument("mu_sweep: mu_plus entries must be positive");
  }
  if (!(T > 0.0)) throw std::invalid_argument("mu_sweep: final time must be positive");

  Controls C = controls;
  if (C.output_times.empty()) {
    for (int i = 1; i <= 8; ++i) C.output_times.push_back(T * i / 8.0);
  }

  PhysicalParams base{mu, 0.0, sigma};
  const std::vector<SimulationState> traj0 = simulate(f0, base, T, C);
  std::vector<GridFunction> phi0;
  phi0.reserve(traj0.size());
  for (const auto& s : traj0) phi0.push_back(phi(base, s.f));

  RateReport report;
  for (double mp : mu_plus_list) {
    PhysicalParams two{mu, mp, sigma};
    const std::vector<SimulationState> traj = simulate(f0, two, T, C);
    if (traj.size() != traj0.size()) throw std::runtime_error("mu_sweep: trajectory length mismatch");
    RateRun run;
    run.mu_plus = mp;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      GridFunction df = traj[i].f;
      df.values -= traj0[i].f.values;
      run.error_high = std::max(run.error_high, sobolev_norm(df, 1.75));
      GridFunction dphi = phi(two, traj[i].f);
      dphi.values -= phi0[i].values;
      run.error_low = std::max(run.error_low, sobolev_norm(dphi, 0.75));
    }
    report.runs.push_back(run);
  }

  // Least-squares slope of log total error against log mu_plus.
  const int n = static_cast<int>(report.runs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& r : report.runs) {
    const double x = std::log(r.mu_plus);
    const double y = std::log(std::max(r.total(), 1e-300));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  report.slope = (denom != 0.0) ? (n * sxy - sx * sy) / denom : 0.0;
  return report;
}

}  // namespace capstokes
