#include "capstokes/solver.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace capstokes {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec stack(const DensityPair& p) {
  const int N = p.first.grid.N;
  Vec v(2 * N);
  v.head(N) = p.first.values;
  v.tail(N) = p.second.values;
  return v;
}

DensityPair unstack(const Grid& g, const Vec& v) {
  return density_pair(grid_function(g, v.head(g.N)), grid_function(g, v.tail(g.N)));
}

}  // namespace

double smallest_singular_value_lu(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  // Inverse power iteration on (A^T A)^{-1}; deterministic generic start.
  Vec z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = 1.0 + 0.5 * std::sin(1.0 + i);
  z.normalize();
  double lambda_prev = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vec w = lu.transpose().solve(z);
    Vec y = lu.solve(w);
    const double lambda = y.norm();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) return 0.0;
    z = y / lambda;
    if (it > 3 && std::abs(lambda - lambda_prev) <= 1e-11 * lambda) {
      lambda_prev = lambda;
      break;
    }
    lambda_prev = lambda;
  }
  return 1.0 / std::sqrt(lambda_prev);
}

double smallest_singular_value_svd(const Eigen::MatrixXd& A) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues().tail(1)(0);
}

std::pair<DensityPair, SolverReport> solve_density(const OperatorSet& S, double lambda,
                                                   double a, const DensityPair& rhs,
                                                   bool compute_spectrum) {
  require_same_grid(S.grid, rhs.first.grid);
  const auto t0 = Clock::now();
  SolverReport rep;

  if (a == 0.0) {
    if (lambda == 0.0) throw std::invalid_argument("solve_density: zero operator");
    DensityPair beta = density_pair(
        grid_function(S.grid, rhs.first.values / lambda),
        grid_function(S.grid, rhs.second.values / lambda));
    rep.residual_norm = 0.0;
    rep.condition_estimate = 1.0;
    rep.smallest_singular_value = std::abs(lambda);
    rep.elapsed_seconds = seconds_since(t0);
    return {std::move(beta), rep};
  }

  const int n = 2 * S.grid.N;
  Eigen::MatrixXd A = a * dense_D(S);
  A.diagonal().array() += lambda;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rcond = lu.rcond();
  rep.condition_estimate = (rcond > 0.0) ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(rep.condition_estimate < 1e12)) {
    std::ostringstream msg;
    msg << "near-singular operator: condition estimate " << rep.condition_estimate;
    throw std::runtime_error(msg.str());
  }

  const Vec b = stack(rhs);
  Vec x = lu.solve(b);
  Vec r = b;
  r.noalias() -= A * x;
  x += lu.solve(r);
  r = b;
  r.noalias() -= A * x;
  rep.residual_norm = r.norm();
  rep.smallest_singular_value =
      compute_spectrum ? smallest_singular_value_lu(A) : std::numeric_limits<double>::quiet_NaN();
  rep.elapsed_seconds = seconds_since(t0);
  (void)n;
  return {unstack(S.grid, x), rep};
}

std::pair<DensityPair, SolverReport> solve_density(const GridFunction& f, double lambda,
                                                   double a, const DensityPair& rhs,
                                                   bool compute_spectrum) {
  if (a == 0.0) {
    // No operator needed; scalar scaling path.
    OperatorSet S;
    S.grid = f.grid;
    return solve_density(S, lambda, a, rhs, compute_spectrum);
  }
  OperatorSet S = make_operator_set(f);
  return solve_density(S, lambda, a, rhs, compute_spectrum);
}

SolverReport invertibility_diagnostics(const GridFunction& f, double lambda,
                                       WhichOperator which, bool use_svd) {
  const auto t0 = Clock::now();
  OperatorSet S = make_operator_set(f);
  Eigen::MatrixXd A = (which == WhichOperator::D) ? dense_D(S) : dense_Dstar(S);
  A *= -1.0;
  A.diagonal().array() += lambda;

  SolverReport rep;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rcond = lu.rcond();
  rep.condition_estimate = (rcond > 0.0) ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  rep.residual_norm = 0.0;
  rep.smallest_singular_value =
      use_svd ? smallest_singular_value_svd(A) : smallest_singular_value_lu(A);
  rep.elapsed_seconds = seconds_since(t0);
  return rep;
}

}  // namespace capstokes
