#pragma once

#include <utility>

#include "capstokes/grid.hpp"
#include "capstokes/potentials.hpp"

namespace capstokes {

struct SolverReport {
  double residual_norm = 0.0;
  double condition_estimate = 0.0;
  double smallest_singular_value = 0.0;
  double elapsed_seconds = 0.0;
};

enum class WhichOperator { D, Dstar };

// Solves (lambda*Id + a*D(f)) beta = rhs by dense LU with one step of
// iterative refinement. Throws "near-singular operator" when the condition
// estimate exceeds 1e12. compute_spectrum controls whether the report's
// smallest singular value is estimated (skipped on hot paths).
std::pair<DensityPair, SolverReport> solve_density(const GridFunction& f, double lambda,
                                                   double a, const DensityPair& rhs,
                                                   bool compute_spectrum = true);

// Same solve on a prebuilt operator set (shares the B-matrix assembly).
std::pair<DensityPair, SolverReport> solve_density(const OperatorSet& S, double lambda,
                                                   double a, const DensityPair& rhs,
                                                   bool compute_spectrum = true);

// Smallest singular value and condition estimate of (lambda*Id - op).
// use_svd selects the dense SVD cross-check path (intended for N <= 1024);
// the default is LU-based inverse power iteration on the normal equations.
SolverReport invertibility_diagnostics(const GridFunction& f, double lambda,
                                       WhichOperator which, bool use_svd = false);

// Inverse-power estimate of sigma_min for an already-factored matrix; exposed
// for reuse and for the SVD cross-check test.
double smallest_singular_value_lu(const Eigen::MatrixXd& A);
double smallest_singular_value_svd(const Eigen::MatrixXd& A);

}  // namespace capstokes
