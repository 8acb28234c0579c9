#pragma once

#include <Eigen/Core>

#include "capstokes/grid.hpp"
#include "capstokes/potentials.hpp"

namespace capstokes {

struct BulkPoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct FieldSample {
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  double pressure = 0.0;
};

struct FundamentalSample {
  Eigen::Vector2d U = Eigen::Vector2d::Zero();
  double P = 0.0;
};

// Stokeslet pair: U^k_j(y) = -(1/4 pi mu)(delta_jk ln(1/|y|) + y_j y_k / |y|^2),
// P^k(y) = -(1/2 pi) y_k / |y|^2. k selects the column (1 or 2).
FundamentalSample fundamental_solution(int k, const Eigen::Vector2d& y, double mu);

// Single-layer representation off the interface:
//   v(x) = -int [d1 U^k + f'(s) d2 U^k](x - (s, f(s))) beta_k(s) ds
//   p(x) = -int P^k(x - (s, f(s))) beta_k'(s) ds
// by the trapezoid rule on the grid. Points within one grid spacing of the
// interface nodes are rejected.
FieldSample stokes_solution(const GridFunction& f, const DensityPair& beta,
                            const BulkPoint& x, double mu);

// max(|mu lap v - grad p|_2, |div v|) by centered finite differences.
double interior_stokes_residual(const GridFunction& f, const DensityPair& beta,
                                const BulkPoint& x, double mu, double fd_step = 1e-3);

// Boundary traces of the physical fields by the closed formulas; the fourth
// gradient entry is d2v2 = -d1v1.
struct TraceFormulas {
  DensityPair v_trace;
  GridFunction p_trace;
  GridFunction d1v1;
  GridFunction d2v1;
  GridFunction d1v2;
};

TraceFormulas trace_formulas(const GridFunction& f, const DensityPair& beta, double mu);

// Stress times normal on the interface, (-p Id + mu (grad v + grad v^T)) nu,
// evaluated from the trace formulas.
DensityPair traction_trace(const TraceFormulas& tr, const InterfaceGeometry& geo, double mu);

}  // namespace capstokes
