#pragma once

#include "capstokes/grid.hpp"
#include "capstokes/kernels.hpp"

namespace capstokes {

// Derived interface quantities: omega = (1 + f'^2)^(1/2), normal
// nu = (-f', 1)/omega, tangent tau = (1, f')/omega, curvature pullback
// kappa = f''/omega^3, and g = (1/omega - 1, f'/omega).
struct InterfaceGeometry {
  GridFunction f;
  GridFunction fprime;
  GridFunction fsecond;
  GridFunction omega;
  DensityPair nu;
  DensityPair tau;
  GridFunction kappa;
  DensityPair g;
};

InterfaceGeometry geometry_of(const GridFunction& f);

// Shared assembly of the B^0_{n,m}(f) matrices all named operators reduce to.
// The m = 2 family drives D, Dstar, T1, T2, V; the m = 1 family drives the
// pressure-trace operators B1, B2 and is assembled only on request.
struct OperatorSet {
  Grid grid;
  InterfaceGeometry geo;
  Eigen::MatrixXd B02, B12, B22, B32;
  Eigen::MatrixXd B01, B11;
  bool has_m1 = false;
};

OperatorSet make_operator_set(const GridFunction& f, bool with_m1 = false);

// Matrix-free applications (combinations of the stored B matrices).
void apply_D(const OperatorSet& S, const Vec& b1, const Vec& b2, Vec& o1, Vec& o2);
void apply_Dstar(const OperatorSet& S, const Vec& b1, const Vec& b2, Vec& o1, Vec& o2);
void apply_T1(const OperatorSet& S, const Vec& b1, const Vec& b2, Vec& o1, Vec& o2);
void apply_T2(const OperatorSet& S, const Vec& b1, const Vec& b2, Vec& o1, Vec& o2);
void apply_V(const OperatorSet& S, const Vec& b1, const Vec& b2, Vec& o1, Vec& o2);
Vec apply_B1(const OperatorSet& S, const Vec& theta);
Vec apply_B2(const OperatorSet& S, const Vec& theta);

// Dense 2N x 2N matrices for the solver and spectral diagnostics.
Eigen::MatrixXd dense_D(const OperatorSet& S);
Eigen::MatrixXd dense_Dstar(const OperatorSet& S);

// Named operators as explicit block matrices.
BlockOperator assemble_D(const GridFunction& f);
BlockOperator assemble_Dstar(const GridFunction& f);
BlockOperator assemble_V(const GridFunction& f);

struct TraceOperators {
  BlockOperator T1;
  BlockOperator T2;
  OperatorMatrix B1;
  OperatorMatrix B2;
};
TraceOperators assemble_T1T2B1B2(const GridFunction& f);

enum class Side { plus, minus };

// Boundary traces of the single-layer gradient and pressure (mu = 1):
//   gradu[i][j] = (T_j[beta])_i -+ (beta . tau)/(2 omega) tau_i nu_j
//   Pi = ((+-1 + B1)[beta . nu / omega] + B2[beta . tau / omega]) / 2
struct TildeTraces {
  GridFunction gradu[2][2];
  GridFunction Pi;
};

TildeTraces tilde_traces(const GridFunction& f, const DensityPair& beta, Side side);
TildeTraces tilde_traces(const OperatorSet& S, const DensityPair& beta, Side side);

}  // namespace capstokes
