#include "capstokes/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace capstokes {

InterfaceGeometry geometry_of(const GridFunction& f) {
  const Grid& g = f.grid;
  const int N = g.N;
  const Vec xi = g.nodes();

  // Split off the linear trend through the end nodes so the spectral
  // derivative sees a seam-continuous residual; exact for affine profiles,
  // negligible for decaying ones.
  const double slope = (f.values[N - 1] - f.values[0]) / ((N - 1) * g.h);
  GridFunction resid{g, f.values - slope * xi};
  Vec fp = derivative(resid, 1).values;
  fp.array() += slope;
  Vec fpp = derivative(resid, 2).values;

  Vec omega = (1.0 + fp.array().square()).sqrt();
  Vec nu1 = -fp.array() / omega.array();
  Vec nu2 = omega.cwiseInverse();
  Vec tau1 = omega.cwiseInverse();
  Vec tau2 = fp.array() / omega.array();
  Vec kappa = fpp.array() / omega.array().cube();
  Vec g1 = omega.cwiseInverse().array() - 1.0;
  Vec g2 = fp.array() / omega.array();

  InterfaceGeometry geo{
      f,
      GridFunction{g, std::move(fp)},
      GridFunction{g, std::move(fpp)},
      GridFunction{g, std::move(omega)},
      density_pair(GridFunction{g, std::move(nu1)}, GridFunction{g, std::move(nu2)}),
      density_pair(GridFunction{g, std::move(tau1)}, GridFunction{g, std::move(tau2)}),
      GridFunction{g, std::move(kappa)},
      density_pair(GridFunction{g, std::move(g1)}, GridFunction{g, std::move(g2)})};
  return geo;
}

OperatorSet make_operator_set(const GridFunction& f, bool with_m1) {
  OperatorSet S;
  S.grid = f.grid;
  S.geo = geometry_of(f);
  S.B02 = assemble_Bnm0(f, 0, 2).entries;
  S.B12 = assemble_Bnm0(f, 1, 2).entries;
  S.B22 = assemble_Bnm0(f, 2, 2).entries;
  S.B32 = assemble_Bnm0(f, 3, 2).entries;
  if (with_m1) {
    S.B01 = assemble_Bnm0(f, 0, 1).entries;
    S.B11 = assemble_Bnm0(f, 1, 1).entries;
    S.has_m1 = true;
  }
  return S;
}

void apply_D(const OperatorSet& S, const Vec& b1, const Vec& b2, Vec& o1, Vec& o2) {
  const Vec& fp = S.geo.fprime.values;
  const Vec c1 = fp.cwiseProduct(b1);
  const Vec c2 = fp.cwiseProduct(b2);
  o1.noalias() = S.B02 * c1;
  o1.noalias() += S.B12 * c2;
  o1.noalias() -= S.B12 * b1;
  o1.noalias() -= S.B22 * b2;
  o2.noalias() = S.B12 * c1;
  o2.noalias() += S.B22 * c2;
  o2.noalias() -= S.B22 * b1;
  o2.noalias() -= S.B32 * b2;
}

void apply_Dstar(const OperatorSet& S, const Vec& b1, const Vec& b2, Vec& o1, Vec& o2) {
  const Vec& fp = S.geo.fprime.values;
  Vec m1 = S.B02 * b1;
  m1.noalias() += S.B12 * b2;
  Vec m2 = S.B12 * b1;
  m2.noalias() += S.B22 * b2;
  o1.noalias() = S.B12 * b1;
  o1.noalias() += S.B22 * b2;
  o1 -= fp.cwiseProduct(m1);
  o2.noalias() = S.B22 * b1;
  o2.noalias() += S.B32 * b2;
  o2 -= fp.cwiseProduct(m2);
}

void apply_T1(const OperatorSet& S, const Vec& b1, const Vec& b2, Vec& o1, Vec& o2) {
  o1.noalias() = S.B22 * b1;
  o1.noalias() -= S.B02 * b1;
  o1.noalias() += S.B32 * b2;
  o1.noalias() -= S.B12 * b2;
  o2.noalias() = S.B32 * b1;
  o2.noalias() -= S.B12 * b1;
  o2.noalias() -= S.B02 * b2;
  o2.noalias() -= 3.0 * (S.B22 * b2);
  o1 *= 0.25;
  o2 *= 0.25;
}

void apply_T2(const OperatorSet& S, const Vec& b1, const Vec& b2, Vec& o1, Vec& o2) {
  o1.noalias() = -(S.B32 * b1);
  o1.noalias() -= 3.0 * (S.B12 * b1);
  o1.noalias() += S.B02 * b2;
  o1.noalias() -= S.B22 * b2;
  o2.noalias() = S.B02 * b1;
  o2.noalias() -= S.B22 * b1;
  o2.noalias() += S.B12 * b2;
  o2.noalias() -= S.B32 * b2;
  o1 *= 0.25;
  o2 *= 0.25;
}

void apply_V(const OperatorSet& S, const Vec& b1, const Vec& b2, Vec& o1, Vec& o2) {
  const Vec& fp = S.geo.fprime.values;
  apply_T1(S, b1, b2, o1, o2);
  Vec t1(S.grid.N), t2(S.grid.N);
  apply_T2(S, fp.cwiseProduct(b1), fp.cwiseProduct(b2), t1, t2);
  o1 += t1;
  o2 += t2;
}

Vec apply_B1(const OperatorSet& S, const Vec& theta) {
  const Vec& fp = S.geo.fprime.values;
  Vec out = S.B11 * theta;
  out.noalias() -= S.B01 * fp.cwiseProduct(theta);
  return out;
}

Vec apply_B2(const OperatorSet& S, const Vec& theta) {
  const Vec& fp = S.geo.fprime.values;
  Vec out = S.B01 * theta;
  out.noalias() += S.B11 * fp.cwiseProduct(theta);
  return out;
}

Eigen::MatrixXd dense_D(const OperatorSet& S) {
  const int N = S.grid.N;
  const auto F = S.geo.fprime.values.asDiagonal();
  Eigen::MatrixXd M(2 * N, 2 * N);
  M.topLeftCorner(N, N) = S.B02 * F - S.B12;
  M.topRightCorner(N, N) = S.B12 * F - S.B22;
  M.bottomLeftCorner(N, N) = S.B12 * F - S.B22;
  M.bottomRightCorner(N, N) = S.B22 * F - S.B32;
  return M;
}

Eigen::MatrixXd dense_Dstar(const OperatorSet& S) {
  const int N = S.grid.N;
  const auto F = S.geo.fprime.values.asDiagonal();
  Eigen::MatrixXd M(2 * N, 2 * N);
  M.topLeftCorner(N, N) = S.B12 - F * S.B02;
  M.topRightCorner(N, N) = S.B22 - F * S.B12;
  M.bottomLeftCorner(N, N) = S.B22 - F * S.B12;
  M.bottomRightCorner(N, N) = S.B32 - F * S.B22;
  return M;
}

BlockOperator assemble_D(const GridFunction& f) {
  OperatorSet S = make_operator_set(f);
  const auto F = S.geo.fprime.values.asDiagonal();
  BlockOperator B;
  B.grid = f.grid;
  B.kernel_id = "D(f)";
  B.a11 = S.B02 * F - S.B12;
  B.a12 = S.B12 * F - S.B22;
  B.a21 = S.B12 * F - S.B22;
  B.a22 = S.B22 * F - S.B32;
  return B;
}

BlockOperator assemble_Dstar(const GridFunction& f) {
  OperatorSet S = make_operator_set(f);
  const auto F = S.geo.fprime.values.asDiagonal();
  BlockOperator B;
  B.grid = f.grid;
  B.kernel_id = "Dstar(f)";
  B.a11 = S.B12 - F * S.B02;
  B.a12 = S.B22 - F * S.B12;
  B.a21 = S.B22 - F * S.B12;
  B.a22 = S.B32 - F * S.B22;
  return B;
}

BlockOperator assemble_V(const GridFunction& f) {
  OperatorSet S = make_operator_set(f);
  const auto F = S.geo.fprime.values.asDiagonal();
  BlockOperator B;
  B.grid = f.grid;
  B.kernel_id = "V(f)";
  B.a11 = 0.25 * ((S.B22 - S.B02) + (-S.B32 - 3.0 * S.B12) * F);
  B.a12 = 0.25 * ((S.B32 - S.B12) + (S.B02 - S.B22) * F);
  B.a21 = 0.25 * ((S.B32 - S.B12) + (S.B02 - S.B22) * F);
  B.a22 = 0.25 * ((-S.B02 - 3.0 * S.B22) + (S.B12 - S.B32) * F);
  return B;
}

TraceOperators assemble_T1T2B1B2(const GridFunction& f) {
  OperatorSet S = make_operator_set(f, true);
  const auto F = S.geo.fprime.values.asDiagonal();
  TraceOperators T;
  T.T1.grid = f.grid;
  T.T1.kernel_id = "T1(f)";
  T.T1.a11 = 0.25 * (S.B22 - S.B02);
  T.T1.a12 = 0.25 * (S.B32 - S.B12);
  T.T1.a21 = 0.25 * (S.B32 - S.B12);
  T.T1.a22 = 0.25 * (-S.B02 - 3.0 * S.B22);
  T.T2.grid = f.grid;
  T.T2.kernel_id = "T2(f)";
  T.T2.a11 = 0.25 * (-S.B32 - 3.0 * S.B12);
  T.T2.a12 = 0.25 * (S.B02 - S.B22);
  T.T2.a21 = 0.25 * (S.B02 - S.B22);
  T.T2.a22 = 0.25 * (S.B12 - S.B32);
  T.B1 = OperatorMatrix{f.grid, S.B11 - S.B01 * F, "B1(f)"};
  T.B2 = OperatorMatrix{f.grid, S.B01 + S.B11 * F, "B2(f)"};
  return T;
}

TildeTraces tilde_traces(const OperatorSet& S, const DensityPair& beta, Side side) {
  require_same_grid(S.grid, beta.first.grid);
  if (!S.has_m1)
    throw std::invalid_argument("tilde_traces: operator set lacks the m = 1 kernels");
  const Grid& g = S.grid;
  const double s = (side == Side::plus) ? 1.0 : -1.0;
  const Vec& b1 = beta.first.values;
  const Vec& b2 = beta.second.values;
  const Vec& fp = S.geo.fprime.values;
  const Vec& om = S.geo.omega.values;

  const Vec btau = (b1.array() + fp.array() * b2.array()) / om.array();
  const Vec bnu = (-fp.array() * b1.array() + b2.array()) / om.array();

  Vec t1a(g.N), t1b(g.N), t2a(g.N), t2b(g.N);
  apply_T1(S, b1, b2, t1a, t1b);
  apply_T2(S, b1, b2, t2a, t2b);

  const Vec jump = btau.array() / (2.0 * om.array());
  const Vec& tau1 = S.geo.tau.first.values;
  const Vec& tau2 = S.geo.tau.second.values;
  const Vec& nu1 = S.geo.nu.first.values;
  const Vec& nu2 = S.geo.nu.second.values;

  TildeTraces out;
  out.gradu[0][0] = GridFunction{g, t1a - s * jump.cwiseProduct(tau1.cwiseProduct(nu1))};
  out.gradu[0][1] = GridFunction{g, t2a - s * jump.cwiseProduct(tau1.cwiseProduct(nu2))};
  out.gradu[1][0] = GridFunction{g, t1b - s * jump.cwiseProduct(tau2.cwiseProduct(nu1))};
  out.gradu[1][1] = GridFunction{g, t2b - s * jump.cwiseProduct(tau2.cwiseProduct(nu2))};

  const Vec p_in1 = bnu.array() / om.array();
  const Vec p_in2 = btau.array() / om.array();
  Vec Pi = s * p_in1 + apply_B1(S, p_in1) + apply_B2(S, p_in2);
  Pi *= 0.5;
  out.Pi = GridFunction{g, std::move(Pi)};
  return out;
}

TildeTraces tilde_traces(const GridFunction& f, const DensityPair& beta, Side side) {
  OperatorSet S = make_operator_set(f, true);
  return tilde_traces(S, beta, side);
}

}  // namespace capstokes
