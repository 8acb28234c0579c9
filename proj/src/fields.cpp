#include "capstokes/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace capstokes {

namespace {

// dU[k][i] = partial_i U^{k+1}(y), each a 2-vector; common factor 1/(4 pi mu |y|^4).
void stokeslet_gradients(const Eigen::Vector2d& y, double mu, Eigen::Vector2d dU[2][2]) {
  const double y1 = y[0];
  const double y2 = y[1];
  const double r2 = y1 * y1 + y2 * y2;
  const double c = 1.0 / (4.0 * M_PI * mu * r2 * r2);
  const double d = y1 * y1 - y2 * y2;
  dU[0][0] = c * Eigen::Vector2d(y1 * d, y2 * d);
  dU[0][1] = c * Eigen::Vector2d(y2 * (y2 * y2 + 3.0 * y1 * y1), -y1 * d);
  dU[1][0] = c * Eigen::Vector2d(y2 * d, y1 * (y1 * y1 + 3.0 * y2 * y2));
  dU[1][1] = c * Eigen::Vector2d(-y1 * d, -y2 * d);
}

double pressure_kernel(int k, const Eigen::Vector2d& y) {
  const double r2 = y.squaredNorm();
  return -y[k - 1] / (2.0 * M_PI * r2);
}

}  // namespace

FundamentalSample fundamental_solution(int k, const Eigen::Vector2d& y, double mu) {
  if (k != 1 && k != 2) throw std::invalid_argument("fundamental_solution: k must be 1 or 2");
  if (!(mu > 0.0)) throw std::invalid_argument("fundamental_solution: viscosity must be positive");
  const double r2 = y.squaredNorm();
  if (r2 == 0.0) throw std::invalid_argument("fundamental_solution: evaluation at the singular point y = 0");
  FundamentalSample out;
  const double pref = -1.0 / (4.0 * M_PI * mu);
  const double logterm = -0.5 * std::log(r2);  // ln(1/|y|)
  for (int j = 0; j < 2; ++j) {
    const double kron = (j == k - 1) ? 1.0 : 0.0;
    out.U[j] = pref * (kron * logterm + y[j] * y[k - 1] / r2);
  }
  out.P = pressure_kernel(k, y);
  return out;
}

FieldSample stokes_solution(const GridFunction& f, const DensityPair& beta,
                            const BulkPoint& x, double mu) {
  require_same_grid(f.grid, beta.first.grid);
  if (!(mu > 0.0)) throw std::invalid_argument("stokes_solution: viscosity must be positive");
  const Grid& g = f.grid;
  const int N = g.N;
  const double h = g.h;

  // Distance guard against the sampled interface nodes.
  double dist2 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < N; ++j) {
    const double dx1 = x.x1 - g.node(j);
    const double dx2 = x.x2 - f.values[j];
    dist2 = std::min(dist2, dx1 * dx1 + dx2 * dx2);
  }
  if (dist2 < h * h) throw std::runtime_error("near-boundary evaluation unreliable");

  const InterfaceGeometry geo = geometry_of(f);
  GridFunction b1p = derivative(beta.first, 1);
  GridFunction b2p = derivative(beta.second, 1);

  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  double p = 0.0;
  Eigen::Vector2d dU[2][2];
  for (int j = 0; j < N; ++j) {
    const Eigen::Vector2d R(x.x1 - g.node(j), x.x2 - f.values[j]);
    stokeslet_gradients(R, mu, dU);
    const double fp = geo.fprime.values[j];
    const double bk[2] = {beta.first.values[j], beta.second.values[j]};
    for (int k = 0; k < 2; ++k) {
      v -= (dU[k][0] + fp * dU[k][1]) * bk[k];
    }
    p -= pressure_kernel(1, R) * b1p.values[j] + pressure_kernel(2, R) * b2p.values[j];
  }
  FieldSample out;
  out.velocity = h * v;
  out.pressure = h * p;
  return out;
}

double interior_stokes_residual(const GridFunction& f, const DensityPair& beta,
                                const BulkPoint& x, double mu, double fd_step) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("interior_stokes_residual: step must be positive");
  const double d = fd_step;
  const FieldSample c0 = stokes_solution(f, beta, x, mu);
  const FieldSample xp = stokes_solution(f, beta, {x.x1 + d, x.x2}, mu);
  const FieldSample xm = stokes_solution(f, beta, {x.x1 - d, x.x2}, mu);
  const FieldSample yp = stokes_solution(f, beta, {x.x1, x.x2 + d}, mu);
  const FieldSample ym = stokes_solution(f, beta, {x.x1, x.x2 - d}, mu);

  const Eigen::Vector2d lap =
      (xp.velocity + xm.velocity + yp.velocity + ym.velocity - 4.0 * c0.velocity) / (d * d);
  const Eigen::Vector2d gradp((xp.pressure - xm.pressure) / (2.0 * d),
                              (yp.pressure - ym.pressure) / (2.0 * d));
  const double divv = (xp.velocity[0] - xm.velocity[0]) / (2.0 * d) +
                      (yp.velocity[1] - ym.velocity[1]) / (2.0 * d);
  const double momentum = (mu * lap - gradp).norm();
  return std::max(momentum, std::abs(divv));
}

TraceFormulas trace_formulas(const GridFunction& f, const DensityPair& beta, double mu) {
  require_same_grid(f.grid, beta.first.grid);
  if (!(mu > 0.0)) throw std::invalid_argument("trace_formulas: viscosity must be positive");
  OperatorSet S = make_operator_set(f, /*with_m1=*/true);
  const Grid& g = f.grid;

  TraceFormulas out{zero_pair(g), zero_function(g), zero_function(g), zero_function(g), zero_function(g)};

  // Velocity trace shares the single-layer operator code path.
  Vec v1, v2;
  apply_V(S, beta.first.values, beta.second.values, v1, v2);
  out.v_trace.first.values = v1 / mu;
  out.v_trace.second.values = v2 / mu;

  const Vec b1p = derivative(beta.first, 1).values;
  const Vec b2p = derivative(beta.second, 1).values;
  const Vec& fp = S.geo.fprime.values;
  const Vec& om = S.geo.omega.values;

  // Pressure: p = (B^0_{0,1}[b1'] + B^0_{1,1}[b2'])/2 - beta' . nu / (2 omega).
  const Vec B01_1 = S.B01 * b1p;
  const Vec B11_2 = S.B11 * b2p;
  const Vec bp_dot_nu = (-fp.array() * b1p.array() + b2p.array()) / om.array();
  out.p_trace.values = 0.5 * (B01_1 + B11_2) - (bp_dot_nu.array() / (2.0 * om.array())).matrix();

  // Gradient traces on beta'.
  const Vec B02_1 = S.B02 * b1p;
  const Vec B12_1 = S.B12 * b1p;
  const Vec B22_1 = S.B22 * b1p;
  const Vec B32_1 = S.B32 * b1p;
  const Vec B02_2 = S.B02 * b2p;
  const Vec B12_2 = S.B12 * b2p;
  const Vec B22_2 = S.B22 * b2p;
  const Vec B32_2 = S.B32 * b2p;

  const Eigen::ArrayXd bp_dot_tau = (b1p.array() + fp.array() * b2p.array()) / om.array();
  const Eigen::ArrayXd anchor = bp_dot_tau / (2.0 * mu * om.array().cube());

  out.d1v1.values = (-((B02_1 - B22_1) + (B12_2 - B32_2)).array() / (4.0 * mu) -
                     fp.array() * anchor)
                        .matrix();
  out.d2v1.values = (-((B32_1 + 3.0 * B12_1) + (B22_2 - B02_2)).array() / (4.0 * mu) +
                     anchor)
                        .matrix();
  out.d1v2.values = (-((B12_1 - B32_1) + (B02_2 + 3.0 * B22_2)).array() / (4.0 * mu) -
                     fp.array().square() * anchor)
                        .matrix();
  return out;
}

DensityPair traction_trace(const TraceFormulas& tr, const InterfaceGeometry& geo, double mu) {
  const Grid& g = tr.p_trace.grid;
  require_same_grid(g, geo.f.grid);
  DensityPair out = zero_pair(g);
  const Eigen::ArrayXd p = tr.p_trace.values.array();
  const Eigen::ArrayXd t11 = -p + 2.0 * mu * tr.d1v1.values.array();
  const Eigen::ArrayXd t12 = mu * (tr.d2v1.values.array() + tr.d1v2.values.array());
  const Eigen::ArrayXd t22 = -p - 2.0 * mu * tr.d1v1.values.array();
  const Eigen::ArrayXd n1 = geo.nu.first.values.array();
  const Eigen::ArrayXd n2 = geo.nu.second.values.array();
  out.first.values = (t11 * n1 + t12 * n2).matrix();
  out.second.values = (t12 * n1 + t22 * n2).matrix();
  return out;
}

}  // namespace capstokes
