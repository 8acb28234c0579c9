#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "capstokes/grid.hpp"

namespace capstokes {

struct OperatorMatrix {
  Grid grid;
  Eigen::MatrixXd entries;
  std::string kernel_id;

  Vec apply(const Vec& x) const { return entries * x; }
};

// 2x2 block operator acting on a DensityPair laid out as (first; second).
struct BlockOperator {
  Grid grid;
  Eigen::MatrixXd a11, a12, a21, a22;
  std::string kernel_id;

  void apply(const Vec& in1, const Vec& in2, Vec& out1, Vec& out2) const;
  DensityPair apply(const DensityPair& b) const;
  Eigen::MatrixXd full() const;  // assembles the 2N x 2N matrix
};

std::string kernel_id_Bnm0(int n, int m);

// Principal-value operator
//   B_{n,m}(a_1..a_m)[b_1..b_n, h](xi)
//     = (1/pi) PV int h(xi - eta)/eta * prod_i (d_i b / eta) / prod_i (1 + (d_i a / eta)^2) deta
// with d u = u(xi) - u(xi - eta), discretized on the periodic extension by the
// punctured symmetric-pair trapezoid rule over eta = K*h, K = +-1..+-(N/2-1),
// with the weight at K = +-1 raised to 3h/2 (the skipped node's weight folded
// onto its nearest neighbors).
GridFunction apply_Bnm(const std::vector<GridFunction>& a,
                       const std::vector<GridFunction>& b,
                       const GridFunction& h);

// Nystrom matrix of B^0_{n,m}(f) = B_{n,m}(f,..,f)[f,..,f, .]; same quadrature
// as apply_Bnm in matrix form. Requires n, m <= 5.
OperatorMatrix assemble_Bnm0(const GridFunction& f, int n, int m);

}  // namespace capstokes
