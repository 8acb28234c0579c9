#include "capstokes/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "capstokes/util.hpp"

namespace capstokes {

void BlockOperator::apply(const Vec& in1, const Vec& in2, Vec& out1, Vec& out2) const {
  out1.noalias() = a11 * in1;
  out1.noalias() += a12 * in2;
  out2.noalias() = a21 * in1;
  out2.noalias() += a22 * in2;
}

DensityPair BlockOperator::apply(const DensityPair& b) const {
  require_same_grid(grid, b.first.grid);
  Vec o1(grid.N), o2(grid.N);
  apply(b.first.values, b.second.values, o1, o2);
  return density_pair(grid_function(grid, std::move(o1)), grid_function(grid, std::move(o2)));
}

Eigen::MatrixXd BlockOperator::full() const {
  const int N = grid.N;
  Eigen::MatrixXd M(2 * N, 2 * N);
  M.topLeftCorner(N, N) = a11;
  M.topRightCorner(N, N) = a12;
  M.bottomLeftCorner(N, N) = a21;
  M.bottomRightCorner(N, N) = a22;
  return M;
}

std::string kernel_id_Bnm0(int n, int m) {
  return "B0_{" + std::to_string(n) + "," + std::to_string(m) + "}(f)";
}

GridFunction apply_Bnm(const std::vector<GridFunction>& a,
                       const std::vector<GridFunction>& b,
                       const GridFunction& h) {
  const Grid& g = h.grid;
  for (const auto& ai : a) require_same_grid(g, ai.grid);
  for (const auto& bi : b) require_same_grid(g, bi.grid);
  const int N = g.N;
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  Vec out(N);

  parallel_ranges(N, [&](int begin, int end) {
    for (int j = begin; j < end; ++j) {
      double acc = 0.0;
      for (int K = -N / 2 + 1; K <= N / 2 - 1; ++K) {
        if (K == 0) continue;
        const int l = ((j - K) % N + N) % N;
        const double eta = K * g.h;
        const double w = (K == 1 || K == -1) ? 1.5 * g.h : g.h;
        double term = h.values[l] / eta;
        for (int i = 0; i < n; ++i) {
          term *= (b[i].values[j] - b[i].values[l]) / eta;
        }
        for (int i = 0; i < m; ++i) {
          const double qa = (a[i].values[j] - a[i].values[l]) / eta;
          term /= 1.0 + qa * qa;
        }
        acc += w * term;
      }
      out[j] = acc / M_PI;
    }
  });
  return GridFunction{g, std::move(out)};
}

OperatorMatrix assemble_Bnm0(const GridFunction& f, int n, int m) {
  if (n < 0 || m < 0 || n > 5 || m > 5)
    throw std::invalid_argument("assemble_Bnm0: indices must satisfy 0 <= n, m <= 5");
  const Grid& g = f.grid;
  const int N = g.N;
  Eigen::MatrixXd M(N, N);

  parallel_ranges(N, [&](int begin, int end) {
    for (int j = begin; j < end; ++j) {
      for (int K = -N / 2; K <= N / 2 - 1; ++K) {
        const int l = ((j - K) % N + N) % N;
        if (K == 0 || K == -N / 2) {
          M(j, l) = 0.0;
          continue;
        }
        const double eta = K * g.h;
        const double w = (K == 1 || K == -1) ? 1.5 * g.h : g.h;
        const double q = (f.values[j] - f.values[l]) / eta;
        double ker = 1.0 / eta;
        for (int i = 0; i < n; ++i) ker *= q;
        const double d = 1.0 + q * q;
        for (int i = 0; i < m; ++i) ker /= d;
        M(j, l) = w * ker / M_PI;
      }
    }
  });
  return OperatorMatrix{g, std::move(M), kernel_id_Bnm0(n, m)};
}

}  // namespace capstokes
