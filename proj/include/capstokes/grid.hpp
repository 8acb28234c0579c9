#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

namespace capstokes {

using Vec = Eigen::VectorXd;

// Uniform grid xi_j = -L + j*h, j = 0..N-1, h = 2L/N. Functions sampled on it
// are treated as periodic on [-L, L) for all transform-based operations.
struct Grid {
  double L = 0.0;
  int N = 0;
  double h = 0.0;

  double node(int j) const { return -L + h * j; }
  Vec nodes() const;
  bool same_as(const Grid& o) const { return L == o.L && N == o.N; }
};

struct GridFunction {
  Grid grid;
  Vec values;
};

struct DensityPair {
  GridFunction first;
  GridFunction second;
};

Grid make_grid(double L, int N);

GridFunction grid_function(const Grid& g, Vec values);
GridFunction zero_function(const Grid& g);
DensityPair density_pair(GridFunction a, GridFunction b);
DensityPair zero_pair(const Grid& g);

void require_same_grid(const Grid& a, const Grid& b);

// Forward real DFT: bin l = sum_j u_j exp(-2*pi*i*j*l/N), l = 0..N/2.
std::vector<std::complex<double>> real_fft(const Grid& g, const Vec& u);
// Inverse of real_fft, including the 1/N factor.
Vec real_ifft(const Grid& g, const std::vector<std::complex<double>>& bins);

// Spectral derivative of the periodic extension; order must be 1 or 2.
GridFunction derivative(const GridFunction& u, int order = 1);

// Discrete H^s proxy norm on the periodic extension, s in [0, 3]:
// norm^2 = (dk / 2pi) * sum_k (1 + k^2)^s |u_hat(k)|^2 with u_hat = h * DFT,
// wavenumbers k in (pi/L) * {-N/2, ..., N/2 - 1}, dk = pi/L.
double sobolev_norm(const GridFunction& u, double s);

// FFT Hilbert transform with the convention (1/pi) PV int u(s)/(xi-s) ds,
// i.e. multiplier -i*sgn(k); the k = 0 and Nyquist bins are annihilated.
GridFunction hilbert_transform(const GridFunction& u);

// Discrete L2 norm sqrt(h * sum u_j^2); the s = 0 Sobolev norm.
double l2_norm(const GridFunction& u);
double l2_norm(const DensityPair& u);

// Quadrature inner product h * sum u_j v_j.
double inner(const Vec& u, const Vec& v, double h);

}  // namespace capstokes
