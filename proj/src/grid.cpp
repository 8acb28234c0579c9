#include "capstokes/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace capstokes {

namespace {

// FFTW plan creation is not thread safe; execution of distinct plans is.
std::mutex fftw_plan_mutex;

struct FftBuffers {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  int N = 0;

  explicit FftBuffers(int n) : N(n) {
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
  }
  ~FftBuffers() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
};

}  // namespace

Vec Grid::nodes() const {
  Vec x(N);
  for (int j = 0; j < N; ++j) x[j] = node(j);
  return x;
}

Grid make_grid(double L, int N) {
  if (L <= 0.0) throw std::invalid_argument("make_grid: non-positive half-length");
  if (N % 2 != 0) throw std::invalid_argument("make_grid: odd node count");
  if (N < 8) throw std::invalid_argument("make_grid: node count must be at least 8");
  Grid g;
  g.L = L;
  g.N = N;
  g.h = 2.0 * L / N;
  return g;
}

GridFunction grid_function(const Grid& g, Vec values) {
  if (values.size() != g.N)
    throw std::invalid_argument("grid_function: value count does not match grid");
  return GridFunction{g, std::move(values)};
}

GridFunction zero_function(const Grid& g) { return GridFunction{g, Vec::Zero(g.N)}; }

DensityPair density_pair(GridFunction a, GridFunction b) {
  require_same_grid(a.grid, b.grid);
  return DensityPair{std::move(a), std::move(b)};
}

DensityPair zero_pair(const Grid& g) { return DensityPair{zero_function(g), zero_function(g)}; }

void require_same_grid(const Grid& a, const Grid& b) {
  if (!a.same_as(b)) throw std::invalid_argument("mismatched grids");
}

std::vector<std::complex<double>> real_fft(const Grid& g, const Vec& u) {
  if (u.size() != g.N) throw std::invalid_argument("real_fft: size mismatch");
  FftBuffers buf(g.N);
  for (int j = 0; j < g.N; ++j) buf.real[j] = u[j];
  fftw_execute(buf.fwd);
  std::vector<std::complex<double>> bins(g.N / 2 + 1);
  for (int l = 0; l <= g.N / 2; ++l) bins[l] = {buf.cplx[l][0], buf.cplx[l][1]};
  return bins;
}

Vec real_ifft(const Grid& g, const std::vector<std::complex<double>>& bins) {
  if (static_cast<int>(bins.size()) != g.N / 2 + 1)
    throw std::invalid_argument("real_ifft: size mismatch");
  FftBuffers buf(g.N);
  for (int l = 0; l <= g.N / 2; ++l) {
    buf.cplx[l][0] = bins[l].real();
    buf.cplx[l][1] = bins[l].imag();
  }
  fftw_execute(buf.bwd);
  Vec out(g.N);
  const double scale = 1.0 / g.N;
  for (int j = 0; j < g.N; ++j) out[j] = buf.real[j] * scale;
  return out;
}

namespace {

// Applies a Fourier multiplier given on the nonnegative half-spectrum.
Vec apply_multiplier(const Grid& g, const Vec& u,
                     const std::vector<std::complex<double>>& m) {
  auto bins = real_fft(g, u);
  for (int l = 0; l <= g.N / 2; ++l) bins[l] *= m[l];
  return real_ifft(g, bins);
}

double wavenumber(const Grid& g, int l) { return M_PI / g.L * l; }

}  // namespace

GridFunction derivative(const GridFunction& u, int order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("derivative: order must be 1 or 2");
  const Grid& g = u.grid;
  std::vector<std::complex<double>> m(g.N / 2 + 1);
  for (int l = 0; l <= g.N / 2; ++l) {
    std::complex<double> ik(0.0, wavenumber(g, l));
    m[l] = (order == 1) ? ik : ik * ik;
  }
  if (order % 2 == 1) m[g.N / 2] = 0.0;  // odd-order Nyquist mode has no real sample
  return GridFunction{g, apply_multiplier(g, u.values, m)};
}

double sobolev_norm(const GridFunction& u, double s) {
  if (s < 0.0 || s > 3.0) throw std::invalid_argument("sobolev_norm: s must be in [0, 3]");
  const Grid& g = u.grid;
  auto bins = real_fft(g, u.values);
  const double dk = M_PI / g.L;
  double acc = 0.0;
  for (int l = 0; l <= g.N / 2; ++l) {
    const double k = wavenumber(g, l);
    const double w = (l == 0 || l == g.N / 2) ? 1.0 : 2.0;  // conjugate bins
    const double mag = std::norm(bins[l]) * g.h * g.h;
    acc += w * std::pow(1.0 + k * k, s) * mag;
  }
  return std::sqrt(dk / (2.0 * M_PI) * acc);
}

GridFunction hilbert_transform(const GridFunction& u) {
  const Grid& g = u.grid;
  std::vector<std::complex<double>> m(g.N / 2 + 1, std::complex<double>(0.0, -1.0));
  m[0] = 0.0;
  m[g.N / 2] = 0.0;
  return GridFunction{g, apply_multiplier(g, u.values, m)};
}

double l2_norm(const GridFunction& u) {
  return std::sqrt(u.grid.h * u.values.squaredNorm());
}

double l2_norm(const DensityPair& u) {
  return std::sqrt(u.first.grid.h *
                   (u.first.values.squaredNorm() + u.second.values.squaredNorm()));
}

double inner(const Vec& u, const Vec& v, double h) { return h * u.dot(v); }

}  // namespace capstokes
