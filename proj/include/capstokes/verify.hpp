#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "capstokes/grid.hpp"
#include "capstokes/potentials.hpp"

namespace capstokes {

struct IdentityReport {
  std::string identity_id;
  double residual_l2 = 0.0;
  double reference_norm = 0.0;
  double grid_L = 0.0;
  int grid_N = 0;
  std::optional<double> refinement_order;

  double relative() const {
    return residual_l2 / (reference_norm > 0.0 ? reference_norm : 1.0);
  }
};

// Band-limited noise with a fixed set of anchored frequencies (independent of
// the grid), a Gaussian envelope, and seeded amplitudes/phases. Companion
// generators subtract weighted moments so that far-field decay hypotheses of
// the operator identities hold on the truncated domain.
GridFunction band_noise(const Grid& grid, std::uint64_t seed);
GridFunction kill_weighted_moments(const GridFunction& u, const std::vector<GridFunction>& weights);
DensityPair test_density(const Grid& grid, const GridFunction& f, std::uint64_t seed,
                         bool kill_moments = true);
GridFunction standard_profile(const Grid& grid);  // 0.3 exp(-xi^2)
GridFunction gaussian_profile(const Grid& grid, double amplitude, double width);

// (D beta)' + D*[beta'] = 0, truncation-masked.
IdentityReport residual_comder(const GridFunction& f, const DensityPair& beta);

// V(D beta) + D(V beta) = 0, truncation-masked.
IdentityReport residual_anticommute(const GridFunction& f, const DensityPair& beta);

// Rellich energy identities on the one-sided traces; which in {1, 2, 5}.
IdentityReport residual_rellich(const GridFunction& f, const DensityPair& beta,
                                int which, Side side);

// Product/derivative rule for the singular family with all slots equal to f;
// requires n, m <= 3.
IdentityReport residual_fder(const GridFunction& f, const GridFunction& h, int n, int m);

// omega * T(u, Pi) nu = (-+1/2 - D*) beta on the one-sided traces.
IdentityReport residual_ffff(const GridFunction& f, const DensityPair& beta, Side side);

struct SuiteResult {
  std::string name;
  std::vector<IdentityReport> reports;
  std::vector<std::string> notes;
  bool passed = true;
};

// Named suites: geometry, comder, anticommute, rellich, fder, ffff, all.
SuiteResult run_suite(const std::string& name);

}  // namespace capstokes
