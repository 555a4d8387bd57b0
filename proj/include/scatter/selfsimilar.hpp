#pragma once

#include <cstdint>
#include <vector>

#include "scatter/filters.hpp"
#include "scatter/rng.hpp"

namespace scatter {

/// Grid-sampled self-similar process. values[k] = X(k * step), values[0] = 0.
struct SamplePath {
  enum class Kind { Fbm, AlphaStable };

  double step = 0.0;
  std::vector<double> values;
  Kind kind = Kind::Fbm;
  double param = 0.5; // Hurst exponent H, or stability index alpha

  /// Scaling exponent beta: H for fBM, 1/alpha for the stable process.
  double scaling_exponent() const {
    return kind == Kind::Fbm ? param : 1.0 / param;
  }
};

/// Fractional Brownian motion on a grid of n steps. Increments are exact
/// fractional Gaussian noise, Var[X(t+step)-X(t)] = step^(2H), generated by
/// circulant embedding (n must be a power of two). If the circulant spectrum
/// has negative entries the generator falls back to a Cholesky factorization,
/// which is exact as well but only practical for small n.
SamplePath simulate_fbm(double hurst, std::size_t n, double step, Rng& rng);

/// Symmetric alpha-stable Levy process, 1 < alpha <= 2, increments i.i.d.
/// stable with scale step^(1/alpha) by the Chambers-Mallows-Stuck transform.
/// At alpha = 2 the raw CMS variate has variance 2; it is rescaled by 1/sqrt(2)
/// so that alpha = 2 matches standard Brownian motion exactly.
SamplePath simulate_alpha_stable(double alpha, std::size_t n, double step, Rng& rng);

/// One draw of the raw CMS variate (unit scale, symmetric).
double sample_stable_standard(double alpha, Rng& rng);

/// Monte CarLo samples of the two sides of the stochastic-integral scaling
/// identity: lhs = integral of f over [0, s] against dX, rhs = s^beta times
/// the integral of f(s u) over [0, 1] against an independent copy of dX.
/// Both are left-endpoint Riemann-Stieltjes sums on n_grid cells.
struct ScalingSamples {
  std::vector<double> lhs;
  std::vector<double> rhs;
};

ScalingSamples check_scaling_relation(SamplePath::Kind kind, double param,
                                      const WindowFunction& f, double s, int n_mc,
                                      std::uint64_t seed, std::size_t n_grid = 4096);

namespace detail {
/// Exact fGn by Cholesky factorization of the covariance; test/fallback path.
std::vector<double> fgn_cholesky(double hurst, std::size_t n, Rng& rng);
} // namespace detail

} // namespace scatter
