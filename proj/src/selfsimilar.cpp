#include "scatter/selfsimilar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scatter/detail/fft.hpp"

namespace scatter {

namespace {

// fGn autocovariance at lag k for unit grid step and unit variance.
double fgn_autocov(double hurst, std::size_t k) {
  if (k == 0) return 1.0;
  const double kk = static_cast<double>(k);
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(kk - 1.0, h2));
}

// Davies-Harte synthesis. Returns n fGn samples with unit variance, or an
// empty vector if the circulant spectrum is not nonnegative.
std::vector<double> fgn_circulant(double hurst, std::size_t n, Rng& rng) {
  const std::size_t m = 2 * n;
  std::vector<std::complex<double>> c(m);
  for (std::size_t k = 0; k <= n; ++k) c[k] = fgn_autocov(hurst, k);
  for (std::size_t k = n + 1; k < m; ++k) c[k] = c[m - k];
  detail::fft(c);

  double max_eig = 0.0, min_eig = 0.0;
  for (const auto& z : c) {
    max_eig = std::max(max_eig, z.real());
    min_eig = std::min(min_eig, z.real());
  }
  if (min_eig < -1e-9 * max_eig) return {};

  // Independent complex gaussians in every Fourier slot with per-component
  // variance eig / (2n); the real part of the transform then carries exactly
  // the circulant covariance (the imaginary part would be an independent copy).
  std::vector<std::complex<double>> a(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double eig = std::max(0.0, c[k].real());
    const double sd = std::sqrt(eig / static_cast<double>(m));
    const double re = sd * rng.normal();
    const double im = sd * rng.normal();
    a[k] = {re, im};
  }
  detail::fft(a);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k].real();
  return out;
}

} // namespace

namespace detail {

std::vector<double> fgn_cholesky(double hurst, std::size_t n, Rng& rng) {
  if (n > 4096) throw std::runtime_error("fgn_cholesky: n too large for the fallback path");
  // Lower-triangular factor of the Toeplitz covariance, built row by row.
  std::vector<std::vector<double>> chol(n);
  for (std::size_t i = 0; i < n; ++i) {
    chol[i].resize(i + 1);
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = fgn_autocov(hurst, i - j);
      for (std::size_t k = 0; k < j; ++k) acc -= chol[i][k] * chol[j][k];
      if (i == j) {
        if (acc <= 0.0) throw std::runtime_error("fgn_cholesky: covariance not positive definite");
        chol[i][j] = std::sqrt(acc);
      } else {
        chol[i][j] = acc / chol[j][j];
      }
    }
  }
  std::vector<double> z(n);
  for (auto& x : z) x = rng.normal();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) out[i] += chol[i][j] * z[j];
  return out;
}

} // namespace detail

SamplePath simulate_fbm(double hurst, std::size_t n, double step, Rng& rng) {
  if (hurst <= 0.0 || hurst >= 1.0)
    throw std::invalid_argument("simulate_fbm: Hurst parameter must lie in (0, 1)");
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("simulate_fbm: n must be a power of two");
  if (step <= 0.0) throw std::invalid_argument("simulate_fbm: step must be positive");

  std::vector<double> increments = fgn_circulant(hurst, n, rng);
  if (increments.empty()) increments = detail::fgn_cholesky(hurst, n, rng);

  const double sd = std::pow(step, hurst);
  SamplePath path;
  path.step = step;
  path.kind = SamplePath::Kind::Fbm;
  path.param = hurst;
  path.values.resize(n + 1);
  path.values[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) path.values[k + 1] = path.values[k] + sd * increments[k];
  return path;
}

double sample_stable_standard(double alpha, Rng& rng) {
  const double theta = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double e = rng.exponential(1.0);
  const double inv_alpha = 1.0 / alpha;
  return std::sin(alpha * theta) / std::pow(std::cos(theta), inv_alpha) *
         std::pow(std::cos((1.0 - alpha) * theta) / e, (1.0 - alpha) * inv_alpha);
}

SamplePath simulate_alpha_stable(double alpha, std::size_t n, double step, Rng& rng) {
  if (alpha <= 1.0 || alpha > 2.0)
    throw std::invalid_argument("simulate_alpha_stable: alpha must lie in (1, 2]");
  if (n == 0) throw std::invalid_argument("simulate_alpha_stable: n must be positive");
  if (step <= 0.0) throw std::invalid_argument("simulate_alpha_stable: step must be positive");

  // Unit scale per unit time; the alpha = 2 rescale makes that case standard BM.
  double scale = std::pow(step, 1.0 / alpha);
  if (alpha == 2.0) scale /= std::sqrt(2.0);

  SamplePath path;
  path.step = step;
  path.kind = SamplePath::Kind::AlphaStable;
  path.param = alpha;
  path.values.resize(n + 1);
  path.values[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    path.values[k + 1] = path.values[k] + scale * sample_stable_standard(alpha, rng);
  return path;
}

ScalingSamples check_scaling_relation(SamplePath::Kind kind, double param,
                                      const WindowFunction& f, double s, int n_mc,
                                      std::uint64_t seed, std::size_t n_grid) {
  if (s <= 0.0) throw std::invalid_argument("check_scaling_relation: scale must be positive");
  if (n_mc < 1) throw std::invalid_argument("check_scaling_relation: n_mc must be positive");

  const double beta = kind == SamplePath::Kind::Fbm ? param : 1.0 / param;
  auto simulate = [&](double step, Rng& rng) {
    return kind == SamplePath::Kind::Fbm ? simulate_fbm(param, n_grid, step, rng)
                                         : simulate_alpha_stable(param, n_grid, step, rng);
  };

  ScalingSamples out;
  out.lhs.resize(n_mc);
  out.rhs.resize(n_mc);
  for (int r = 0; r < n_mc; ++r) {
    {
      Rng rng(derive_seed(seed, seed_domain::estimator, 2 * r));
      const SamplePath path = simulate(s / static_cast<double>(n_grid), rng);
      double acc = 0.0;
      for (std::size_t k = 0; k < n_grid; ++k)
        acc += f(static_cast<double>(k) * path.step) *
               (path.values[k + 1] - path.values[k]);
      out.lhs[r] = acc;
    }
    {
      Rng rng(derive_seed(seed, seed_domain::estimator, 2 * r + 1));
      const SamplePath path = simulate(1.0 / static_cast<double>(n_grid), rng);
      double acc = 0.0;
      for (std::size_t k = 0; k < n_grid; ++k)
        acc += f(s * static_cast<double>(k) * path.step) *
               (path.values[k + 1] - path.values[k]);
      out.rhs[r] = std::pow(s, beta) * acc;
    }
  }
  return out;
}

} // namespace scatter
