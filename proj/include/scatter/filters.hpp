#pragma once

#include <complex>
#include <vector>

#include "scatter/rng.hpp"

namespace scatter {

/// Smooth bump exp(-1/(4t - 4t^2)) on (0, 1), zero elsewhere. All derivatives
/// vanish at the endpoints.
double bump_window(double t);

/// Window on the unit interval: either the smooth bump or a tabulated curve
/// sampled on a uniform grid over [0, 1], interpolated linearly and clamped
/// to zero outside (0, 1). Immutable after construction.
class WindowFunction {
public:
  enum class Kind { SmoothBump, Tabulated };

  static WindowFunction smooth_bump() { return WindowFunction(); }
  static WindowFunction tabulated(std::vector<double> values);

  double operator()(double t) const;
  Kind kind() const { return kind_; }

private:
  WindowFunction() = default;
  Kind kind_ = Kind::SmoothBump;
  std::vector<double> values_; // samples at i / (n - 1), i = 0..n-1
};

/// Gabor-type filter: dilated window modulated by a complex exponential.
/// Support is (0, scale); the modulus |g(t)| = w(t / scale) does not depend
/// on the frequency.
struct GaborFilter {
  double scale = 1.0;
  double freq = 0.0;
  WindowFunction window = WindowFunction::smooth_bump();
};

std::complex<double> gabor_eval(const GaborFilter& f, double t);

/// Integral of |w|^p over [0, 1] by composite midpoint quadrature.
/// The midpoint rule converges beyond all algebraic orders for the smooth
/// bump because every derivative vanishes at the endpoints.
/// Throws std::invalid_argument for p < 1 or n_quad < 2.
double window_pnorm(const WindowFunction& w, double p, int n_quad = 1 << 14);

/// Draws a filter frequency uniformly from (0, 2*pi).
double sample_frequency(Rng& rng);

} // namespace scatter
