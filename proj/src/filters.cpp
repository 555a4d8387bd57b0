#include "scatter/filters.hpp"

#include <cmath>
#include <stdexcept>

namespace scatter {

double bump_window(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return std::exp(-1.0 / (4.0 * t - 4.0 * t * t));
}

WindowFunction WindowFunction::tabulated(std::vector<double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("WindowFunction::tabulated: need at least 2 samples");
  WindowFunction w;
  w.kind_ = Kind::Tabulated;
  w.values_ = std::move(values);
  return w;
}

double WindowFunction::operator()(double t) const {
  if (kind_ == Kind::SmoothBump) return bump_window(t);
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double pos = t * (values_.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= values_.size()) return values_.back();
  const double frac = pos - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

std::complex<double> gabor_eval(const GaborFilter& f, double t) {
  if (f.scale <= 0.0) throw std::invalid_argument("gabor_eval: scale must be positive");
  const double mag = f.window(t / f.scale);
  if (mag == 0.0) return {0.0, 0.0};
  const double phase = f.freq * t;
  return {mag * std::cos(phase), mag * std::sin(phase)};
}

double window_pnorm(const WindowFunction& w, double p, int n_quad) {
  if (p < 1.0) throw std::invalid_argument("window_pnorm: p must be >= 1");
  if (n_quad < 2) throw std::invalid_argument("window_pnorm: n_quad must be >= 2");
  const double h = 1.0 / n_quad;
  double sum = 0.0;
  for (int i = 0; i < n_quad; ++i) {
    const double t = (i + 0.5) * h;
    sum += std::pow(std::fabs(w(t)), p);
  }
  return sum * h;
}

double sample_frequency(Rng& rng) { return rng.uniform_open(0.0, 2.0 * std::numbers::pi); }

} // namespace scatter
