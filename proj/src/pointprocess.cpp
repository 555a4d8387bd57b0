#include "scatter/pointprocess.hpp"

#include <cmath>
#include <stdexcept>

namespace scatter {

IntensityModel IntensityModel::constant(double lambda0, double horizon) {
  if (lambda0 <= 0.0) throw std::invalid_argument("IntensityModel: lambda0 must be positive");
  if (horizon <= 0.0) throw std::invalid_argument("IntensityModel: horizon must be positive");
  IntensityModel m;
  m.kind_ = Kind::Constant;
  m.a_ = lambda0;
  m.horizon_ = horizon;
  return m;
}

IntensityModel IntensityModel::sinusoidal(double a, double b, double period, double horizon) {
  if (a <= 0.0) throw std::invalid_argument("IntensityModel: mean rate must be positive");
  if (std::fabs(b) >= 1.0)
    throw std::invalid_argument("IntensityModel: |b| must be < 1 to keep inf lambda > 0");
  if (period <= 0.0 || horizon <= 0.0)
    throw std::invalid_argument("IntensityModel: period and horizon must be positive");
  IntensityModel m;
  m.kind_ = Kind::Sinusoidal;
  m.a_ = a;
  m.b_ = b;
  m.period_ = period;
  m.horizon_ = horizon;
  return m;
}

double IntensityModel::lambda(double t) const {
  if (kind_ == Kind::Constant) return a_;
  return a_ * (1.0 + b_ * std::sin(2.0 * std::numbers::pi * t / period_));
}

double IntensityModel::cumulative(double t) const {
  if (kind_ == Kind::Constant) return a_ * t;
  const double omega = 2.0 * std::numbers::pi / period_;
  return a_ * t + a_ * b_ / omega * (1.0 - std::cos(omega * t));
}

double IntensityModel::lambda_min() const {
  if (kind_ == Kind::Constant) return a_;
  return a_ * (1.0 - std::fabs(b_));
}

double IntensityModel::lambda_max() const {
  if (kind_ == Kind::Constant) return a_;
  return a_ * (1.0 + std::fabs(b_));
}

ChargeDistribution ChargeDistribution::constant(double value) {
  ChargeDistribution d;
  d.kind_ = Kind::Constant;
  d.param_ = value;
  return d;
}

ChargeDistribution ChargeDistribution::gaussian(double variance) {
  if (variance <= 0.0) throw std::invalid_argument("ChargeDistribution: variance must be positive");
  ChargeDistribution d;
  d.kind_ = Kind::Gaussian;
  d.param_ = variance;
  return d;
}

ChargeDistribution ChargeDistribution::rademacher() {
  ChargeDistribution d;
  d.kind_ = Kind::Rademacher;
  return d;
}

double ChargeDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::Constant: return param_;
    case Kind::Gaussian: return std::sqrt(param_) * rng.normal();
    case Kind::Rademacher: return rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  return 0.0;
}

double ChargeDistribution::abs_moment(double p) const {
  if (p < 1.0) throw std::invalid_argument("abs_moment: p must be >= 1");
  switch (kind_) {
    case Kind::Constant: return std::pow(std::fabs(param_), p);
    case Kind::Rademacher: return 1.0;
    case Kind::Gaussian: {
      const double sigma = std::sqrt(param_);
      return std::pow(sigma, p) * std::pow(2.0, p / 2.0) *
             std::exp(std::lgamma((p + 1.0) / 2.0)) / std::sqrt(std::numbers::pi);
    }
  }
  return 0.0;
}

PointPattern::PointPattern(double horizon_in, std::vector<double> locations_in,
                           std::vector<double> charges_in)
    : horizon(horizon_in), locations(std::move(locations_in)), charges(std::move(charges_in)) {
  if (horizon <= 0.0) throw std::invalid_argument("PointPattern: horizon must be positive");
  if (locations.size() != charges.size())
    throw std::invalid_argument("PointPattern: locations/charges length mismatch");
  for (std::size_t i = 0; i < locations.size(); ++i) {
    if (locations[i] < 0.0 || locations[i] > horizon)
      throw std::invalid_argument("PointPattern: location outside [0, horizon]");
    if (i > 0 && locations[i] <= locations[i - 1])
      throw std::invalid_argument("PointPattern: locations must be strictly increasing");
  }
}

PointPattern simulate_homogeneous(double lambda0, double horizon, Rng& rng) {
  if (lambda0 <= 0.0) throw std::invalid_argument("simulate_homogeneous: lambda0 must be positive");
  if (horizon <= 0.0) throw std::invalid_argument("simulate_homogeneous: horizon must be positive");
  std::vector<double> locations;
  locations.reserve(static_cast<std::size_t>(lambda0 * horizon * 1.2) + 16);
  double t = 0.0;
  for (;;) {
    t += rng.exponential(lambda0);
    if (t > horizon) break;
    locations.push_back(t);
  }
  std::vector<double> charges(locations.size(), 1.0);
  return PointPattern(horizon, std::move(locations), std::move(charges));
}

namespace {

// Smallest t with Lambda(t) >= v, by bisection on [lo, horizon].
double invert_cumulative(const IntensityModel& intensity, double v, double lo) {
  double hi = intensity.horizon();
  const double tol = 1e-10 * intensity.horizon();
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (intensity.cumulative(mid) >= v)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

PointPattern simulate_inhomogeneous(const IntensityModel& intensity, Rng& rng) {
  if (intensity.lambda_min() <= 0.0)
    throw std::invalid_argument("simulate_inhomogeneous: intensity must be bounded away from 0");
  const double total = intensity.cumulative(intensity.horizon());
  std::vector<double> locations;
  locations.reserve(static_cast<std::size_t>(total * 1.2) + 16);
  double v = 0.0;
  double t = 0.0;
  for (;;) {
    v += rng.exponential(1.0);
    if (v > total) break;
    t = invert_cumulative(intensity, v, t);
    locations.push_back(t);
  }
  // Bisection can in principle produce ties at the tolerance; drop them.
  std::vector<double> unique;
  unique.reserve(locations.size());
  for (double x : locations)
    if (unique.empty() || x > unique.back()) unique.push_back(x);
  std::vector<double> charges(unique.size(), 1.0);
  return PointPattern(intensity.horizon(), std::move(unique), std::move(charges));
}

PointPattern simulate_inhomogeneous_window(const IntensityModel& intensity, double t0, double t1,
                                           Rng& rng) {
  if (t0 < 0.0 || t1 > intensity.horizon() || t0 >= t1)
    throw std::invalid_argument("simulate_inhomogeneous_window: need 0 <= t0 < t1 <= horizon");
  if (intensity.lambda_min() <= 0.0)
    throw std::invalid_argument("simulate_inhomogeneous_window: intensity must be positive");
  const double v_hi = intensity.cumulative(t1);
  std::vector<double> locations;
  double v = intensity.cumulative(t0);
  double t = t0;
  for (;;) {
    v += rng.exponential(1.0);
    if (v > v_hi) break;
    t = invert_cumulative(intensity, v, t);
    if (locations.empty() || t > locations.back()) locations.push_back(t);
  }
  std::vector<double> charges(locations.size(), 1.0);
  return PointPattern(intensity.horizon(), std::move(locations), std::move(charges));
}

PointPattern attach_charges(PointPattern pattern, const ChargeDistribution& dist, Rng& rng) {
  for (auto& c : pattern.charges) c = dist.sample(rng);
  return pattern;
}

PointPattern sgn_transform(PointPattern pattern, bool absolute) {
  for (auto& c : pattern.charges) {
    if (absolute)
      c = 1.0;
    else
      c = c > 0.0 ? 1.0 : (c < 0.0 ? -1.0 : 0.0);
  }
  return pattern;
}

double expected_count(const IntensityModel& intensity, double a, double b) {
  if (a > b) throw std::invalid_argument("expected_count: requires a <= b");
  return intensity.cumulative(b) - intensity.cumulative(a);
}

} // namespace scatter
