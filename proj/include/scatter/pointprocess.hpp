#pragma once

#include <cstdint>
#include <vector>

#include "scatter/rng.hpp"

namespace scatter {

/// Arrival intensity lambda(t) on [0, horizon] with an analytic cumulative.
/// Constant: lambda(t) = lambda0. Sinusoidal: lambda(t) = a (1 + b sin(2 pi t / T)),
/// periodic with period T and valid only for |b| < 1 so that inf lambda > 0.
class IntensityModel {
public:
  enum class Kind { Constant, Sinusoidal };

  static IntensityModel constant(double lambda0, double horizon);
  static IntensityModel sinusoidal(double a, double b, double period, double horizon);

  Kind kind() const { return kind_; }
  double horizon() const { return horizon_; }
  double lambda(double t) const;
  /// Cumulative Lambda(t) = integral of lambda over [0, t].
  double cumulative(double t) const;
  double lambda_min() const;
  double lambda_max() const;
  bool periodic() const { return kind_ == Kind::Sinusoidal; }
  double period() const { return period_; }
  double base_rate() const { return a_; }
  double modulation() const { return b_; }

private:
  IntensityModel() = default;
  Kind kind_ = Kind::Constant;
  double a_ = 1.0;      // lambda0 for Constant, mean rate for Sinusoidal
  double b_ = 0.0;      // relative modulation amplitude
  double period_ = 0.0; // 0 when not periodic
  double horizon_ = 1.0;
};

/// i.i.d. charge law attached to the points. All three families have finite
/// absolute moments of every order, with closed forms.
class ChargeDistribution {
public:
  enum class Kind { Constant, Gaussian, Rademacher };

  static ChargeDistribution constant(double value);
  static ChargeDistribution gaussian(double variance); // mean zero
  static ChargeDistribution rademacher();

  Kind kind() const { return kind_; }
  double sample(Rng& rng) const;
  /// E[|A|^p] in closed form; p >= 1.
  double abs_moment(double p) const;

private:
  ChargeDistribution() = default;
  Kind kind_ = Kind::Constant;
  double param_ = 1.0; // value for Constant, variance for Gaussian
};

/// One realization: strictly increasing event locations in [0, horizon] with
/// real charges. Immutable by convention once built.
struct PointPattern {
  double horizon = 0.0;
  std::vector<double> locations;
  std::vector<double> charges;

  PointPattern() = default;
  PointPattern(double horizon, std::vector<double> locations, std::vector<double> charges);
  std::size_t size() const { return locations.size(); }
};

/// Homogeneous Poisson process via i.i.d. exponential gaps -log(U)/lambda0.
/// Charges initialize to 1. Events strictly beyond the horizon are discarded.
PointPattern simulate_homogeneous(double lambda0, double horizon, Rng& rng);

/// Inhomogeneous Poisson process by time rescaling: V accumulates unit-rate
/// exponential increments and each event is Lambda^{-1}(V), found by bisection
/// on the analytic cumulative to absolute tolerance 1e-10 * horizon.
PointPattern simulate_inhomogeneous(const IntensityModel& intensity, Rng& rng);

/// Restriction of the same process to (t0, t1]: the accumulator starts at
/// Lambda(t0), so the draw is exact for the window without generating the
/// rest of the horizon.
PointPattern simulate_inhomogeneous_window(const IntensityModel& intensity, double t0, double t1,
                                           Rng& rng);

/// Replaces the charges by i.i.d. draws; locations untouched.
PointPattern attach_charges(PointPattern pattern, const ChargeDistribution& dist, Rng& rng);

/// Unit-charge skeleton. With absolute = true every charge becomes 1; with
/// absolute = false charge A maps to sgn(A).
PointPattern sgn_transform(PointPattern pattern, bool absolute = true);

/// Expected count Lambda([a, b]) from the analytic cumulative. Requires a <= b.
double expected_count(const IntensityModel& intensity, double a, double b);

} // namespace scatter
