#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scatter/filters.hpp"
#include "scatter/pointprocess.hpp"
#include "scatter/rng.hpp"
#include "scatter/selfsimilar.hpp"
#include "scatter/stats.hpp"

namespace scatter::theory {

/// A theoretical prediction used as the comparison target for an estimator.
struct Prediction {
  enum class Method { ClosedForm, Quadrature, MonteCarloOracle };
  double value = 0.0;
  Method method = Method::ClosedForm;
  double tolerance = 0.0; // > 0; quadrature values are stable within this under grid doubling
};

/// Small-scale first-order limit: lambda * E|A|^p * ||w||_p^p. Pass lambda(t)
/// for the pointwise limit or the period mean m1 for the invariant one.
Prediction predict_first_order(double lambda_or_m1, double p, const ChargeDistribution& dist,
                               const WindowFunction& w, int n_quad = 1 << 14);

/// Density sampler for the normalized point location V on (0, 1):
/// p_V(v) = s * lambda(t - v s) / Lambda_s(t), drawn via an inverse-cdf table
/// built from the analytic cumulative.
class LocationSampler {
public:
  LocationSampler(const IntensityModel& intensity, double t, double s, int table_size = 4096);
  double sample(Rng& rng) const;
  double density(double v) const;
  double window_mass() const { return mass_; } // Lambda_s(t)

private:
  const IntensityModel intensity_;
  double t_, s_, mass_;
  std::vector<double> cdf_; // cdf at v = i / (table_size)
};

/// m-term conditional expansion of the pointwise moment. The inner
/// expectations are Monte Carlo averages with locations drawn from p_V and
/// charges from dist; coefficient weights are analytic. Requires
/// s * sup(lambda) < 1 and m >= 1.
Prediction taylor_expansion(const GaborFilter& f, double p, const IntensityModel& intensity,
                            const ChargeDistribution& dist, double t, int m, int n_mc,
                            std::uint64_t seed);

struct ErrorDecayPoint {
  double scale = 0.0;
  double error = 0.0;        // |direct - expansion|
  double noise = 0.0;        // 1 sigma Monte Carlo noise on that difference
  bool usable = false;       // noise small enough to trust the point
  int n_replicates = 0;
};

struct ErrorDecayResult {
  std::vector<ErrorDecayPoint> points;
  stats::SlopeFit fit; // log |error| against log scale over the usable points
};

struct ErrorDecayOptions {
  int n_mc_inner = 400000;       // inner Monte Carlo draws of the expansion
  int min_replicates = 200000;   // direct-estimator replicates (shared by all scales)
  int max_replicates = 30000000;
  double replicate_rule = 500.0; // replicates ~ rule / min Lambda_s^(2m+1)
};

/// Error ladder for the m-term expansion: direct pointwise estimates against
/// the expansion across a descending scale ladder, with noise-dominated
/// scales flagged and excluded from the slope fit.
ErrorDecayResult taylor_error_decay(std::span<const GaborFilter> ladder, double p,
                                    const IntensityModel& intensity,
                                    const ChargeDistribution& dist, double t, int m,
                                    std::uint64_t seed, const ErrorDecayOptions& opts = {});

/// Second-order limit constant K = || g_{c, L/c} conv |g_{1,0}|^p ||_{p'}^{p'}
/// by nested midpoint quadrature with grid doubling; stable to 1e-4 relative,
/// throws if doubling still moves the value by more than 1e-3 relative.
Prediction predict_second_order_K(double p, double p2, double c, double L,
                                  const WindowFunction& w, int n_start = 512,
                                  int n_max = 4096);

/// Period moments of the intensity: m1 = mean of lambda, m2 = mean of lambda^2.
Prediction m_lambda(const IntensityModel& intensity, int order);

struct Thm33Point {
  double scale = 0.0;
  double lhs = 0.0;
  double std_error = 0.0;
  bool usable = false;
};

struct Thm33Result {
  std::vector<Thm33Point> points;
  Prediction rhs;
};

struct Thm33Options {
  int n_replicates = 32;
  int horizon_periods = 16;    // realization horizon as a multiple of the period
  int n_mc_rhs = 200000;
  double noise_threshold = 0.2; // usable when std_error <= threshold * |lhs|
};

/// Second-moment expansion ladder. Per scale the left side is
///   SY(gamma_k, p) / (s^2 E|A|^p E|w(V_k)|^p)  -  (1/T) int Lambda_s(t) dt / s^2
/// with E|w(V_k)|^p and the integral by quadrature and SY by the invariant
/// time-average over whole periods. The right side is
///   m2 * ( E|A1 w(U1) e^{iLU1} + A2 w(U2) e^{iLU2}|^p / (2 ||w||_p^p E|A|^p) - 1 ),
/// the form the expansion actually converges to (see README notes on the
/// normalization); U1, U2 uniform on (0,1) by Monte Carlo.
Thm33Result thm33_sides(std::span<const double> scales, double p,
                        const IntensityModel& intensity, const ChargeDistribution& dist,
                        double L, std::uint64_t seed, const Thm33Options& opts = {});

/// Small-scale limit functional of the self-similar moments:
/// E | int_0^1 w(u) e^{iLu} dX(u) |^p by Monte Carlo on a fine unit grid.
/// Brownian motion with p = 2, L = 0 short-circuits to ||w||_2^2.
Prediction predict_selfsim(SamplePath::Kind kind, double param, double p, double L,
                           const WindowFunction& w, int n_mc, std::uint64_t seed,
                           std::size_t n_grid = 4096);

/// Truncated-series evaluation of E[Z^a 1{Z > m}] for Z ~ Poisson(lambda).
double poisson_tail_moment(double lambda, double alpha_exp, int m);

} // namespace scatter::theory
