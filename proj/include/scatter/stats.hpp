#pragma once

#include <algorithm>
#include <span>
#include <vector>

namespace scatter::stats {

/// Sample mean and standard error of the mean (fixed-topology reduction).
struct MeanStdErr {
  double mean = 0.0;
  double std_error = 0.0;
  int n = 0;
};

MeanStdErr mean_stderr(std::span<const double> values);

/// Regularized lower incomplete gamma P(a, x); Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with df degrees of freedom.
double chi2_sf(double stat, double df);

/// Two-sample Kolmogorov-Smirnov test. Returns the asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS test against a cdf given as a callable double -> double.
template <class Cdf>
KsResult ks_one_sample(std::vector<double> sample, Cdf&& cdf);

namespace detail {
double ks_pvalue(double d, double n_effective);
KsResult ks_one_sample_sorted(const std::vector<double>& sorted,
                              const std::vector<double>& cdf_at_sorted);
} // namespace detail

/// Chi-square goodness of fit of integer counts against Poisson(mean).
/// Bins with expected count below 5 are merged into the tails.
double poisson_chi2_pvalue(std::span<const int> counts, double mean);

/// Ordinary least squares fit of log(y) against log(x).
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> used_x;     // x values that entered the fit
  std::vector<double> excluded_x; // x values rejected by the noise rule
};

/// Fits log y = intercept + slope * log x. Points with
/// rel_error[i] > max_rel_error (or y <= 0) are excluded and reported.
/// Throws std::invalid_argument if fewer than min_points remain.
SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                          std::span<const double> rel_error,
                          double max_rel_error = 0.2, int min_points = 4);

template <class Cdf>
KsResult ks_one_sample(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  std::vector<double> values(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) values[i] = cdf(sample[i]);
  return detail::ks_one_sample_sorted(sample, values);
}

} // namespace scatter::stats
