#include "scatter/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "scatter/parallel.hpp"

namespace scatter::stats {

MeanStdErr mean_stderr(std::span<const double> values) {
  MeanStdErr out;
  out.n = static_cast<int>(values.size());
  if (out.n == 0) return out;
  out.mean = par::pairwise_sum(values) / out.n;
  if (out.n < 2) return out;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = par::pairwise_sum(sq) / (out.n - 1);
  out.std_error = std::sqrt(var / out.n);
  return out;
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double stat, double df) { return gamma_q(df / 2.0, stat / 2.0); }

namespace detail {

double ks_pvalue(double d, double n_effective) {
  const double sq = std::sqrt(n_effective);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_one_sample_sorted(const std::vector<double>& sorted,
                              const std::vector<double>& cdf_at_sorted) {
  const std::size_t n = sorted.size();
  if (n == 0) throw std::invalid_argument("ks_one_sample: empty sample");
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, std::fabs(cdf_at_sorted[i] - lo), std::fabs(hi - cdf_at_sorted[i])});
  }
  return {d, ks_pvalue(d, static_cast<double>(n))};
}

} // namespace detail

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  return {d, detail::ks_pvalue(d, ne)};
}

double poisson_chi2_pvalue(std::span<const int> counts, double mean) {
  if (counts.empty()) throw std::invalid_argument("poisson_chi2: empty sample");
  const double n = static_cast<double>(counts.size());
  int k_max = 0;
  for (int c : counts) k_max = std::max(k_max, c);

  // Poisson pmf over 0..k_max, remainder mass in an overflow cell.
  std::vector<double> pmf(k_max + 1);
  double p = std::exp(-mean);
  double cum = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    pmf[k] = p;
    cum += p;
    p *= mean / (k + 1);
  }
  std::vector<double> expected(pmf.size() + 1);
  for (std::size_t k = 0; k < pmf.size(); ++k) expected[k] = n * pmf[k];
  expected.back() = n * std::max(0.0, 1.0 - cum);

  std::vector<double> observed(expected.size(), 0.0);
  for (int c : counts) observed[c] += 1.0;

  // Merge cells until every bin has expected count >= 5.
  std::vector<double> obs_bins, exp_bins;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    o_acc += observed[k];
    e_acc += expected[k];
    if (e_acc >= 5.0) {
      obs_bins.push_back(o_acc);
      exp_bins.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 && !exp_bins.empty()) {
    obs_bins.back() += o_acc;
    exp_bins.back() += e_acc;
  }
  if (exp_bins.size() < 2) throw std::invalid_argument("poisson_chi2: too few bins");

  double stat = 0.0;
  for (std::size_t k = 0; k < exp_bins.size(); ++k) {
    const double d = obs_bins[k] - exp_bins[k];
    stat += d * d / exp_bins[k];
  }
  return chi2_sf(stat, static_cast<double>(exp_bins.size() - 1));
}

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                          std::span<const double> rel_error, double max_rel_error,
                          int min_points) {
  if (x.size() != y.size() || (!rel_error.empty() && rel_error.size() != x.size()))
    throw std::invalid_argument("fit_loglog_slope: length mismatch");

  SlopeFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double re = rel_error.empty() ? 0.0 : rel_error[i];
    if (y[i] <= 0.0 || x[i] <= 0.0 || re > max_rel_error) {
      fit.excluded_x.push_back(x[i]);
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    fit.used_x.push_back(x[i]);
  }
  const int m = static_cast<int>(lx.size());
  if (m < min_points) throw std::invalid_argument("fit_loglog_slope: too few usable points");

  double sx = 0, sy = 0;
  for (int i = 0; i < m; ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog_slope: degenerate x values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

} // namespace scatter::stats
