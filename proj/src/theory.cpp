#include "scatter/theory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "scatter/parallel.hpp"
#include "scatter/scattering.hpp"

namespace scatter::theory {

Prediction predict_first_order(double lambda_or_m1, double p, const ChargeDistribution& dist,
                               const WindowFunction& w, int n_quad) {
  const double pnorm = window_pnorm(w, p, n_quad);
  const double refined = window_pnorm(w, p, 2 * n_quad);
  Prediction out;
  out.value = lambda_or_m1 * dist.abs_moment(p) * pnorm;
  out.method = Prediction::Method::Quadrature;
  out.tolerance = std::max(1e-12, std::fabs(refined - pnorm) * lambda_or_m1 * dist.abs_moment(p));
  return out;
}

LocationSampler::LocationSampler(const IntensityModel& intensity, double t, double s,
                                 int table_size)
    : intensity_(intensity), t_(t), s_(s) {
  if (s <= 0.0) throw std::invalid_argument("LocationSampler: scale must be positive");
  if (t - s < 0.0 || t > intensity.horizon())
    throw std::invalid_argument("LocationSampler: window [t-s, t] must lie inside [0, horizon]");
  mass_ = intensity.cumulative(t) - intensity.cumulative(t - s);
  cdf_.resize(static_cast<std::size_t>(table_size) + 1);
  for (int i = 0; i <= table_size; ++i) {
    const double v = static_cast<double>(i) / table_size;
    cdf_[static_cast<std::size_t>(i)] =
        (intensity.cumulative(t) - intensity.cumulative(t - v * s)) / mass_;
  }
  cdf_.front() = 0.0;
  cdf_.back() = 1.0;
}

double LocationSampler::sample(Rng& rng) const {
  const double u = rng.uniform_open();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t i = std::min(cdf_.size() - 1, static_cast<std::size_t>(it - cdf_.begin()));
  const double lo = cdf_[i - 1], hi = cdf_[i];
  const double frac = hi > lo ? (u - lo) / (hi - lo) : 0.5;
  const double n = static_cast<double>(cdf_.size() - 1);
  return (static_cast<double>(i - 1) + frac) / n;
}

double LocationSampler::density(double v) const {
  if (v < 0.0 || v > 1.0) return 0.0;
  return s_ * intensity_.lambda(t_ - v * s_) / mass_;
}

namespace {

double power_p(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

} // namespace

Prediction taylor_expansion(const GaborFilter& f, double p, const IntensityModel& intensity,
                            const ChargeDistribution& dist, double t, int m, int n_mc,
                            std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("taylor_expansion: m must be >= 1");
  if (n_mc < 2) throw std::invalid_argument("taylor_expansion: n_mc must be >= 2");
  const double s = f.scale;
  if (s * intensity.lambda_max() >= 1.0)
    throw std::invalid_argument("taylor_expansion: requires s * sup(lambda) < 1");

  const LocationSampler sampler(intensity, t, s);
  const double mass = sampler.window_mass();

  double value = 0.0;
  double var_acc = 0.0;
  double coeff = std::exp(-mass); // e^{-Lambda} Lambda^k / k!
  for (int k = 1; k <= m; ++k) {
    coeff *= mass / k;
    if (k == 1) {
      // One point carries no interference: |A w(V) e^{i phase}|^p factorizes
      // into E|A|^p E|w(V)|^p, evaluated exactly by quadrature.
      const int nq = 1 << 13;
      double wq = 0.0;
      for (int i = 0; i < nq; ++i) {
        const double v = (i + 0.5) / nq;
        wq += power_p(std::fabs(f.window(v)), p) * sampler.density(v);
      }
      value += coeff * dist.abs_moment(p) * wq / nq;
      continue;
    }
    Rng rng(derive_seed(seed, seed_domain::oracle, static_cast<std::uint64_t>(k)));
    std::vector<double> draws(static_cast<std::size_t>(n_mc));
    for (int i = 0; i < n_mc; ++i) {
      double re = 0.0, im = 0.0;
      for (int j = 0; j < k; ++j) {
        const double a = dist.sample(rng);
        const double v = sampler.sample(rng);
        const double mag = a * f.window(v);
        const double phase = s * f.freq * v;
        re += mag * std::cos(phase);
        im += mag * std::sin(phase);
      }
      draws[static_cast<std::size_t>(i)] = power_p(std::sqrt(re * re + im * im), p);
    }
    const auto ms = stats::mean_stderr(draws);
    value += coeff * ms.mean;
    var_acc += coeff * coeff * ms.std_error * ms.std_error;
  }
  Prediction out;
  out.value = value;
  out.method = Prediction::Method::MonteCarloOracle;
  out.tolerance = std::max(1e-15, 3.0 * std::sqrt(var_acc));
  return out;
}

ErrorDecayResult taylor_error_decay(std::span<const GaborFilter> ladder, double p,
                                    const IntensityModel& intensity,
                                    const ChargeDistribution& dist, double t, int m,
                                    std::uint64_t seed, const ErrorDecayOptions& opts) {
  if (ladder.size() < 5)
    throw std::invalid_argument("taylor_error_decay: need a ladder of at least 5 scales");

  const std::size_t n_scales = ladder.size();
  double mass_min = 1e300;
  for (const auto& f : ladder)
    mass_min = std::min(mass_min, intensity.cumulative(t) - intensity.cumulative(t - f.scale));

  // One set of realizations is shared across the whole ladder (the response
  // windows are nested), which cancels most of the scale-to-scale noise in
  // the fitted slope. The smallest window mass dictates the replicate count
  // because the error shrinks like mass^(m+1) while the noise only shrinks
  // like sqrt(mass / R).
  const double want = opts.replicate_rule / std::pow(mass_min, 2 * m + 1);
  const auto n_rep = static_cast<std::int64_t>(std::clamp(
      want, static_cast<double>(opts.min_replicates), static_cast<double>(opts.max_replicates)));

  // Points outside (t - s_max, t] cannot contribute to any ladder scale.
  double s_max = 0.0;
  for (const auto& f : ladder) s_max = std::max(s_max, f.scale);
  const double t0 = std::max(0.0, t - s_max);
  const PatternGenerator generator = [&intensity, &dist, t0, t](Rng& rng) {
    return attach_charges(simulate_inhomogeneous_window(intensity, t0, t, rng), dist, rng);
  };

  // Control variate: Y = sum_j |A_j|^p w^p(V_j) has the analytic mean
  // E|A|^p s int w^p(v) lambda(t - v s) dv and equals |conv|^p whenever the
  // window holds at most one point, so X - Y is nonzero only on multi-point
  // events and its Monte Carlo noise is orders of magnitude below Var(X).
  std::vector<double> control_mean(n_scales);
  for (std::size_t k = 0; k < n_scales; ++k) {
    const double s = ladder[k].scale;
    const int nq = 1 << 13;
    double acc = 0.0;
    for (int i = 0; i < nq; ++i) {
      const double v = (i + 0.5) / nq;
      acc += power_p(std::fabs(ladder[k].window(v)), p) * intensity.lambda(t - v * s);
    }
    control_mean[k] = dist.abs_moment(p) * s * acc / nq;
  }

  // Block-deterministic accumulation: replicates are processed in fixed
  // blocks, each block reduces serially, block partials reduce pairwise.
  constexpr std::int64_t kBlock = 1 << 14;
  const std::int64_t n_blocks = (n_rep + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> block_sum(n_scales, std::vector<double>(n_blocks));
  std::vector<std::vector<double>> block_sumsq(n_scales, std::vector<double>(n_blocks));

  par::for_index(n_blocks, par::Exec::Parallel, [&](std::int64_t b) {
    std::vector<double> vals(n_scales), acc(n_scales, 0.0), accsq(n_scales, 0.0);
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min<std::int64_t>(n_rep, lo + kBlock);
    for (std::int64_t r = lo; r < hi; ++r) {
      Rng rng(derive_seed(seed, seed_domain::estimator, static_cast<std::uint64_t>(r)));
      const PointPattern pattern = generator(rng);
      for (std::size_t k = 0; k < n_scales; ++k) {
        const auto& f = ladder[k];
        const auto z = conv_at(f, pattern, t);
        const double x = power_p(std::sqrt(z.real() * z.real() + z.imag() * z.imag()), p);
        double y = 0.0;
        for (std::size_t j = 0; j < pattern.size(); ++j) {
          const double dt = t - pattern.locations[j];
          if (dt <= 0.0 || dt >= f.scale) continue;
          y += power_p(std::fabs(pattern.charges[j] * f.window(dt / f.scale)), p);
        }
        vals[k] = x - y;
      }
      for (std::size_t k = 0; k < n_scales; ++k) {
        acc[k] += vals[k];
        accsq[k] += vals[k] * vals[k];
      }
    }
    for (std::size_t k = 0; k < n_scales; ++k) {
      block_sum[k][static_cast<std::size_t>(b)] = acc[k];
      block_sumsq[k][static_cast<std::size_t>(b)] = accsq[k];
    }
  });

  ErrorDecayResult out;
  out.points.resize(n_scales);
  for (std::size_t k = 0; k < n_scales; ++k) {
    const double sum = par::pairwise_sum(block_sum[k]);
    const double sumsq = par::pairwise_sum(block_sumsq[k]);
    const double n = static_cast<double>(n_rep);
    const double diff_mean = sum / n;
    const double var = std::max(0.0, (sumsq - n * diff_mean * diff_mean) / (n - 1.0));
    const double direct_se = std::sqrt(var / n);
    const double direct_value = control_mean[k] + diff_mean;

    const auto expansion =
        taylor_expansion(ladder[k], p, intensity, dist, t, m, opts.n_mc_inner,
                         derive_seed(seed, seed_domain::oracle, k));

    ErrorDecayPoint& pt = out.points[k];
    pt.scale = ladder[k].scale;
    pt.error = std::fabs(direct_value - expansion.value);
    pt.noise = std::sqrt(direct_se * direct_se +
                         (expansion.tolerance / 3.0) * (expansion.tolerance / 3.0));
    pt.n_replicates = static_cast<int>(n_rep);
    pt.usable = pt.error > 3.0 * pt.noise;
  }

  std::vector<double> xs, ys, rel;
  for (const auto& pt : out.points) {
    xs.push_back(pt.scale);
    ys.push_back(pt.error);
    rel.push_back(pt.error > 0.0 ? pt.noise / pt.error : 1e9);
  }
  out.fit = stats::fit_loglog_slope(xs, ys, rel, 1.0 / 3.0, 4);
  return out;
}

Prediction predict_second_order_K(double p, double p2, double c, double L,
                                  const WindowFunction& w, int n_start, int n_max) {
  if (c <= 0.0) throw std::invalid_argument("predict_second_order_K: c must be positive");
  if (p < 1.0 || p2 < 1.0) throw std::invalid_argument("predict_second_order_K: p, p' >= 1");

  const auto evaluate = [&](int n) {
    // Outer integral over v in [0, 1+c], inner over u in [0, 1]; both windows
    // vanish outside their supports so a plain tensor midpoint rule applies.
    const int n_v = static_cast<int>(std::ceil(n * (1.0 + c)));
    const double hv = (1.0 + c) / n_v;
    const double hu = 1.0 / n;
    std::vector<double> wp(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) wp[static_cast<std::size_t>(j)] = power_p(w((j + 0.5) * hu), p);
    double outer = 0.0;
    for (int i = 0; i < n_v; ++i) {
      const double v = (i + 0.5) * hv;
      double re = 0.0, im = 0.0;
      for (int j = 0; j < n; ++j) {
        const double u = (j + 0.5) * hu;
        const double arg = (v - u) / c;
        const double mag = w(arg);
        if (mag == 0.0 || wp[static_cast<std::size_t>(j)] == 0.0) continue;
        const double phase = (L / c) * (v - u);
        const double val = mag * wp[static_cast<std::size_t>(j)];
        re += val * std::cos(phase);
        im += val * std::sin(phase);
      }
      re *= hu;
      im *= hu;
      outer += power_p(std::sqrt(re * re + im * im), p2);
    }
    return outer * hv;
  };

  double prev = evaluate(n_start);
  double cur = prev;
  double rel_change = 1.0;
  for (int n = 2 * n_start; n <= n_max; n *= 2) {
    cur = evaluate(n);
    rel_change = prev == 0.0 ? 0.0 : std::fabs(cur - prev) / std::max(1e-300, std::fabs(cur));
    prev = cur;
    if (rel_change <= 1e-4) break;
  }
  if (rel_change > 1e-3)
    throw std::runtime_error("predict_second_order_K: quadrature did not converge");

  Prediction out;
  out.value = cur;
  out.method = Prediction::Method::Quadrature;
  out.tolerance = std::max(1e-12, rel_change * std::fabs(cur));
  return out;
}

Prediction m_lambda(const IntensityModel& intensity, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("m_lambda: order must be 1 or 2");
  const double a = intensity.base_rate();
  const double b = intensity.modulation();
  Prediction out;
  out.method = Prediction::Method::ClosedForm;
  out.tolerance = 1e-15;
  if (intensity.kind() == IntensityModel::Kind::Constant)
    out.value = order == 1 ? a : a * a;
  else
    out.value = order == 1 ? a : a * a * (1.0 + 0.5 * b * b);
  return out;
}

Thm33Result thm33_sides(std::span<const double> scales, double p,
                        const IntensityModel& intensity, const ChargeDistribution& dist,
                        double L, std::uint64_t seed, const Thm33Options& opts) {
  if (!intensity.periodic() && intensity.kind() != IntensityModel::Kind::Constant)
    throw std::invalid_argument("thm33_sides: intensity must be periodic or constant");
  const double period =
      intensity.periodic() ? intensity.period() : intensity.horizon() / opts.horizon_periods;
  const double horizon = period * opts.horizon_periods;
  if (horizon > intensity.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("thm33_sides: intensity horizon too short for the period count");

  const double abs_p = dist.abs_moment(p);
  const double wp_norm = window_pnorm(WindowFunction::smooth_bump(), p);

  Thm33Result out;
  out.points.resize(scales.size());

  const PatternGenerator generator = [&intensity, &dist](Rng& rng) {
    return attach_charges(simulate_inhomogeneous(intensity, rng), dist, rng);
  };

  for (std::size_t k = 0; k < scales.size(); ++k) {
    const double s = scales[k];
    if (s >= period)
      throw std::invalid_argument("thm33_sides: scales must be smaller than the period");
    const GaborFilter f{s, L / s, WindowFunction::smooth_bump()};

    // E|w(V_k)|^p averaged over one period, and (1/T) int Lambda_s(t) dt,
    // both by midpoint quadrature on the analytic intensity.
    const int nt = 512, nv = 512;
    double w_mean = 0.0;
    for (int i = 0; i < nt; ++i) {
      const double t = period + (i + 0.5) * period / nt;
      const double mass = intensity.cumulative(t) - intensity.cumulative(t - s);
      double inner = 0.0;
      for (int j = 0; j < nv; ++j) {
        const double v = (j + 0.5) / nv;
        inner += power_p(bump_window(v), p) * s * intensity.lambda(t - v * s) / mass;
      }
      w_mean += inner / nv;
    }
    w_mean /= nt;

    double lambda_term = 0.0;
    const int ni = 8192;
    for (int i = 0; i < ni; ++i) {
      const double t = period + (i + 0.5) * period / ni;
      lambda_term += intensity.cumulative(t) - intensity.cumulative(t - s);
    }
    lambda_term /= ni;
    const double subtract = lambda_term / (s * s);

    const double denom = s * s * abs_p * w_mean;
    std::vector<double> lhs_reps(static_cast<std::size_t>(opts.n_replicates));
    par::for_index(opts.n_replicates, par::Exec::Parallel, [&](std::int64_t r) {
      Rng rng(derive_seed(derive_seed(seed, seed_domain::process, k), seed_domain::estimator,
                          static_cast<std::uint64_t>(r)));
      const PointPattern pattern = generator(rng);
      const double ps[1] = {p};
      const auto sy =
          time_average_moments(f, ps, pattern, s / 8.0, period, horizon - period);
      lhs_reps[static_cast<std::size_t>(r)] = sy[0] / denom - subtract;
    });
    const auto ms = stats::mean_stderr(lhs_reps);
    out.points[k] = {s, ms.mean, ms.std_error,
                     std::fabs(ms.mean) > 0.0 && ms.std_error <= opts.noise_threshold * std::fabs(ms.mean)};
  }

  // Right side: Monte Carlo over two uniform locations and two charges.
  {
    Rng rng(derive_seed(seed, seed_domain::oracle, 0x333));
    std::vector<double> draws(static_cast<std::size_t>(opts.n_mc_rhs));
    for (int i = 0; i < opts.n_mc_rhs; ++i) {
      const double a1 = dist.sample(rng), a2 = dist.sample(rng);
      const double u1 = rng.uniform(), u2 = rng.uniform();
      const double m1 = a1 * bump_window(u1), m2v = a2 * bump_window(u2);
      const double re = m1 * std::cos(L * u1) + m2v * std::cos(L * u2);
      const double im = m1 * std::sin(L * u1) + m2v * std::sin(L * u2);
      draws[static_cast<std::size_t>(i)] = power_p(std::sqrt(re * re + im * im), p);
    }
    const auto ms = stats::mean_stderr(draws);
    const double m2 = m_lambda(intensity, 2).value;
    out.rhs.value = m2 * (ms.mean / (2.0 * wp_norm * abs_p) - 1.0);
    out.rhs.method = Prediction::Method::MonteCarloOracle;
    out.rhs.tolerance = std::max(1e-15, 3.0 * m2 * ms.std_error / (2.0 * wp_norm * abs_p));
  }
  return out;
}

Prediction predict_selfsim(SamplePath::Kind kind, double param, double p, double L,
                           const WindowFunction& w, int n_mc, std::uint64_t seed,
                           std::size_t n_grid) {
  if (kind == SamplePath::Kind::AlphaStable && p >= param)
    throw std::invalid_argument("predict_selfsim: requires p < alpha for the stable process");

  if (kind == SamplePath::Kind::Fbm && param == 0.5 && p == 2.0 && L == 0.0) {
    Prediction out;
    out.value = window_pnorm(w, 2.0);
    out.method = Prediction::Method::ClosedForm;
    out.tolerance = 1e-10;
    return out;
  }

  const double step = 1.0 / static_cast<double>(n_grid);
  std::vector<double> draws(static_cast<std::size_t>(n_mc));
  par::for_index(n_mc, par::Exec::Parallel, [&](std::int64_t i) {
    Rng rng(derive_seed(seed, seed_domain::oracle, static_cast<std::uint64_t>(i)));
    const SamplePath path = kind == SamplePath::Kind::Fbm
                                ? simulate_fbm(param, n_grid, step, rng)
                                : simulate_alpha_stable(param, n_grid, step, rng);
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n_grid; ++j) {
      const double u = static_cast<double>(j) * step;
      const double mag = w(u);
      if (mag == 0.0) continue;
      const double dx = path.values[j + 1] - path.values[j];
      re += mag * std::cos(L * u) * dx;
      im += mag * std::sin(L * u) * dx;
    }
    draws[static_cast<std::size_t>(i)] = power_p(std::sqrt(re * re + im * im), p);
  });
  const auto ms = stats::mean_stderr(draws);
  Prediction out;
  out.value = ms.mean;
  out.method = Prediction::Method::MonteCarloOracle;
  out.tolerance = std::max(1e-15, 3.0 * ms.std_error);
  return out;
}

double poisson_tail_moment(double lambda, double alpha_exp, int m) {
  if (lambda <= 0.0 || lambda >= 1.0)
    throw std::invalid_argument("poisson_tail_moment: lambda must lie in (0, 1)");
  if (m < 0) throw std::invalid_argument("poisson_tail_moment: m must be >= 0");
  double term = std::exp(-lambda); // e^{-lambda} lambda^k / k! at k = 0
  for (int k = 1; k <= m; ++k) term *= lambda / k;
  double acc = 0.0;
  for (int k = m + 1; k <= 10000; ++k) {
    term *= lambda / k;
    const double contrib = term * std::pow(static_cast<double>(k), alpha_exp);
    acc += contrib;
    if (contrib < 1e-16 * std::max(acc, 1e-300)) break;
  }
  return acc;
}

} // namespace scatter::theory
