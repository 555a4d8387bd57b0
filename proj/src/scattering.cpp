#include "scatter/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scatter/stats.hpp"

namespace scatter {

namespace {

constexpr double kGridSlack = 1.0 + 1e-9;

double modulus(std::complex<double> z) {
  return std::sqrt(z.real() * z.real() + z.imag() * z.imag());
}

double power_of_modulus(double m, double p) {
  if (p == 1.0) return m;
  if (p == 2.0) return m * m;
  return std::pow(m, p);
}

struct GridRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  std::int64_t count() const { return hi < lo ? 0 : hi - lo + 1; }
};

GridRange grid_range(double t_min, double t_max, double h) {
  GridRange r;
  r.lo = static_cast<std::int64_t>(std::ceil(t_min / h - 1e-9));
  r.hi = static_cast<std::int64_t>(std::floor(t_max / h + 1e-9));
  return r;
}

// Sorted unique grid indices k (within range) such that some point lies in
// (k h - span, k h).
std::vector<std::int64_t> response_indices(const PointPattern& pattern, double span, double h,
                                           const GridRange& range) {
  std::vector<std::int64_t> idx;
  idx.reserve(pattern.size() * static_cast<std::size_t>(span / h + 2));
  for (double tj : pattern.locations) {
    const auto lo = std::max<std::int64_t>(range.lo, static_cast<std::int64_t>(std::floor(tj / h)) + 1);
    const auto hi = std::min<std::int64_t>(range.hi, static_cast<std::int64_t>(std::ceil((tj + span) / h)) - 1);
    for (std::int64_t k = lo; k <= hi; ++k) idx.push_back(k);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

MomentEstimate reduce_replicates(const std::vector<double>& values, EstimatorKind kind) {
  const auto ms = stats::mean_stderr(values);
  return {ms.mean, ms.std_error, ms.n, kind};
}

// Runs one body per replicate with a derived seed, stores into slot r, then
// reduces with a fixed topology. Parallel and serial execution agree
// bit-for-bit.
template <class Body>
std::vector<double> replicate_values(int n_replicates, std::uint64_t seed, par::Exec exec,
                                     Body&& body) {
  std::vector<double> values(n_replicates);
  par::for_index(n_replicates, exec, [&](std::int64_t r) {
    Rng rng(derive_seed(seed, seed_domain::estimator, static_cast<std::uint64_t>(r)));
    values[static_cast<std::size_t>(r)] = body(rng);
  });
  return values;
}

} // namespace

std::complex<double> conv_at(const GaborFilter& f, const PointPattern& pattern, double t) {
  const double s = f.scale;
  const auto& loc = pattern.locations;
  auto it = std::upper_bound(loc.begin(), loc.end(), t - s);
  double re = 0.0, im = 0.0;
  for (; it != loc.end() && *it < t; ++it) {
    const double dt = t - *it;
    const double mag = f.window(dt / s);
    if (mag == 0.0) continue;
    const double a = pattern.charges[static_cast<std::size_t>(it - loc.begin())];
    const double phase = f.freq * dt;
    re += a * mag * std::cos(phase);
    im += a * mag * std::sin(phase);
  }
  return {re, im};
}

std::vector<double> time_average_moments(const GaborFilter& f, std::span<const double> ps,
                                         const PointPattern& pattern, double h, double t_min,
                                         double t_max) {
  if (h <= 0.0 || h * 8.0 > f.scale * kGridSlack)
    throw std::invalid_argument("time_average_moments: grid step must satisfy h <= scale / 8");
  const GridRange range = grid_range(t_min, t_max, h);
  if (range.count() <= 0) throw std::invalid_argument("time_average_moments: empty grid range");

  const auto idx = response_indices(pattern, f.scale, h, range);
  std::vector<std::vector<double>> terms(ps.size());
  for (auto& v : terms) v.reserve(idx.size());
  for (std::int64_t k : idx) {
    const double m = modulus(conv_at(f, pattern, static_cast<double>(k) * h));
    for (std::size_t ip = 0; ip < ps.size(); ++ip)
      terms[ip].push_back(power_of_modulus(m, ps[ip]));
  }
  std::vector<double> out(ps.size());
  for (std::size_t ip = 0; ip < ps.size(); ++ip)
    out[ip] = par::pairwise_sum(terms[ip]) / static_cast<double>(range.count());
  return out;
}

MomentEstimate first_order_invariant(const GaborFilter& f, double p, const PointPattern& pattern,
                                     double h) {
  if (pattern.horizon < 10.0 * f.scale)
    throw std::invalid_argument("first_order_invariant: horizon must be >= 10 * scale");
  const double margin = f.scale;
  const double ps[1] = {p};
  const auto vals = time_average_moments(f, ps, pattern, h, margin, pattern.horizon - margin);
  return {vals[0], 0.0, 1, EstimatorKind::InvariantTimeAverage};
}

MomentEstimate first_order_invariant_mc(const GaborFilter& f, double p,
                                        const PatternGenerator& generator, int n_replicates,
                                        std::uint64_t seed, par::Exec exec) {
  if (n_replicates < 2)
    throw std::invalid_argument("first_order_invariant_mc: need at least 2 replicates");
  const auto values = replicate_values(n_replicates, seed, exec, [&](Rng& rng) {
    const PointPattern pattern = generator(rng);
    return first_order_invariant(f, p, pattern, f.scale / 8.0).value;
  });
  return reduce_replicates(values, EstimatorKind::InvariantTimeAverage);
}

MomentEstimate first_order_pointwise(const GaborFilter& f, double p,
                                     const PatternGenerator& generator, double t,
                                     int n_replicates, std::uint64_t seed, par::Exec exec) {
  if (n_replicates < 2)
    throw std::invalid_argument("first_order_pointwise: need at least 2 replicates");
  const auto values = replicate_values(n_replicates, seed, exec, [&](Rng& rng) {
    const PointPattern pattern = generator(rng);
    return power_of_modulus(modulus(conv_at(f, pattern, t)), p);
  });
  return reduce_replicates(values, EstimatorKind::PointwiseMC);
}

namespace {

// Piecewise storage of u = |g * Y|^p on the fine grid, restricted to the
// union of the response windows. Lookups outside return exactly 0.
class FineGridField {
public:
  FineGridField(const GaborFilter& f, double p, const PointPattern& pattern, double h,
                double reach) {
    // Merge per-point index windows [floor(tj/h)+1, ceil((tj+reach)/h)-1].
    std::vector<std::pair<std::int64_t, std::int64_t>> spans;
    spans.reserve(pattern.size());
    for (double tj : pattern.locations) {
      const std::int64_t a = static_cast<std::int64_t>(std::floor(tj / h)) + 1;
      const std::int64_t b = static_cast<std::int64_t>(std::ceil((tj + reach) / h)) - 1;
      if (b < a) continue;
      if (!spans.empty() && a <= spans.back().second + 1)
        spans.back().second = std::max(spans.back().second, b);
      else
        spans.emplace_back(a, b);
    }
    starts_.reserve(spans.size());
    offsets_.reserve(spans.size() + 1);
    offsets_.push_back(0);
    std::size_t total = 0;
    for (const auto& sp : spans) {
      starts_.push_back(sp.first);
      total += static_cast<std::size_t>(sp.second - sp.first + 1);
      offsets_.push_back(total);
    }
    values_.resize(total);
    std::size_t pos = 0;
    for (const auto& sp : spans)
      for (std::int64_t k = sp.first; k <= sp.second; ++k) {
        const auto z = conv_at(f, pattern, static_cast<double>(k) * h);
        values_[pos++] =
            power_of_modulus(std::sqrt(z.real() * z.real() + z.imag() * z.imag()), p);
      }
    ends_.reserve(spans.size());
    for (const auto& sp : spans) ends_.push_back(sp.second);
  }

  double at(std::int64_t k) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), k);
    if (it == starts_.begin()) return 0.0;
    const std::size_t i = static_cast<std::size_t>(it - starts_.begin()) - 1;
    if (k > ends_[i]) return 0.0;
    return values_[offsets_[i] + static_cast<std::size_t>(k - starts_[i])];
  }

private:
  std::vector<std::int64_t> starts_, ends_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

} // namespace

double second_order_time_average(const GaborFilter& f, double p, const GaborFilter& f2,
                                 double p2, const PointPattern& pattern, double h) {
  const double s = f.scale, s2 = f2.scale;
  if (h <= 0.0 || h * 256.0 > std::min(s, s2) * kGridSlack)
    throw std::invalid_argument(
        "second_order_time_average: grid step must satisfy h <= min(s, s') / 256");
  const double margin = std::max(s, s2);
  if (pattern.horizon < 10.0 * margin)
    throw std::invalid_argument("second_order_time_average: horizon must be >= 10 * max scale");

  // u on the fine grid where it can be nonzero.
  const FineGridField u(f, p, pattern, h, s);

  // Outer grid step: a multiple of h not larger than s'/8, so every
  // quadrature node t - i h lands exactly on the fine grid.
  const std::int64_t mult = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(s2 / (8.0 * h))));
  const double h2 = static_cast<double>(mult) * h;
  const GridRange range = grid_range(margin, pattern.horizon - margin, h2);
  if (range.count() <= 0)
    throw std::invalid_argument("second_order_time_average: empty grid range");

  // Quadrature table for g' on the fine grid (trapezoid; endpoints vanish).
  const auto n2 = static_cast<std::int64_t>(std::llround(s2 / h));
  std::vector<std::complex<double>> g2_tab(static_cast<std::size_t>(n2));
  for (std::int64_t i = 1; i < n2; ++i)
    g2_tab[static_cast<std::size_t>(i)] = gabor_eval(f2, static_cast<double>(i) * h);

  const auto outer = response_indices(pattern, s + s2, h2, range);
  std::vector<double> terms;
  terms.reserve(outer.size());
  for (std::int64_t k2 : outer) {
    const std::int64_t base = k2 * mult;
    double re = 0.0, im = 0.0;
    for (std::int64_t i = 1; i < n2; ++i) {
      const double ui = u.at(base - i);
      if (ui == 0.0) continue;
      const auto& g = g2_tab[static_cast<std::size_t>(i)];
      re += ui * g.real();
      im += ui * g.imag();
    }
    re *= h;
    im *= h;
    terms.push_back(power_of_modulus(std::sqrt(re * re + im * im), p2));
  }
  return par::pairwise_sum(terms) / static_cast<double>(range.count());
}

MomentEstimate second_order_invariant(const GaborFilter& f, double p, const GaborFilter& f2,
                                      double p2, const PointPattern& pattern, double h) {
  return {second_order_time_average(f, p, f2, p2, pattern, h), 0.0, 1, EstimatorKind::SecondOrder};
}

MomentEstimate second_order_invariant_mc(const GaborFilter& f, double p, const GaborFilter& f2,
                                         double p2, const PatternGenerator& generator,
                                         int n_replicates, std::uint64_t seed, par::Exec exec) {
  if (n_replicates < 2)
    throw std::invalid_argument("second_order_invariant_mc: need at least 2 replicates");
  const double h = std::min(f.scale, f2.scale) / 256.0;
  const auto values = replicate_values(n_replicates, seed, exec, [&](Rng& rng) {
    const PointPattern pattern = generator(rng);
    return second_order_time_average(f, p, f2, p2, pattern, h);
  });
  return reduce_replicates(values, EstimatorKind::SecondOrder);
}

std::complex<double> conv_at_path(const GaborFilter& f, const SamplePath& path, double t) {
  const double s = f.scale;
  const double step = path.step;
  if (step * 256.0 > s * kGridSlack)
    throw std::invalid_argument("conv_at_path: path grid must satisfy step <= scale / 256");
  const auto n = static_cast<std::int64_t>(path.values.size()) - 1;
  auto i_lo = static_cast<std::int64_t>(std::ceil((t - s) / step - 1e-9));
  auto i_hi = static_cast<std::int64_t>(std::ceil(t / step - 1e-9)) - 1;
  i_lo = std::max<std::int64_t>(i_lo, 0);
  i_hi = std::min<std::int64_t>(i_hi, n - 1);
  double re = 0.0, im = 0.0;
  for (std::int64_t i = i_lo; i <= i_hi; ++i) {
    const double dt = t - static_cast<double>(i) * step;
    const double mag = f.window(dt / s);
    if (mag == 0.0) continue;
    const double dx = path.values[static_cast<std::size_t>(i + 1)] -
                      path.values[static_cast<std::size_t>(i)];
    const double phase = f.freq * dt;
    re += mag * std::cos(phase) * dx;
    im += mag * std::sin(phase) * dx;
  }
  return {re, im};
}

MomentEstimate first_order_invariant_path(const GaborFilter& f, double p,
                                          const PathGenerator& generator, int n_replicates,
                                          std::uint64_t seed, par::Exec exec) {
  if (n_replicates < 2)
    throw std::invalid_argument("first_order_invariant_path: need at least 2 replicates");
  const auto values = replicate_values(n_replicates, seed, exec, [&](Rng& rng) {
    const SamplePath path = generator(rng);
    const double t = static_cast<double>(path.values.size() - 1) * path.step;
    return power_of_modulus(modulus(conv_at_path(f, path, t)), p);
  });
  return reduce_replicates(values, EstimatorKind::InvariantTimeAverage);
}

SweepEstimates invariant_sweep(std::span<const GaborFilter> filters, std::span<const double> ps,
                               const PatternGenerator& generator, int n_replicates,
                               std::uint64_t seed, par::Exec exec) {
  if (n_replicates < 2) throw std::invalid_argument("invariant_sweep: need at least 2 replicates");
  const std::size_t nf = filters.size(), np = ps.size();
  // cell(filter, p, replicate)
  std::vector<std::vector<std::vector<double>>> cells(
      nf, std::vector<std::vector<double>>(np, std::vector<double>(n_replicates)));
  par::for_index(n_replicates, exec, [&](std::int64_t r) {
    Rng rng(derive_seed(seed, seed_domain::estimator, static_cast<std::uint64_t>(r)));
    const PointPattern pattern = generator(rng);
    for (std::size_t i = 0; i < nf; ++i) {
      const GaborFilter& f = filters[i];
      if (pattern.horizon < 10.0 * f.scale)
        throw std::invalid_argument("invariant_sweep: horizon must be >= 10 * scale");
      const auto vals = time_average_moments(f, ps, pattern, f.scale / 8.0, f.scale,
                                             pattern.horizon - f.scale);
      for (std::size_t j = 0; j < np; ++j) cells[i][j][static_cast<std::size_t>(r)] = vals[j];
    }
  });
  SweepEstimates out;
  out.at.resize(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    out.at[i].resize(np);
    for (std::size_t j = 0; j < np; ++j)
      out.at[i][j] = reduce_replicates(cells[i][j], EstimatorKind::InvariantTimeAverage);
  }
  return out;
}

SweepEstimates pointwise_sweep(std::span<const GaborFilter> filters, double p,
                               const PatternGenerator& generator, std::span<const double> ts,
                               int n_replicates, std::uint64_t seed, par::Exec exec) {
  if (n_replicates < 2) throw std::invalid_argument("pointwise_sweep: need at least 2 replicates");
  const std::size_t nf = filters.size(), nt = ts.size();
  std::vector<std::vector<std::vector<double>>> cells(
      nf, std::vector<std::vector<double>>(nt, std::vector<double>(n_replicates)));
  par::for_index(n_replicates, exec, [&](std::int64_t r) {
    Rng rng(derive_seed(seed, seed_domain::estimator, static_cast<std::uint64_t>(r)));
    const PointPattern pattern = generator(rng);
    for (std::size_t i = 0; i < nf; ++i)
      for (std::size_t j = 0; j < nt; ++j)
        cells[i][j][static_cast<std::size_t>(r)] =
            power_of_modulus(modulus(conv_at(filters[i], pattern, ts[j])), p);
  });
  SweepEstimates out;
  out.at.resize(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    out.at[i].resize(nt);
    for (std::size_t j = 0; j < nt; ++j)
      out.at[i][j] = reduce_replicates(cells[i][j], EstimatorKind::PointwiseMC);
  }
  return out;
}

SweepEstimates path_sweep(std::span<const GaborFilter> filters, std::span<const double> ps,
                          const PathGenerator& generator, int n_replicates, std::uint64_t seed,
                          par::Exec exec) {
  if (n_replicates < 2) throw std::invalid_argument("path_sweep: need at least 2 replicates");
  const std::size_t nf = filters.size(), np = ps.size();
  std::vector<std::vector<std::vector<double>>> cells(
      nf, std::vector<std::vector<double>>(np, std::vector<double>(n_replicates)));
  par::for_index(n_replicates, exec, [&](std::int64_t r) {
    Rng rng(derive_seed(seed, seed_domain::estimator, static_cast<std::uint64_t>(r)));
    const SamplePath path = generator(rng);
    const double t = static_cast<double>(path.values.size() - 1) * path.step;
    for (std::size_t i = 0; i < nf; ++i) {
      const double m = modulus(conv_at_path(filters[i], path, t));
      for (std::size_t j = 0; j < np; ++j)
        cells[i][j][static_cast<std::size_t>(r)] = power_of_modulus(m, ps[j]);
    }
  });
  SweepEstimates out;
  out.at.resize(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    out.at[i].resize(np);
    for (std::size_t j = 0; j < np; ++j)
      out.at[i][j] = reduce_replicates(cells[i][j], EstimatorKind::InvariantTimeAverage);
  }
  return out;
}

} // namespace scatter
