#include "scatter/presets.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "scatter/scattering.hpp"
#include "scatter/stats.hpp"
#include "scatter/theory.hpp"

namespace scatter {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;

struct PresetContext {
  std::uint64_t seed = 0;
  WindowFunction window = WindowFunction::smooth_bump();
  std::vector<io::ResultRow> rows;
  std::vector<CriterionCheck> checks;
  json extra = json::object();

  double w1() const { return window_pnorm(window, 1.0); }
  double w2() const { return window_pnorm(window, 2.0); }

  void check_rel(const std::string& id, const std::string& what, double value, double target,
                 double rel_tol) {
    CriterionCheck c;
    c.id = id;
    c.description = what;
    c.value = value;
    c.target = target;
    c.tolerance = rel_tol * std::fabs(target);
    c.pass = std::fabs(value - target) <= c.tolerance;
    checks.push_back(c);
  }

  void check_flag(const std::string& id, const std::string& what, bool pass, double value = 0.0,
                  double target = 0.0) {
    checks.push_back({id, what, pass, value, target, 0.0});
  }
};

std::vector<double> dyadic_ladder(double s_max, int count) {
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = s_max * std::pow(2.0, -k);
  return out;
}

std::vector<double> half_octave_ladder(double s_max, int count) {
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k)
    out[static_cast<std::size_t>(k)] = s_max * std::pow(2.0, -0.5 * k);
  return out;
}

io::ResultRow first_order_row(const std::string& process, double p, const GaborFilter& f,
                              const MomentEstimate& est, double predicted, double normalizer) {
  io::ResultRow row;
  row.process = process;
  row.p = p;
  row.s = f.scale;
  row.xi = f.freq;
  row.estimate = est.value;
  row.std_error = est.std_error;
  row.n = est.n_replicates;
  row.predicted = predicted;
  row.normalizer = normalizer;
  return row;
}

// ---------------------------------------------------------------------------
// fig1: three homogeneous compound processes with the same intensity.
// ---------------------------------------------------------------------------
void preset_fig1(PresetContext& ctx) {
  const double lambda0 = 0.01;
  const double horizon = 1.0e6;
  const int n_replicates = 8;
  const auto scales = dyadic_ladder(32.0, 14);
  Rng freq_rng(derive_seed(ctx.seed, seed_domain::frequency, 0));
  const double xi = sample_frequency(freq_rng);

  std::vector<GaborFilter> filters;
  for (double s : scales) filters.push_back({s, xi, ctx.window});
  const std::vector<double> ps = {1.0, 2.0};

  struct Process {
    std::string name;
    ChargeDistribution charges;
  };
  const std::vector<Process> processes = {
      {"ordinary", ChargeDistribution::constant(1.0)},
      {"gaussian", ChargeDistribution::gaussian(kPi / 2.0)},
      {"rademacher", ChargeDistribution::rademacher()},
  };

  const double s_min = scales.back();
  // normalized estimate and its std error at the smallest scale, [process][p]
  double value[3][2], noise[3][2];

  for (std::size_t ip = 0; ip < processes.size(); ++ip) {
    const auto& proc = processes[ip];
    const PatternGenerator generator = [lambda0, horizon, &proc](Rng& rng) {
      return attach_charges(simulate_homogeneous(lambda0, horizon, rng), proc.charges, rng);
    };
    const auto sweep = invariant_sweep(filters, ps, generator, n_replicates,
                                       derive_seed(ctx.seed, seed_domain::process, ip));
    for (std::size_t i = 0; i < filters.size(); ++i)
      for (std::size_t j = 0; j < ps.size(); ++j) {
        const double norm = filters[i].scale * window_pnorm(ctx.window, ps[j]);
        const double predicted = lambda0 * proc.charges.abs_moment(ps[j]) * norm;
        ctx.rows.push_back(
            first_order_row(proc.name, ps[j], filters[i], sweep.at[i][j], predicted, norm));
        if (filters[i].scale == s_min) {
          value[ip][j] = sweep.at[i][j].value / norm;
          noise[ip][j] = sweep.at[i][j].std_error / norm;
        }
      }
  }

  for (std::size_t ip = 0; ip < processes.size(); ++ip)
    ctx.check_rel("fig1-p1-" + processes[ip].name,
                  "normalized p=1 moment at the smallest scale", value[ip][0], lambda0, 0.10);
  ctx.check_rel("fig1-p2-ordinary", "normalized p=2 moment, unit charges", value[0][1], lambda0,
                0.10);
  ctx.check_rel("fig1-p2-rademacher", "normalized p=2 moment, Rademacher charges", value[2][1],
                lambda0, 0.10);
  ctx.check_rel("fig1-p2-gaussian", "normalized p=2 moment, Gaussian charges", value[1][1],
                lambda0 * kPi / 2.0, 0.10);

  const double separation = std::fabs(value[1][1] - value[0][1]);
  const double joint = 3.0 * std::hypot(noise[1][1], noise[0][1]);
  ctx.check_flag("fig1-p2-separation",
                 "Gaussian p=2 moment separated from unit charges by > 3 joint sigma",
                 separation > joint, separation, joint);
}

// ---------------------------------------------------------------------------
// fig3: different intensities and Gaussian variances, same p=1 moments.
// ---------------------------------------------------------------------------
void preset_fig3(PresetContext& ctx) {
  const double horizon = 1.0e6;
  const int n_replicates = 8;
  const auto scales = dyadic_ladder(32.0, 14);
  Rng freq_rng(derive_seed(ctx.seed, seed_domain::frequency, 0));
  const double xi = sample_frequency(freq_rng);

  std::vector<GaborFilter> filters;
  for (double s : scales) filters.push_back({s, xi, ctx.window});
  const std::vector<double> ps = {1.0, 2.0};

  struct Process {
    std::string name;
    double lambda;
    ChargeDistribution charges;
  };
  const std::vector<Process> processes = {
      {"gauss-var1", 0.01, ChargeDistribution::gaussian(1.0)},
      {"gauss-var2", 0.01 / std::sqrt(2.0), ChargeDistribution::gaussian(2.0)},
  };

  const double s_min = scales.back();
  double value[2][2], noise[2][2];

  for (std::size_t ip = 0; ip < processes.size(); ++ip) {
    const auto& proc = processes[ip];
    const PatternGenerator generator = [&proc, horizon](Rng& rng) {
      return attach_charges(simulate_homogeneous(proc.lambda, horizon, rng), proc.charges, rng);
    };
    const auto sweep = invariant_sweep(filters, ps, generator, n_replicates,
                                       derive_seed(ctx.seed, seed_domain::process, ip));
    for (std::size_t i = 0; i < filters.size(); ++i)
      for (std::size_t j = 0; j < ps.size(); ++j) {
        const double norm = filters[i].scale * window_pnorm(ctx.window, ps[j]);
        const double predicted = proc.lambda * proc.charges.abs_moment(ps[j]) * norm;
        ctx.rows.push_back(
            first_order_row(proc.name, ps[j], filters[i], sweep.at[i][j], predicted, norm));
        if (filters[i].scale == s_min) {
          value[ip][j] = sweep.at[i][j].value / norm;
          noise[ip][j] = sweep.at[i][j].std_error / norm;
        }
      }
  }

  const double target_p1 = 0.01 * std::sqrt(2.0 / kPi); // 0.00798
  ctx.check_rel("fig3-p1-var1", "normalized p=1 moment, lambda=0.01, N(0,1)", value[0][0],
                target_p1, 0.10);
  ctx.check_rel("fig3-p1-var2", "normalized p=1 moment, lambda=0.01/sqrt(2), N(0,2)", value[1][0],
                target_p1, 0.10);
  const double gap = std::fabs(value[0][0] - value[1][0]);
  const double joint_p1 = 3.0 * std::hypot(noise[0][0], noise[1][0]);
  ctx.check_flag("fig3-p1-agreement", "p=1 moments agree within 3 joint sigma", gap <= joint_p1,
                 gap, joint_p1);

  ctx.check_rel("fig3-p2-var1", "normalized p=2 moment, lambda=0.01, N(0,1)", value[0][1], 0.01,
                0.10);
  ctx.check_rel("fig3-p2-var2", "normalized p=2 moment, lambda=0.01/sqrt(2), N(0,2)", value[1][1],
                0.01 * std::sqrt(2.0), 0.10);
  const double sep = std::fabs(value[0][1] - value[1][1]);
  const double joint_p2 = 3.0 * std::hypot(noise[0][1], noise[1][1]);
  ctx.check_flag("fig3-p2-separation", "p=2 moments separated by > 3 joint sigma", sep > joint_p2,
                 sep, joint_p2);
}

// ---------------------------------------------------------------------------
// fig4: pointwise moments of an inhomogeneous process recover lambda(t).
// ---------------------------------------------------------------------------
void preset_fig4(PresetContext& ctx) {
  const double period = 65536.0;
  const IntensityModel intensity = IntensityModel::sinusoidal(0.01, 0.5, period, period);
  const int n_replicates = 1000;
  const double p = 1.0;
  // Fixed small frequency: the criterion tolerance needs coherent phases at
  // the scales where 1000 replicates control the Monte Carlo noise.
  const double xi = 2.0 * kPi / 8192.0;
  const auto scales = dyadic_ladder(512.0, 14);

  std::vector<GaborFilter> filters;
  for (double s : scales) filters.push_back({s, xi, ctx.window});
  const std::vector<double> ts = {period / 4.0, period / 2.0, 3.0 * period / 4.0};
  const std::vector<double> targets = {0.015, 0.010, 0.005};

  const PatternGenerator generator = [&intensity](Rng& rng) {
    return simulate_inhomogeneous(intensity, rng);
  };
  const auto sweep = pointwise_sweep(filters, p, generator, ts, n_replicates,
                                     derive_seed(ctx.seed, seed_domain::process, 4));

  const double w1 = ctx.w1();
  for (std::size_t i = 0; i < filters.size(); ++i)
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const double norm = filters[i].scale * w1;
      io::ResultRow row = first_order_row("sinusoidal@t=" + io::format_double(ts[j]), p,
                                          filters[i], sweep.at[i][j],
                                          intensity.lambda(ts[j]) * norm, norm);
      ctx.rows.push_back(row);
    }

  // Criterion scale per location: the finest scale whose relative noise is
  // below 1/40; coarser scales are kept in the CSV for the convergence plot.
  for (std::size_t j = 0; j < ts.size(); ++j) {
    int chosen = -1;
    for (std::size_t i = 0; i < filters.size(); ++i) {
      const auto& est = sweep.at[i][j];
      if (est.value > 0.0 && est.std_error <= est.value / 40.0) chosen = static_cast<int>(i);
    }
    const std::string id = "fig4-t" + std::to_string(j + 1);
    if (chosen < 0) {
      ctx.check_flag(id, "no scale with relative noise below 1/40", false);
      continue;
    }
    const auto& est = sweep.at[static_cast<std::size_t>(chosen)][j];
    const double norm = filters[static_cast<std::size_t>(chosen)].scale * w1;
    ctx.check_rel(id,
                  "normalized pointwise moment at t" + std::to_string(j + 1) +
                      " (scale " + io::format_double(filters[static_cast<std::size_t>(chosen)].scale) + ")",
                  est.value / norm, targets[j], 0.10);
  }
}

// ---------------------------------------------------------------------------
// fig5: Brownian motion against an ordinary Poisson process, slopes in s.
// ---------------------------------------------------------------------------
void preset_fig5(PresetContext& ctx) {
  Rng freq_rng(derive_seed(ctx.seed, seed_domain::frequency, 0));
  const double xi = sample_frequency(freq_rng);
  const auto scales = dyadic_ladder(0.5, 6);
  std::vector<GaborFilter> filters;
  for (double s : scales) filters.push_back({s, xi, ctx.window});
  const std::vector<double> ps = {1.0, 2.0};

  const double w1 = ctx.w1(), w2 = ctx.w2();
  const double e_abs_z = std::sqrt(2.0 / kPi);

  // Brownian side: paths on [0, 1] with 2^14 cells (= smallest scale / 256).
  {
    const std::size_t n = 1 << 14;
    const double step = 1.0 / static_cast<double>(n);
    const PathGenerator generator = [n, step](Rng& rng) {
      return simulate_fbm(0.5, n, step, rng);
    };
    const auto sweep = path_sweep(filters, ps, generator, 400,
                                  derive_seed(ctx.seed, seed_domain::process, 0));
    for (std::size_t i = 0; i < filters.size(); ++i) {
      const double s = filters[i].scale;
      ctx.rows.push_back(first_order_row("bm", 1.0, filters[i], sweep.at[i][0],
                                         std::sqrt(s) * std::sqrt(w2) * e_abs_z,
                                         std::sqrt(w2) * e_abs_z));
      ctx.rows.push_back(first_order_row("bm", 2.0, filters[i], sweep.at[i][1], s * w2, w2));
    }
  }

  // Poisson side: lambda = 0.01, constant charge 10.
  {
    const double lambda0 = 0.01, horizon = 1.0e6;
    const ChargeDistribution charges = ChargeDistribution::constant(10.0);
    const PatternGenerator generator = [lambda0, horizon, &charges](Rng& rng) {
      return attach_charges(simulate_homogeneous(lambda0, horizon, rng), charges, rng);
    };
    const auto sweep = invariant_sweep(filters, ps, generator, 4,
                                       derive_seed(ctx.seed, seed_domain::process, 1));
    for (std::size_t i = 0; i < filters.size(); ++i) {
      const double s = filters[i].scale;
      ctx.rows.push_back(first_order_row("poisson", 1.0, filters[i], sweep.at[i][0],
                                         lambda0 * 10.0 * s * w1, lambda0 * 10.0 * w1));
      ctx.rows.push_back(first_order_row("poisson", 2.0, filters[i], sweep.at[i][1],
                                         lambda0 * 100.0 * s * w2, w2));
    }
  }

  const auto slope_of = [&](const std::string& process, double p) {
    std::vector<double> x, y, rel;
    for (const auto& row : ctx.rows)
      if (row.process == process && row.p == p && !row.p2) {
        x.push_back(row.s);
        y.push_back(row.estimate);
        rel.push_back(row.estimate > 0.0 ? row.std_error / row.estimate : 1e9);
      }
    return stats::fit_loglog_slope(x, y, rel);
  };

  const auto bm1 = slope_of("bm", 1.0);
  const auto bm2 = slope_of("bm", 2.0);
  const auto po1 = slope_of("poisson", 1.0);
  const auto po2 = slope_of("poisson", 2.0);
  ctx.check_rel("fig5-slope-bm-p1", "log-log slope of the p=1 moment, Brownian motion", bm1.slope,
                0.5, 0.2);
  ctx.check_rel("fig5-slope-poisson-p1", "log-log slope of the p=1 moment, Poisson", po1.slope,
                1.0, 0.1);
  ctx.check_rel("fig5-slope-bm-p2", "log-log slope of the p=2 moment, Brownian motion", bm2.slope,
                1.0, 0.1);
  ctx.check_rel("fig5-slope-poisson-p2", "log-log slope of the p=2 moment, Poisson", po2.slope,
                1.0, 0.1);
  ctx.extra["slopes"] = {{"bm_p1", bm1.slope},
                         {"bm_p2", bm2.slope},
                         {"poisson_p1", po1.slope},
                         {"poisson_p2", po2.slope}};
}

// ---------------------------------------------------------------------------
// thm41: second-order moments against K * lambda * E|A|^q.
// ---------------------------------------------------------------------------
void preset_thm41(PresetContext& ctx) {
  const double lambda0 = 0.01, horizon = 262144.0;
  const double p = 1.0, p2 = 2.0, c = 1.0, L = 0.0;
  const int n_replicates = 8;
  const std::vector<double> scales = {8.0, 4.0, 2.0, 1.0};

  const auto K = theory::predict_second_order_K(p, p2, c, L, ctx.window);
  const double q_moment = 1.0; // unit charges, E|A|^{p p'} = 1
  const PatternGenerator generator = [lambda0, horizon](Rng& rng) {
    return simulate_homogeneous(lambda0, horizon, rng);
  };

  double finest_norm = 0.0;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double s = scales[i];
    const GaborFilter f{s, 0.0, ctx.window};
    const GaborFilter f2{c * s, 0.0, ctx.window};
    const auto est = second_order_invariant_mc(f, p, f2, p2, generator, n_replicates,
                                               derive_seed(ctx.seed, seed_domain::process, i));
    const double norm = std::pow(s, p2 + 1.0);
    io::ResultRow row;
    row.process = "poisson";
    row.p = p;
    row.p2 = p2;
    row.s = s;
    row.xi = 0.0;
    row.s2 = c * s;
    row.xi2 = 0.0;
    row.estimate = est.value;
    row.std_error = est.std_error;
    row.n = est.n_replicates;
    row.predicted = K.value * lambda0 * q_moment * norm;
    row.normalizer = norm;
    ctx.rows.push_back(row);
    if (i + 1 == scales.size()) finest_norm = est.value / norm;
  }

  ctx.check_rel("thm41-limit", "normalized second-order moment at the finest scale",
                finest_norm, K.value * lambda0 * q_moment, 0.15);

  // Charge homogeneity: doubling every charge multiplies the estimate by
  // 2^(p p') exactly, on the same realization and grid.
  {
    Rng rng(derive_seed(ctx.seed, seed_domain::process, 0xC0));
    PointPattern base = simulate_homogeneous(lambda0, 16384.0, rng);
    PointPattern doubled = base;
    for (auto& a : doubled.charges) a *= 2.0;
    const GaborFilter f{2.0, 0.0, ctx.window};
    const GaborFilter f2{2.0, 0.0, ctx.window};
    const double h = 2.0 / 256.0;
    const double v1 = second_order_time_average(f, p, f2, p2, base, h);
    const double v2 = second_order_time_average(f, p, f2, p2, doubled, h);
    ctx.check_flag("thm41-homogeneity",
                   "charges x2 scale the second-order estimate by exactly 2^(p p')",
                   v2 == 4.0 * v1, v2, 4.0 * v1);
  }
  ctx.extra["K"] = K.value;
}

// ---------------------------------------------------------------------------
// thm31-err: decay exponent of the expansion error.
// ---------------------------------------------------------------------------
void preset_thm31_err(PresetContext& ctx) {
  const IntensityModel intensity = IntensityModel::sinusoidal(0.5, 0.5, 8.0, 1.4);
  const ChargeDistribution charges = ChargeDistribution::constant(1.0);
  const double t = 1.4, p = 1.0, xi = 0.3;

  const auto run_order = [&](int m, int n_scales, double s_max, const std::string& tag) {
    std::vector<GaborFilter> ladder;
    for (double s : half_octave_ladder(s_max, n_scales)) ladder.push_back({s, xi, ctx.window});
    theory::ErrorDecayOptions opts;
    opts.n_mc_inner = 1000000;
    opts.min_replicates = 2000000;
    opts.max_replicates = 2000000;
    const auto decay =
        theory::taylor_error_decay(ladder, p, intensity, charges, t, m,
                                   derive_seed(ctx.seed, seed_domain::process,
                                               static_cast<std::uint64_t>(m)),
                                   opts);
    for (const auto& pt : decay.points) {
      io::ResultRow row;
      row.process = tag;
      row.p = p;
      row.s = pt.scale;
      row.xi = xi;
      row.estimate = pt.error;
      row.std_error = pt.noise;
      row.n = pt.n_replicates;
      row.predicted = 0.0;
      row.normalizer = 1.0;
      ctx.rows.push_back(row);
    }
    const double floor_slope = static_cast<double>(m + 1) - 0.3;
    ctx.check_flag("thm31-slope-m" + std::to_string(m),
                   "error-decay slope >= " + io::format_double(floor_slope) + " for " + tag,
                   decay.fit.slope >= floor_slope, decay.fit.slope, floor_slope);
    ctx.extra["slope_m" + std::to_string(m)] = decay.fit.slope;
    ctx.extra["excluded_m" + std::to_string(m)] = decay.fit.excluded_x.size();
  };

  run_order(1, 7, 0.64, "taylor-m1");
  run_order(2, 6, 0.32, "taylor-m2");
}

// ---------------------------------------------------------------------------
// thm33: second-moment expansion of a periodic intensity.
// ---------------------------------------------------------------------------
void preset_thm33(PresetContext& ctx) {
  const double period = 4096.0;
  const int horizon_periods = 16;
  const IntensityModel intensity =
      IntensityModel::sinusoidal(0.01, 0.5, period, period * horizon_periods);
  const ChargeDistribution charges = ChargeDistribution::constant(1.0);
  const double p = 2.0, L = 0.0;
  const auto scales = half_octave_ladder(256.0, 7);

  theory::Thm33Options opts;
  opts.n_replicates = 32;
  opts.horizon_periods = horizon_periods;
  const auto result = theory::thm33_sides(scales, p, intensity, charges, L,
                                          derive_seed(ctx.seed, seed_domain::process, 33), opts);

  for (const auto& pt : result.points) {
    io::ResultRow row;
    row.process = "sinusoidal-lhs";
    row.p = p;
    row.s = pt.scale;
    row.xi = L / pt.scale;
    row.estimate = pt.lhs;
    row.std_error = pt.std_error;
    row.n = opts.n_replicates;
    row.predicted = result.rhs.value;
    row.normalizer = 1.0;
    ctx.rows.push_back(row);
  }

  int chosen = -1;
  for (std::size_t i = 0; i < result.points.size(); ++i)
    if (result.points[i].usable) chosen = static_cast<int>(i);
  if (chosen < 0) {
    ctx.check_flag("thm33-limit", "no scale with acceptable noise", false);
  } else {
    const auto& pt = result.points[static_cast<std::size_t>(chosen)];
    ctx.check_rel("thm33-limit",
                  "second-moment expansion at the finest usable scale (s = " +
                      io::format_double(pt.scale) + ")",
                  pt.lhs, result.rhs.value, 0.15);
  }
  ctx.extra["rhs"] = result.rhs.value;
  ctx.extra["rhs_tolerance"] = result.rhs.tolerance;
}

// ---------------------------------------------------------------------------
// thm51: alpha-stable scaling exponent and limit value.
// ---------------------------------------------------------------------------
void preset_thm51(PresetContext& ctx) {
  const double alpha = 1.5, p = 1.0;
  const std::size_t n = 4096;
  const double step = 1.0 / static_cast<double>(n);
  const int n_replicates = 40000;
  Rng freq_rng(derive_seed(ctx.seed, seed_domain::frequency, 0));
  const double xi = sample_frequency(freq_rng);
  const auto scales = half_octave_ladder(0.5, 7);

  std::vector<GaborFilter> filters;
  for (double s : scales) filters.push_back({s, xi, ctx.window});
  const std::vector<double> ps = {p};

  const PathGenerator generator = [alpha, n, step](Rng& rng) {
    return simulate_alpha_stable(alpha, n, step, rng);
  };
  const auto sweep = path_sweep(filters, ps, generator, n_replicates,
                                derive_seed(ctx.seed, seed_domain::process, 51));

  const auto oracle =
      theory::predict_selfsim(SamplePath::Kind::AlphaStable, alpha, p, 0.0, ctx.window, 40000,
                              derive_seed(ctx.seed, seed_domain::oracle, 51), n);

  const double exponent = p / alpha;
  std::vector<double> x, y, rel;
  for (std::size_t i = 0; i < filters.size(); ++i) {
    const double s = filters[i].scale;
    const auto& est = sweep.at[i][0];
    ctx.rows.push_back(first_order_row("alpha_stable", p, filters[i], est,
                                       oracle.value * std::pow(s, exponent),
                                       std::pow(s, exponent)));
    x.push_back(s);
    y.push_back(est.value);
    rel.push_back(est.value > 0.0 ? est.std_error / est.value : 1e9);
  }

  const auto fit = stats::fit_loglog_slope(x, y, rel);
  ctx.check_rel("thm51-slope", "log-log slope of the p=1 stable moment", fit.slope, exponent,
                0.15);

  const double s_min = scales.back();
  const auto& finest = sweep.at[filters.size() - 1][0];
  ctx.check_rel("thm51-limit", "normalized moment at the finest scale against the oracle",
                finest.value / std::pow(s_min, exponent), oracle.value, 0.15);
  ctx.extra["slope"] = fit.slope;
  ctx.extra["oracle"] = oracle.value;
  ctx.extra["oracle_tolerance"] = oracle.tolerance;
}

} // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1",  "fig3",      "fig4", "fig5",
                                                 "thm41", "thm31-err", "thm33", "thm51"};
  return names;
}

PresetResult run_preset(const std::string& name, std::uint64_t seed, const std::string& out_dir) {
  PresetContext ctx;
  ctx.seed = seed;

  const auto started = std::chrono::steady_clock::now();
  if (name == "fig1")
    preset_fig1(ctx);
  else if (name == "fig3")
    preset_fig3(ctx);
  else if (name == "fig4")
    preset_fig4(ctx);
  else if (name == "fig5")
    preset_fig5(ctx);
  else if (name == "thm41")
    preset_thm41(ctx);
  else if (name == "thm31-err")
    preset_thm31_err(ctx);
  else if (name == "thm33")
    preset_thm33(ctx);
  else if (name == "thm51")
    preset_thm51(ctx);
  else
    throw std::invalid_argument("unknown preset: " + name);
  const auto finished = std::chrono::steady_clock::now();

  PresetResult result;
  result.name = name;
  result.seed = seed;
  result.rows = std::move(ctx.rows);
  result.checks = std::move(ctx.checks);
  result.runtime_seconds = std::chrono::duration<double>(finished - started).count();

  if (name == "fig1") {
    CriterionCheck c;
    c.id = "fig1-runtime";
    c.description = "runtime below 5 minutes";
    c.value = result.runtime_seconds;
    c.target = 300.0;
    c.tolerance = 0.0;
    c.pass = result.runtime_seconds < 300.0;
    result.checks.push_back(c);
  }

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path base = std::filesystem::path(out_dir) / name;
  result.csv_path = base.string() + ".csv";
  io::write_text_file(result.csv_path, io::to_csv(result.rows));

  json summary;
  summary["preset"] = name;
  summary["seed"] = seed;
  summary["runtime_seconds"] = result.runtime_seconds;
  summary["rows"] = result.rows.size();
  summary["estimator"] = name == "fig4" ? "pointwise" : (name == "fig5" || name == "thm51"
                                                             ? "path / invariant"
                                                             : "invariant");
  summary["checks"] = json::array();
  for (const auto& c : result.checks) {
    json jc;
    jc["id"] = c.id;
    jc["description"] = c.description;
    jc["pass"] = c.pass;
    jc["value"] = c.value;
    jc["target"] = c.target;
    jc["tolerance"] = c.tolerance;
    summary["checks"].push_back(jc);
  }
  for (auto it = ctx.extra.begin(); it != ctx.extra.end(); ++it) summary[it.key()] = it.value();
  summary["all_pass"] = result.all_pass();
  result.summary_path = base.string() + ".summary.json";
  io::write_text_file(result.summary_path, summary.dump(2) + "\n");
  return result;
}

} // namespace scatter
