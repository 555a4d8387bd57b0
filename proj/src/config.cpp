#include "scatter/config.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "scatter/scattering.hpp"
#include "scatter/theory.hpp"

namespace scatter {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

std::string ConfigError::join(const std::vector<std::string>& problems) {
  std::ostringstream os;
  os << "invalid config:";
  for (const auto& p : problems) os << "\n  " << p;
  return os.str();
}

namespace {

class Checker {
public:
  explicit Checker(const json& root) : root_(root) {}

  bool has(const std::string& pointer) const {
    return root_.contains(json::json_pointer(pointer));
  }

  template <class T>
  std::optional<T> get(const std::string& pointer) {
    const json::json_pointer jp(pointer);
    if (!root_.contains(jp)) return std::nullopt;
    try {
      return root_.at(jp).get<T>();
    } catch (const std::exception&) {
      problems.push_back(pointer + ": wrong type");
      return std::nullopt;
    }
  }

  template <class T>
  T require(const std::string& pointer, T fallback) {
    if (!has(pointer)) {
      problems.push_back(pointer + ": missing");
      return fallback;
    }
    auto v = get<T>(pointer);
    return v ? *v : fallback;
  }

  std::vector<std::string> problems;

private:
  const json& root_;
};

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError({std::string("/: not valid JSON (") + e.what() + ")"});
  }

  Checker c(root);
  ExperimentConfig cfg;

  cfg.version = c.require<int>("/version", 1);
  if (cfg.version != 1) c.problems.push_back("/version: only version 1 is supported");

  if (auto s = c.get<std::uint64_t>("/seed")) cfg.seed = *s;
  if (auto s = c.get<std::string>("/name")) cfg.name = *s;
  if (auto s = c.get<std::string>("/out")) cfg.out = *s;

  const auto type = c.require<std::string>("/process/type", "poisson");
  if (type == "poisson") {
    cfg.process = ExperimentConfig::ProcessType::Poisson;
  } else if (type == "fbm") {
    cfg.process = ExperimentConfig::ProcessType::Fbm;
  } else if (type == "alpha_stable") {
    cfg.process = ExperimentConfig::ProcessType::AlphaStable;
  } else {
    c.problems.push_back("/process/type: must be poisson, fbm or alpha_stable");
  }

  if (cfg.process == ExperimentConfig::ProcessType::Poisson) {
    const auto kind = c.require<std::string>("/process/intensity/kind", "constant");
    if (kind == "constant") {
      cfg.intensity_kind = ExperimentConfig::IntensityKind::Constant;
      cfg.lambda0 = c.require<double>("/process/intensity/lambda0", 0.01);
      if (cfg.lambda0 <= 0.0) c.problems.push_back("/process/intensity/lambda0: must be > 0");
    } else if (kind == "sinusoidal") {
      cfg.intensity_kind = ExperimentConfig::IntensityKind::Sinusoidal;
      cfg.intensity_a = c.require<double>("/process/intensity/a", 0.01);
      cfg.intensity_b = c.require<double>("/process/intensity/b", 0.0);
      cfg.intensity_period = c.require<double>("/process/intensity/period", 1.0);
      if (cfg.intensity_a <= 0.0) c.problems.push_back("/process/intensity/a: must be > 0");
      if (std::fabs(cfg.intensity_b) >= 1.0)
        c.problems.push_back("/process/intensity/b: |b| must be < 1");
      if (cfg.intensity_period <= 0.0)
        c.problems.push_back("/process/intensity/period: must be > 0");
    } else {
      c.problems.push_back("/process/intensity/kind: must be constant or sinusoidal");
    }
    if (c.has("/process/charges")) {
      const auto ck = c.require<std::string>("/process/charges/kind", "constant");
      if (ck == "constant") {
        cfg.charge_kind = ExperimentConfig::ChargeKind::Constant;
        cfg.charge_value = c.require<double>("/process/charges/value", 1.0);
      } else if (ck == "gaussian") {
        cfg.charge_kind = ExperimentConfig::ChargeKind::Gaussian;
        cfg.charge_variance = c.require<double>("/process/charges/variance", 1.0);
        if (cfg.charge_variance <= 0.0)
          c.problems.push_back("/process/charges/variance: must be > 0");
      } else if (ck == "rademacher") {
        cfg.charge_kind = ExperimentConfig::ChargeKind::Rademacher;
      } else {
        c.problems.push_back("/process/charges/kind: must be constant, gaussian or rademacher");
      }
    }
  } else if (cfg.process == ExperimentConfig::ProcessType::Fbm) {
    cfg.hurst = c.require<double>("/process/hurst", 0.5);
    if (cfg.hurst <= 0.0 || cfg.hurst >= 1.0)
      c.problems.push_back("/process/hurst: must lie in (0, 1)");
  } else {
    cfg.alpha = c.require<double>("/process/alpha", 1.5);
    if (cfg.alpha <= 1.0 || cfg.alpha > 2.0)
      c.problems.push_back("/process/alpha: must lie in (1, 2]");
  }

  cfg.scales = c.require<std::vector<double>>("/filters/scales", {});
  if (cfg.scales.empty()) c.problems.push_back("/filters/scales: must be non-empty");
  for (std::size_t i = 0; i < cfg.scales.size(); ++i) {
    if (cfg.scales[i] <= 0.0) {
      c.problems.push_back("/filters/scales: entries must be > 0");
      break;
    }
    if (i > 0 && cfg.scales[i] >= cfg.scales[i - 1]) {
      c.problems.push_back("/filters/scales: must be strictly decreasing");
      break;
    }
  }
  if (c.has("/filters/xi")) {
    const auto& xi = root.at(json::json_pointer("/filters/xi"));
    if (xi.is_string() && xi.get<std::string>() == "sample")
      cfg.xi_sampled = true;
    else if (xi.is_number())
      cfg.xi = xi.get<double>();
    else
      c.problems.push_back("/filters/xi: must be a number or \"sample\"");
  }

  const auto moments = c.require<json>("/moments", json::array());
  if (!moments.is_array() || moments.empty()) {
    c.problems.push_back("/moments: must be a non-empty array");
  } else {
    for (std::size_t i = 0; i < moments.size(); ++i) {
      const std::string base = "/moments/" + std::to_string(i);
      ExperimentConfig::MomentSpec ms;
      ms.p = c.require<double>(base + "/p", 1.0);
      if (ms.p < 1.0) c.problems.push_back(base + "/p: must be >= 1");
      if (c.has(base + "/p2")) {
        ms.p2 = c.require<double>(base + "/p2", 1.0);
        if (*ms.p2 < 1.0) c.problems.push_back(base + "/p2: must be >= 1");
        ms.c = c.has(base + "/c") ? c.require<double>(base + "/c", 1.0) : 1.0;
        if (ms.c <= 0.0) c.problems.push_back(base + "/c: must be > 0");
      }
      cfg.moments.push_back(ms);
    }
  }

  const auto est = c.has("/estimator/kind") ? c.require<std::string>("/estimator/kind", "invariant")
                                            : std::string("invariant");
  if (est == "invariant") {
    cfg.estimator = ExperimentConfig::EstimatorChoice::Invariant;
  } else if (est == "pointwise") {
    cfg.estimator = ExperimentConfig::EstimatorChoice::Pointwise;
    cfg.eval_times = c.require<std::vector<double>>("/estimator/t", {});
    if (cfg.eval_times.empty()) c.problems.push_back("/estimator/t: must be non-empty");
  } else if (est == "path") {
    cfg.estimator = ExperimentConfig::EstimatorChoice::Path;
  } else {
    c.problems.push_back("/estimator/kind: must be invariant, pointwise or path");
  }

  cfg.n_replicates = c.has("/n_replicates") ? c.require<int>("/n_replicates", 8) : 8;
  if (cfg.n_replicates < 2) c.problems.push_back("/n_replicates: must be >= 2");

  if (cfg.process == ExperimentConfig::ProcessType::Poisson) {
    cfg.horizon = c.require<double>("/horizon", 1.0e6);
    if (cfg.horizon <= 0.0) c.problems.push_back("/horizon: must be > 0");
    for (double s : cfg.scales)
      if (s >= cfg.horizon / 10.0) {
        c.problems.push_back("/filters/scales: every scale must be < horizon / 10");
        break;
      }
    if (cfg.estimator == ExperimentConfig::EstimatorChoice::Path)
      c.problems.push_back("/estimator/kind: path estimator needs a self-similar process");
  } else {
    if (cfg.estimator != ExperimentConfig::EstimatorChoice::Path)
      c.problems.push_back("/estimator/kind: self-similar processes use the path estimator");
    cfg.grid_n = static_cast<std::size_t>(
        c.has("/grid/n") ? c.require<int>("/grid/n", 4096) : 4096);
    if (cfg.grid_n < 256) c.problems.push_back("/grid/n: must be >= 256");
    if (cfg.process == ExperimentConfig::ProcessType::Fbm &&
        (cfg.grid_n & (cfg.grid_n - 1)) != 0)
      c.problems.push_back("/grid/n: must be a power of two for fbm");
    if (!cfg.scales.empty()) {
      const double step = 1.0 / static_cast<double>(cfg.grid_n);
      if (step * 256.0 > cfg.scales.back() * (1.0 + 1e-9))
        c.problems.push_back("/grid/n: too coarse, need 1/n <= smallest scale / 256");
      if (cfg.scales.front() >= 1.0)
        c.problems.push_back("/filters/scales: path sweeps run on [0, 1], need scales < 1");
    }
    for (const auto& ms : cfg.moments)
      if (ms.p2) c.problems.push_back("/moments: second-order sweeps need a poisson process");
  }

  if (!c.problems.empty()) throw ConfigError(std::move(c.problems));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(io::read_text_file(path));
}

namespace {

IntensityModel make_intensity(const ExperimentConfig& cfg) {
  if (cfg.intensity_kind == ExperimentConfig::IntensityKind::Constant)
    return IntensityModel::constant(cfg.lambda0, cfg.horizon);
  return IntensityModel::sinusoidal(cfg.intensity_a, cfg.intensity_b, cfg.intensity_period,
                                    cfg.horizon);
}

ChargeDistribution make_charges(const ExperimentConfig& cfg) {
  switch (cfg.charge_kind) {
    case ExperimentConfig::ChargeKind::Gaussian:
      return ChargeDistribution::gaussian(cfg.charge_variance);
    case ExperimentConfig::ChargeKind::Rademacher: return ChargeDistribution::rademacher();
    case ExperimentConfig::ChargeKind::Constant: break;
  }
  return ChargeDistribution::constant(cfg.charge_value);
}

std::string process_label(const ExperimentConfig& cfg) {
  switch (cfg.process) {
    case ExperimentConfig::ProcessType::Fbm: return "fbm";
    case ExperimentConfig::ProcessType::AlphaStable: return "alpha_stable";
    case ExperimentConfig::ProcessType::Poisson: break;
  }
  return "poisson";
}

} // namespace

RunResult run_config(const ExperimentConfig& config, std::optional<std::uint64_t> seed_override,
                     std::optional<std::string> out_override) {
  std::optional<std::uint64_t> seed_opt = seed_override ? seed_override : config.seed;
  if (!seed_opt) throw ConfigError({"/seed: missing (pass --seed or set it in the config)"});
  const std::uint64_t seed = *seed_opt;
  const std::string out_dir = out_override ? *out_override : config.out;
  std::filesystem::create_directories(out_dir);

  const WindowFunction window = WindowFunction::smooth_bump();
  double xi = config.xi;
  if (config.xi_sampled) {
    Rng rng(derive_seed(seed, seed_domain::frequency, 0));
    xi = sample_frequency(rng);
  }

  std::vector<GaborFilter> filters;
  filters.reserve(config.scales.size());
  for (double s : config.scales) filters.push_back({s, xi, window});

  const std::string label = process_label(config);
  std::vector<io::ResultRow> rows;

  if (config.process == ExperimentConfig::ProcessType::Poisson) {
    const IntensityModel intensity = make_intensity(config);
    const ChargeDistribution charges = make_charges(config);
    const PatternGenerator generator = [&intensity, &charges](Rng& rng) {
      return attach_charges(simulate_inhomogeneous(intensity, rng), charges, rng);
    };
    const double m1 = theory::m_lambda(intensity, 1).value;

    for (const auto& ms : config.moments) {
      if (!ms.p2) continue;
      // Second-order ladder; the predicted column uses the limit constant at
      // the current frequency product.
      for (const auto& f : filters) {
        const GaborFilter f2{ms.c * f.scale, xi, window};
        const auto est = second_order_invariant_mc(
            f, ms.p, f2, *ms.p2, generator, config.n_replicates,
            derive_seed(seed, seed_domain::process, static_cast<std::uint64_t>(rows.size())));
        const double L2 = f2.scale * xi;
        double predicted = 0.0;
        try {
          const auto K = theory::predict_second_order_K(ms.p, *ms.p2, ms.c, L2, window);
          predicted = K.value * m1 * charges.abs_moment(ms.p * *ms.p2) *
                      std::pow(f.scale, *ms.p2 + 1.0);
        } catch (const std::exception&) {
          predicted = 0.0; // quadrature failed to converge; leave the column empty
        }
        io::ResultRow row;
        row.process = label;
        row.p = ms.p;
        row.p2 = *ms.p2;
        row.s = f.scale;
        row.xi = xi;
        row.s2 = f2.scale;
        row.xi2 = xi;
        row.estimate = est.value;
        row.std_error = est.std_error;
        row.n = est.n_replicates;
        row.predicted = predicted;
        row.normalizer = std::pow(f.scale, *ms.p2 + 1.0);
        rows.push_back(row);
      }
    }

    std::vector<double> first_ps;
    for (const auto& ms : config.moments)
      if (!ms.p2) first_ps.push_back(ms.p);

    if (!first_ps.empty() &&
        config.estimator == ExperimentConfig::EstimatorChoice::Invariant) {
      const auto sweep = invariant_sweep(filters, first_ps, generator, config.n_replicates,
                                         derive_seed(seed, seed_domain::process, 0xF1));
      for (std::size_t i = 0; i < filters.size(); ++i)
        for (std::size_t j = 0; j < first_ps.size(); ++j) {
          const double p = first_ps[j];
          const double norm = filters[i].scale * window_pnorm(window, p);
          io::ResultRow row;
          row.process = label;
          row.p = p;
          row.s = filters[i].scale;
          row.xi = xi;
          row.estimate = sweep.at[i][j].value;
          row.std_error = sweep.at[i][j].std_error;
          row.n = sweep.at[i][j].n_replicates;
          row.predicted = m1 * charges.abs_moment(p) * norm;
          row.normalizer = norm;
          rows.push_back(row);
        }
    } else if (!first_ps.empty()) {
      for (double p : first_ps) {
        const auto sweep =
            pointwise_sweep(filters, p, generator, config.eval_times, config.n_replicates,
                            derive_seed(seed, seed_domain::process, 0xF2));
        for (std::size_t i = 0; i < filters.size(); ++i)
          for (std::size_t j = 0; j < config.eval_times.size(); ++j) {
            const double norm = filters[i].scale * window_pnorm(window, p);
            io::ResultRow row;
            row.process = label + "@t=" + io::format_double(config.eval_times[j]);
            row.p = p;
            row.s = filters[i].scale;
            row.xi = xi;
            row.estimate = sweep.at[i][j].value;
            row.std_error = sweep.at[i][j].std_error;
            row.n = sweep.at[i][j].n_replicates;
            row.predicted =
                intensity.lambda(config.eval_times[j]) * charges.abs_moment(p) * norm;
            row.normalizer = norm;
            rows.push_back(row);
          }
      }
    }
  } else {
    // Self-similar path sweep on [0, 1].
    const bool fbm = config.process == ExperimentConfig::ProcessType::Fbm;
    const double param = fbm ? config.hurst : config.alpha;
    const std::size_t n = config.grid_n;
    const double step = 1.0 / static_cast<double>(n);
    const PathGenerator generator = [fbm, param, n, step](Rng& rng) {
      return fbm ? simulate_fbm(param, n, step, rng)
                 : simulate_alpha_stable(param, n, step, rng);
    };
    std::vector<double> ps;
    for (const auto& ms : config.moments) ps.push_back(ms.p);
    const auto sweep = path_sweep(filters, ps, generator, config.n_replicates,
                                  derive_seed(seed, seed_domain::process, 0xF3));
    const double beta = fbm ? param : 1.0 / param;
    for (std::size_t i = 0; i < filters.size(); ++i)
      for (std::size_t j = 0; j < ps.size(); ++j) {
        io::ResultRow row;
        row.process = label;
        row.p = ps[j];
        row.s = filters[i].scale;
        row.xi = xi;
        row.estimate = sweep.at[i][j].value;
        row.std_error = sweep.at[i][j].std_error;
        row.n = sweep.at[i][j].n_replicates;
        row.normalizer = std::pow(filters[i].scale, beta * ps[j]);
        if (fbm && param == 0.5 && ps[j] == 2.0)
          row.predicted = filters[i].scale * window_pnorm(window, 2.0);
        rows.push_back(row);
      }
  }

  RunResult result;
  result.rows = std::move(rows);
  const std::filesystem::path base = std::filesystem::path(out_dir) / config.name;
  result.csv_path = (base.string() + ".csv");
  io::write_text_file(result.csv_path, io::to_csv(result.rows));

  nlohmann::json summary;
  summary["name"] = config.name;
  summary["seed"] = seed;
  summary["process"] = label;
  summary["xi"] = xi;
  summary["n_replicates"] = config.n_replicates;
  summary["estimator"] = config.estimator == ExperimentConfig::EstimatorChoice::Invariant
                             ? "invariant"
                             : (config.estimator == ExperimentConfig::EstimatorChoice::Pointwise
                                    ? "pointwise"
                                    : "path");
  summary["rows"] = result.rows.size();
  summary["checks"] = nlohmann::json::array();
  result.summary_path = base.string() + ".summary.json";
  io::write_text_file(result.summary_path, summary.dump(2) + "\n");
  result.all_pass = true;
  return result;
}

} // namespace scatter
