#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "scatter/config.hpp"
#include "scatter/presets.hpp"
#include "scatter/stats.hpp"

namespace {

// --where grammar: comma-separated key=value pairs matched against the CSV
// columns; strings compare exactly, numbers within 1e-12, an empty value
// matches an empty optional column.
struct Filter {
  std::vector<std::pair<std::string, std::string>> clauses;
};

Filter parse_where(const std::string& expr) {
  Filter f;
  if (expr.empty()) return f;
  std::size_t start = 0;
  while (start <= expr.size()) {
    const std::size_t comma = expr.find(',', start);
    const std::string clause =
        expr.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const std::size_t eq = clause.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--where: expected key=value, got '" + clause + "'");
    f.clauses.emplace_back(clause.substr(0, eq), clause.substr(eq + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return f;
}

bool num_eq(double a, const std::string& text) {
  try {
    return std::fabs(a - std::stod(text)) <= 1e-12 * std::max(1.0, std::fabs(a));
  } catch (const std::exception&) {
    return false;
  }
}

bool opt_eq(const std::optional<double>& v, const std::string& text) {
  if (text.empty()) return !v.has_value();
  return v.has_value() && num_eq(*v, text);
}

bool matches(const scatter::io::ResultRow& row, const Filter& f) {
  for (const auto& [key, value] : f.clauses) {
    bool ok;
    if (key == "process")
      ok = row.process == value;
    else if (key == "p")
      ok = num_eq(row.p, value);
    else if (key == "p2")
      ok = opt_eq(row.p2, value);
    else if (key == "s")
      ok = num_eq(row.s, value);
    else if (key == "xi")
      ok = num_eq(row.xi, value);
    else if (key == "s2")
      ok = opt_eq(row.s2, value);
    else if (key == "xi2")
      ok = opt_eq(row.xi2, value);
    else
      throw std::runtime_error("--where: unknown column '" + key + "'");
    if (!ok) return false;
  }
  return true;
}

int cmd_run(const std::string& preset, const std::string& config_path,
            std::optional<std::uint64_t> seed, std::optional<std::string> out) {
  if (!preset.empty()) {
    const auto result = scatter::run_preset(preset, seed.value_or(1), out.value_or("."));
    std::printf("preset %s: %zu rows -> %s\n", result.name.c_str(), result.rows.size(),
                result.csv_path.c_str());
    for (const auto& c : result.checks)
      std::printf("  [%s] %-24s value=%.6g target=%.6g\n", c.pass ? "pass" : "FAIL",
                  c.id.c_str(), c.value, c.target);
    std::printf("summary: %s\n", result.summary_path.c_str());
    if (!result.all_pass()) {
      nlohmann::json failures = nlohmann::json::array();
      for (const auto& c : result.checks)
        if (!c.pass) failures.push_back({{"id", c.id}, {"value", c.value}, {"target", c.target}});
      std::fprintf(stderr, "failed checks: %s\n", failures.dump().c_str());
      return 1;
    }
    return 0;
  }
  const auto config = scatter::load_config(config_path);
  const auto result = scatter::run_config(config, seed, out);
  std::printf("config %s: %zu rows -> %s\n", config.name.c_str(), result.rows.size(),
              result.csv_path.c_str());
  return result.all_pass ? 0 : 1;
}

int cmd_fit(const std::string& csv_path, const std::string& where) {
  const auto rows = scatter::io::read_result_csv(csv_path);
  const Filter filter = parse_where(where);
  std::vector<double> x, y, rel;
  for (const auto& row : rows) {
    if (!matches(row, filter)) continue;
    x.push_back(row.s);
    y.push_back(row.estimate);
    rel.push_back(row.estimate > 0.0 ? row.std_error / row.estimate : 1e9);
  }
  if (x.size() < 4) throw std::runtime_error("fit: need at least 4 matching rows");
  const auto fit = scatter::stats::fit_loglog_slope(x, y, rel);
  std::printf("slope %.6f intercept %.6f r2 %.6f points %zu\n", fit.slope, fit.intercept, fit.r2,
              fit.used_x.size());
  if (!fit.excluded_x.empty()) {
    std::printf("excluded (noise-dominated):");
    for (double s : fit.excluded_x) std::printf(" %g", s);
    std::printf("\n");
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gabor scattering moments of point processes and self-similar noise"};
  app.require_subcommand(1);

  std::string preset, config_path, out_dir, csv_path, where_expr;
  std::uint64_t seed_value = 0;

  std::string preset_help = "Preset name (";
  for (std::size_t i = 0; i < scatter::preset_names().size(); ++i)
    preset_help += (i ? ", " : "") + scatter::preset_names()[i];
  preset_help += ")";

  auto* run = app.add_subcommand("run", "Run a preset experiment or a JSON sweep config");
  auto* preset_opt = run->add_option("--preset", preset, preset_help);
  auto* config_opt = run->add_option("--config", config_path, "Path to a sweep config");
  preset_opt->excludes(config_opt);
  auto* seed_opt = run->add_option("--seed", seed_value, "Master seed (default 1 for presets)");
  auto* out_opt = run->add_option("--out", out_dir, "Output directory");

  auto* fit = app.add_subcommand("fit", "Fit a log-log slope over rows of a result CSV");
  fit->add_option("--csv", csv_path, "Result CSV")->required();
  fit->add_option("--where", where_expr, "Row filter, e.g. process=bm,p=1");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (preset.empty() && config_path.empty())
        throw std::runtime_error("run: pass --preset or --config");
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      std::optional<std::string> out;
      if (out_opt->count() > 0) out = out_dir;
      return cmd_run(preset, config_path, seed, out);
    }
    return cmd_fit(csv_path, where_expr);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
