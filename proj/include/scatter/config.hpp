#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scatter/io.hpp"

namespace scatter {

/// Schema violations carry JSON-pointer style paths for every offending field.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

private:
  static std::string join(const std::vector<std::string>& problems);
  std::vector<std::string> problems_;
};

/// Parsed and validated sweep description. See docs/config.schema.json for
/// the on-disk format.
struct ExperimentConfig {
  enum class ProcessType { Poisson, Fbm, AlphaStable };
  enum class EstimatorChoice { Invariant, Pointwise, Path };
  enum class IntensityKind { Constant, Sinusoidal };
  enum class ChargeKind { Constant, Gaussian, Rademacher };

  struct MomentSpec {
    double p = 1.0;
    std::optional<double> p2; // second-order when present
    double c = 1.0;           // scale ratio s' = c s for second-order
  };

  int version = 1;
  std::optional<std::uint64_t> seed; // mandatory unless overridden at the call
  std::string name = "sweep";
  std::string out = ".";

  ProcessType process = ProcessType::Poisson;
  IntensityKind intensity_kind = IntensityKind::Constant;
  double lambda0 = 0.01; // constant intensity
  double intensity_a = 0.01, intensity_b = 0.0, intensity_period = 0.0;
  ChargeKind charge_kind = ChargeKind::Constant;
  double charge_value = 1.0;    // constant charge
  double charge_variance = 1.0; // gaussian charge
  double hurst = 0.5;
  double alpha = 1.5;

  std::vector<double> scales; // strictly decreasing
  bool xi_sampled = false;    // draw xi from U(0, 2 pi) using the run seed
  double xi = 0.0;

  std::vector<MomentSpec> moments;
  EstimatorChoice estimator = EstimatorChoice::Invariant;
  std::vector<double> eval_times; // pointwise estimator locations

  int n_replicates = 8;
  double horizon = 1.0e6;  // poisson horizon
  std::size_t grid_n = 4096; // path grid cells on [0, 1]
};

/// Parses and validates a config document. Collects every problem before
/// throwing, with JSON-pointer paths such as "/filters/scales".
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct RunResult {
  std::vector<io::ResultRow> rows;
  std::string csv_path;
  std::string summary_path;
  bool all_pass = true;
};

/// Executes the sweep and writes <name>.csv and <name>.summary.json under the
/// output directory. Identical config and seed produce byte-identical files.
RunResult run_config(const ExperimentConfig& config, std::optional<std::uint64_t> seed_override,
                     std::optional<std::string> out_override);

} // namespace scatter
