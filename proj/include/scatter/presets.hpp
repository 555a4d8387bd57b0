#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scatter/io.hpp"

namespace scatter {

struct CriterionCheck {
  std::string id;
  std::string description;
  bool pass = false;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0; // absolute tolerance on |value - target|, 0 for pure flags
};

struct PresetResult {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<io::ResultRow> rows;
  std::vector<CriterionCheck> checks;
  std::string csv_path;
  std::string summary_path;
  double runtime_seconds = 0.0;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

const std::vector<std::string>& preset_names();

/// Runs one named experiment preset, writes <name>.csv and
/// <name>.summary.json under out_dir, and returns the structured outcome.
/// Throws std::invalid_argument for unknown preset names.
PresetResult run_preset(const std::string& name, std::uint64_t seed,
                        const std::string& out_dir);

} // namespace scatter
