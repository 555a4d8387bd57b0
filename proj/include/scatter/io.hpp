#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scatter/pointprocess.hpp"
#include "scatter/selfsimilar.hpp"

namespace scatter::io {

/// One line of the result table. Optional fields stay empty in the CSV for
/// first-order rows.
struct ResultRow {
  std::string process;
  double p = 0.0;
  std::optional<double> p2;
  double s = 0.0;
  double xi = 0.0;
  std::optional<double> s2;
  std::optional<double> xi2;
  double estimate = 0.0;
  double std_error = 0.0;
  int n = 0;
  double predicted = 0.0;
  double normalizer = 1.0;
};

inline constexpr const char* kResultHeader =
    "process,p,p2,s,xi,s2,xi2,estimate,std_error,n,predicted,normalizer";

/// Shortest decimal form that round-trips a double exactly.
std::string format_double(double v);

std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_result_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);
std::vector<ResultRow> read_result_csv(const std::string& path);

// PointPattern serialization: CSV with header "t,charge", and a JSON object
// {horizon, locations, charges}. Both round-trip at full double precision.
std::string pattern_to_csv(const PointPattern& pattern);
PointPattern pattern_from_csv(const std::string& text, double horizon);
std::string pattern_to_json(const PointPattern& pattern);
PointPattern pattern_from_json(const std::string& text);

// SamplePath serialization: CSV "t,value" plus a JSON sidecar with the
// generator parameters.
std::string sample_path_to_csv(const SamplePath& path);
std::string sample_path_sidecar_json(const SamplePath& path, std::uint64_t seed);

} // namespace scatter::io
