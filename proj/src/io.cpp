#include "scatter/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace scatter::io {

std::string format_double(double v) {
  // 17 significant digits always round-trip; trim to the shortest form that
  // still parses back to the same bits.
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& field) {
  try {
    return std::stod(field);
  } catch (const std::exception&) {
    throw std::runtime_error("csv: cannot parse number '" + field + "'");
  }
}

std::optional<double> parse_opt(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return parse_double(field);
}

} // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << kResultHeader << '\n';
  for (const auto& r : rows) {
    os << r.process << ',' << format_double(r.p) << ',' << opt_field(r.p2) << ','
       << format_double(r.s) << ',' << format_double(r.xi) << ',' << opt_field(r.s2) << ','
       << opt_field(r.xi2) << ',' << format_double(r.estimate) << ','
       << format_double(r.std_error) << ',' << r.n << ',' << format_double(r.predicted) << ','
       << format_double(r.normalizer) << '\n';
  }
  return os.str();
}

std::vector<ResultRow> parse_result_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("csv: empty file");
  if (line != kResultHeader) throw std::runtime_error("csv: unexpected header: " + line);
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 12) throw std::runtime_error("csv: expected 12 fields: " + line);
    ResultRow r;
    r.process = f[0];
    r.p = parse_double(f[1]);
    r.p2 = parse_opt(f[2]);
    r.s = parse_double(f[3]);
    r.xi = parse_double(f[4]);
    r.s2 = parse_opt(f[5]);
    r.xi2 = parse_opt(f[6]);
    r.estimate = parse_double(f[7]);
    r.std_error = parse_double(f[8]);
    r.n = static_cast<int>(parse_double(f[9]));
    r.predicted = parse_double(f[10]);
    r.normalizer = parse_double(f[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<ResultRow> read_result_csv(const std::string& path) {
  return parse_result_csv(read_text_file(path));
}

std::string pattern_to_csv(const PointPattern& pattern) {
  std::ostringstream os;
  os << "t,charge\n";
  for (std::size_t i = 0; i < pattern.size(); ++i)
    os << format_double(pattern.locations[i]) << ',' << format_double(pattern.charges[i]) << '\n';
  return os.str();
}

PointPattern pattern_from_csv(const std::string& text, double horizon) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "t,charge")
    throw std::runtime_error("pattern csv: bad header");
  std::vector<double> locations, charges;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 2) throw std::runtime_error("pattern csv: expected 2 fields: " + line);
    locations.push_back(parse_double(f[0]));
    charges.push_back(parse_double(f[1]));
  }
  return PointPattern(horizon, std::move(locations), std::move(charges));
}

std::string pattern_to_json(const PointPattern& pattern) {
  nlohmann::json j;
  j["horizon"] = pattern.horizon;
  j["locations"] = pattern.locations;
  j["charges"] = pattern.charges;
  return j.dump();
}

PointPattern pattern_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  return PointPattern(j.at("horizon").get<double>(),
                      j.at("locations").get<std::vector<double>>(),
                      j.at("charges").get<std::vector<double>>());
}

std::string sample_path_to_csv(const SamplePath& path) {
  std::ostringstream os;
  os << "t,value\n";
  for (std::size_t i = 0; i < path.values.size(); ++i)
    os << format_double(static_cast<double>(i) * path.step) << ','
       << format_double(path.values[i]) << '\n';
  return os.str();
}

std::string sample_path_sidecar_json(const SamplePath& path, std::uint64_t seed) {
  nlohmann::json j;
  j["kind"] = path.kind == SamplePath::Kind::Fbm ? "fbm" : "alpha_stable";
  j[path.kind == SamplePath::Kind::Fbm ? "hurst" : "alpha"] = path.param;
  j["step"] = path.step;
  j["n"] = path.values.size() - 1;
  j["seed"] = seed;
  return j.dump(2);
}

} // namespace scatter::io
