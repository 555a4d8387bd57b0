#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "scatter/config.hpp"
#include "scatter/io.hpp"
#include "scatter/selfsimilar.hpp"

using namespace scatter;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("scatter_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kMinimalConfig = R"({
  "version": 1,
  "seed": 7,
  "name": "mini",
  "process": {
    "type": "poisson",
    "intensity": {"kind": "constant", "lambda0": 0.05},
    "charges": {"kind": "constant", "value": 1.0}
  },
  "filters": {"scales": [2.0], "xi": 0.4},
  "moments": [{"p": 1}],
  "estimator": {"kind": "invariant"},
  "n_replicates": 4,
  "horizon": 4000.0
})";

const char* kLadderConfig = R"({
  "version": 1,
  "seed": 11,
  "name": "ladder",
  "process": {
    "type": "poisson",
    "intensity": {"kind": "constant", "lambda0": 0.05}
  },
  "filters": {"scales": [8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 0.125, 0.0625], "xi": "sample"},
  "moments": [{"p": 1}, {"p": 2}],
  "estimator": {"kind": "invariant"},
  "n_replicates": 4,
  "horizon": 4000.0
})";

} // namespace

TEST_CASE("result csv round-trip and formatting") {
  std::vector<io::ResultRow> rows(2);
  rows[0].process = "poisson";
  rows[0].p = 1.0;
  rows[0].s = 0.1234567890123456789;
  rows[0].xi = 3.9;
  rows[0].estimate = 1.0 / 3.0;
  rows[0].std_error = 1e-7;
  rows[0].n = 8;
  rows[0].predicted = 0.01;
  rows[0].normalizer = 0.0221;
  rows[1] = rows[0];
  rows[1].p2 = 2.0;
  rows[1].s2 = 0.25;
  rows[1].xi2 = 0.0;

  const std::string text = io::to_csv(rows);
  CHECK(text.starts_with("process,p,p2,s,xi,s2,xi2,estimate,std_error,n,predicted,normalizer\n"));
  const auto back = io::parse_result_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].s == rows[0].s);
  CHECK(back[0].estimate == rows[0].estimate);
  CHECK(!back[0].p2.has_value());
  CHECK(back[1].p2.has_value());
  CHECK(*back[1].p2 == 2.0);
  CHECK(*back[1].s2 == 0.25);
}

TEST_CASE("sample path serialization") {
  Rng rng(5);
  const auto path = simulate_fbm(0.5, 64, 0.125, rng);
  const auto csv = io::sample_path_to_csv(path);
  CHECK(csv.starts_with("t,value\n"));
  const auto sidecar = io::sample_path_sidecar_json(path, 5);
  CHECK(sidecar.find("\"hurst\"") != std::string::npos);
  CHECK(sidecar.find("\"seed\"") != std::string::npos);
}

TEST_CASE("config validation reports JSON-pointer paths") {
  SUBCASE("not json") {
    CHECK_THROWS_AS(parse_config("{oops"), ConfigError);
  }
  SUBCASE("missing fields and bad values are all reported") {
    try {
      parse_config(R"({"version": 1, "process": {"type": "poisson",
        "intensity": {"kind": "sinusoidal", "a": -1, "b": 2, "period": 8}},
        "filters": {"scales": [1.0, 2.0]},
        "moments": [{"p": 0.5}],
        "n_replicates": 1,
        "horizon": 5.0})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const auto& p = e.problems();
      const auto has = [&](const std::string& needle) {
        for (const auto& msg : p)
          if (msg.find(needle) != std::string::npos) return true;
        return false;
      };
      CHECK(has("/process/intensity/a"));
      CHECK(has("/process/intensity/b"));
      CHECK(has("/filters/scales"));
      CHECK(has("/moments/0/p"));
      CHECK(has("/n_replicates"));
    }
  }
  SUBCASE("seed is mandatory") {
    const auto cfg = parse_config(kMinimalConfig);
    ExperimentConfig no_seed = cfg;
    no_seed.seed.reset();
    CHECK_THROWS_AS(run_config(no_seed, std::nullopt, std::nullopt), ConfigError);
  }
  SUBCASE("scales must stay below a tenth of the horizon") {
    std::string text = kMinimalConfig;
    const auto pos = text.find("4000.0");
    text.replace(pos, 6, "15.0");
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
}

TEST_CASE("run_config emits one row per (scale, moment) cell") {
  const auto dir = temp_dir("cells");
  const auto cfg = parse_config(kMinimalConfig);
  const auto res = run_config(cfg, std::nullopt, dir.string());
  CHECK(res.rows.size() == 1);
  const auto rows = io::read_result_csv(res.csv_path);
  CHECK(rows.size() == 1);
  CHECK(rows[0].process == "poisson");

  const auto cfg2 = parse_config(kLadderConfig);
  const auto res2 = run_config(cfg2, std::nullopt, dir.string());
  CHECK(res2.rows.size() == 16);
}

TEST_CASE("identical config and seed give byte-identical files") {
  const auto dir1 = temp_dir("det1");
  const auto dir2 = temp_dir("det2");
  const auto cfg = parse_config(kLadderConfig);
  const auto r1 = run_config(cfg, std::nullopt, dir1.string());
  const auto r2 = run_config(cfg, std::nullopt, dir2.string());
  CHECK(io::read_text_file(r1.csv_path) == io::read_text_file(r2.csv_path));

  // a different seed must change the contents
  const auto dir3 = temp_dir("det3");
  const auto r3 = run_config(cfg, 999, dir3.string());
  CHECK(io::read_text_file(r1.csv_path) != io::read_text_file(r3.csv_path));
}

TEST_CASE("worker count does not change the output") {
  const auto dir1 = temp_dir("thr1");
  const auto dir2 = temp_dir("thr2");
  const auto cfg = parse_config(kLadderConfig);
  setenv("SCATTER_THREADS", "1", 1);
  const auto r1 = run_config(cfg, std::nullopt, dir1.string());
  setenv("SCATTER_THREADS", "2", 1);
  const auto r2 = run_config(cfg, std::nullopt, dir2.string());
  unsetenv("SCATTER_THREADS");
  CHECK(io::read_text_file(r1.csv_path) == io::read_text_file(r2.csv_path));
}

#ifdef SCATTER_BIN
TEST_CASE("command line interface") {
  const auto dir = temp_dir("cli");
  const std::string bin = SCATTER_BIN;

  SUBCASE("unknown preset fails with nonzero status") {
    const int rc = std::system((bin + " run --preset nosuch --seed 1 --out " + dir.string() +
                                " > /dev/null 2>&1")
                                   .c_str());
    CHECK(rc != 0);
  }
  SUBCASE("missing mode fails") {
    const int rc = std::system((bin + " run > /dev/null 2>&1").c_str());
    CHECK(rc != 0);
  }
  SUBCASE("config run and slope fit") {
    const auto cfg_path = dir / "ladder.json";
    io::write_text_file(cfg_path.string(), kLadderConfig);
    const int rc = std::system(
        (bin + " run --config " + cfg_path.string() + " --out " + dir.string() +
         " > /dev/null 2>&1")
            .c_str());
    CHECK(rc == 0);
    REQUIRE(fs::exists(dir / "ladder.csv"));

    const auto fit_out = dir / "fit.txt";
    const int rc2 = std::system((bin + " fit --csv " + (dir / "ladder.csv").string() +
                                 " --where process=poisson,p=1 > " + fit_out.string() + " 2>&1")
                                    .c_str());
    CHECK(rc2 == 0);
    const auto text = io::read_text_file(fit_out.string());
    CHECK(text.find("slope") != std::string::npos);
    // the p = 1 poisson ladder slope is close to 1
    const double slope = std::stod(text.substr(text.find("slope") + 6));
    CHECK(slope > 0.9);
    CHECK(slope < 1.1);
  }
  SUBCASE("fit on a synthetic exact power law") {
    std::vector<io::ResultRow> rows(6);
    for (int k = 0; k < 6; ++k) {
      rows[k].process = "synthetic";
      rows[k].p = 1.0;
      rows[k].s = std::pow(2.0, -k);
      rows[k].estimate = 5.0 * rows[k].s * rows[k].s;
      rows[k].std_error = 0.0;
      rows[k].n = 1;
    }
    const auto csv_path = dir / "synthetic.csv";
    io::write_text_file(csv_path.string(), io::to_csv(rows));
    const auto fit_out = dir / "fit2.txt";
    const int rc = std::system(
        (bin + " fit --csv " + csv_path.string() + " > " + fit_out.string() + " 2>&1").c_str());
    CHECK(rc == 0);
    const auto text = io::read_text_file(fit_out.string());
    const double slope = std::stod(text.substr(text.find("slope") + 6));
    CHECK(slope == doctest::Approx(2.0).epsilon(1e-6));

    // an empty p2 clause selects the first-order rows
    const int rc2 = std::system((bin + " fit --csv " + csv_path.string() +
                                 " --where p2= > /dev/null 2>&1")
                                    .c_str());
    CHECK(rc2 == 0);
    // while p2=2 matches nothing and fails on too few rows
    const int rc3 = std::system((bin + " fit --csv " + csv_path.string() +
                                 " --where p2=2 > /dev/null 2>&1")
                                    .c_str());
    CHECK(rc3 != 0);
  }
}
#endif
