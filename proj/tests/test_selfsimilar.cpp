#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "scatter/rng.hpp"
#include "scatter/selfsimilar.hpp"
#include "scatter/stats.hpp"

using namespace scatter;

namespace {

std::vector<double> increments(const SamplePath& p) {
  std::vector<double> out(p.values.size() - 1);
  for (std::size_t i = 0; i + 1 < p.values.size(); ++i) out[i] = p.values[i + 1] - p.values[i];
  return out;
}

double normal_cdf(double x, double sd) { return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0))); }

} // namespace

TEST_CASE("fbm basics and validation") {
  Rng rng(3);
  const auto p = simulate_fbm(0.5, 1024, 0.01, rng);
  CHECK(p.values.size() == 1025);
  CHECK(p.values[0] == 0.0);
  CHECK(p.scaling_exponent() == 0.5);

  Rng r2(3);
  const auto q = simulate_fbm(0.5, 1024, 0.01, r2);
  CHECK(q.values == p.values); // determinism

  CHECK_THROWS_AS(simulate_fbm(0.0, 1024, 0.01, rng), std::invalid_argument);
  CHECK_THROWS_AS(simulate_fbm(1.0, 1024, 0.01, rng), std::invalid_argument);
  CHECK_THROWS_AS(simulate_fbm(0.5, 1000, 0.01, rng), std::invalid_argument); // not a power of two
}

TEST_CASE("H = 1/2 increments are independent gaussians") {
  const double step = 0.25;
  std::vector<double> pool;
  for (int r = 0; r < 40; ++r) {
    Rng rng(derive_seed(51, seed_domain::estimator, r));
    const auto inc = increments(simulate_fbm(0.5, 256, step, rng));
    pool.insert(pool.end(), inc.begin(), inc.end());
  }
  const double sd = std::pow(step, 0.5);
  const auto ks = stats::ks_one_sample(pool, [sd](double x) { return normal_cdf(x, sd); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("fGn lag-1 correlation matches 2^(2H-1) - 1") {
  const double hurst = 0.7;
  const double target = std::pow(2.0, 2.0 * hurst - 1.0) - 1.0;
  const int paths = 200;
  const std::size_t n = 2048;
  std::vector<double> rho(paths);
  for (int r = 0; r < paths; ++r) {
    Rng rng(derive_seed(53, seed_domain::estimator, r));
    const auto inc = increments(simulate_fbm(hurst, n, 1.0, rng));
    // The increments have exact zero mean; centering on the sample mean
    // would bias the estimate by O(n^(2H-2)) under long-range dependence.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i + 1 < inc.size(); ++i) num += inc[i] * inc[i + 1];
    for (double x : inc) den += x * x;
    rho[r] = num / den;
  }
  const auto ms = stats::mean_stderr(rho);
  CHECK(std::fabs(ms.mean - target) < 3.0 * ms.std_error);
}

TEST_CASE("fbm variance doubling follows 2^(2H)") {
  const double hurst = 0.7;
  const std::size_t n = 512;
  const int paths = 400;
  std::vector<double> half(paths), full(paths);
  for (int r = 0; r < paths; ++r) {
    Rng rng(derive_seed(57, seed_domain::estimator, r));
    const auto p = simulate_fbm(hurst, n, 1.0 / n, rng);
    half[r] = p.values[n / 2] * p.values[n / 2];
    full[r] = p.values[n] * p.values[n];
  }
  const double ratio = stats::mean_stderr(full).mean / stats::mean_stderr(half).mean;
  CHECK(std::fabs(ratio - std::pow(2.0, 2.0 * hurst)) < 0.05 * std::pow(2.0, 2.0 * hurst) * 3.0);
}

TEST_CASE("cholesky fallback agrees with the embedding in law") {
  std::vector<double> chol_pool, circ_pool;
  for (int r = 0; r < 60; ++r) {
    Rng ra(derive_seed(59, seed_domain::estimator, r));
    const auto inc = detail::fgn_cholesky(0.7, 128, ra);
    chol_pool.insert(chol_pool.end(), inc.begin(), inc.end());
    Rng rb(derive_seed(60, seed_domain::estimator, r));
    const auto inc2 = increments(simulate_fbm(0.7, 128, 1.0, rb));
    circ_pool.insert(circ_pool.end(), inc2.begin(), inc2.end());
  }
  CHECK(stats::ks_two_sample(chol_pool, circ_pool).p_value > 0.01);
}

TEST_CASE("alpha = 2 reduces to Brownian motion") {
  const double step = 0.5;
  std::vector<double> pool;
  for (int r = 0; r < 30; ++r) {
    Rng rng(derive_seed(61, seed_domain::estimator, r));
    const auto inc = increments(simulate_alpha_stable(2.0, 512, step, rng));
    pool.insert(pool.end(), inc.begin(), inc.end());
  }
  const double sd = std::sqrt(step);
  const auto ks = stats::ks_one_sample(pool, [sd](double x) { return normal_cdf(x, sd); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("alpha-stable characteristic function") {
  const double alpha = 1.5, step = 1.0;
  std::vector<double> pool;
  for (int r = 0; r < 6; ++r) {
    Rng rng(derive_seed(63, seed_domain::estimator, r));
    const auto inc = increments(simulate_alpha_stable(alpha, 4096, step, rng));
    pool.insert(pool.end(), inc.begin(), inc.end());
  }
  for (double theta : {0.5, 1.0, 2.0}) {
    std::vector<double> cosines(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) cosines[i] = std::cos(theta * pool[i]);
    const auto ms = stats::mean_stderr(cosines);
    const double target = std::exp(-step * std::pow(theta, alpha));
    CHECK(std::fabs(ms.mean - target) < 3.0 * ms.std_error);
  }
}

TEST_CASE("alpha-stable sample second moment diverges with n") {
  Rng rng(67);
  const auto inc = increments(simulate_alpha_stable(1.5, 100000, 1.0, rng));
  const auto partial_second_moment = [&](std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += inc[i] * inc[i];
    return acc / static_cast<double>(n);
  };
  const double m3 = partial_second_moment(1000);
  const double m4 = partial_second_moment(10000);
  const double m5 = partial_second_moment(100000);
  CHECK(m4 > m3);
  CHECK(m5 > m4);
}

TEST_CASE("alpha-stable validation") {
  Rng rng(69);
  CHECK_THROWS_AS(simulate_alpha_stable(1.0, 128, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(simulate_alpha_stable(2.1, 128, 1.0, rng), std::invalid_argument);
}

TEST_CASE("scaling identity for stochastic integrals") {
  const auto bump = WindowFunction::smooth_bump();

  SUBCASE("brownian motion, s = 0.25") {
    const auto samples =
        check_scaling_relation(SamplePath::Kind::Fbm, 0.5, bump, 0.25, 400, 71, 2048);
    CHECK(stats::ks_two_sample(samples.lhs, samples.rhs).p_value > 0.01);
  }
  SUBCASE("alpha stable, s = 0.5") {
    const auto samples =
        check_scaling_relation(SamplePath::Kind::AlphaStable, 1.5, bump, 0.5, 400, 73, 2048);
    CHECK(stats::ks_two_sample(samples.lhs, samples.rhs).p_value > 0.01);
  }
  SUBCASE("zero integrand gives zero on both sides") {
    const auto zero = WindowFunction::tabulated({0.0, 0.0, 0.0});
    const auto samples =
        check_scaling_relation(SamplePath::Kind::Fbm, 0.5, zero, 0.25, 10, 75, 512);
    for (double v : samples.lhs) CHECK(v == 0.0);
    for (double v : samples.rhs) CHECK(v == 0.0);
  }
}

TEST_CASE("stationary increments and symmetry") {
  // One draw per independent path in each pool; pooling many values from one
  // long-memory path would break the independence the KS test assumes.
  const double hurst = 0.7;
  std::vector<double> early, late, plain, negated;
  for (int r = 0; r < 400; ++r) {
    Rng ra(derive_seed(77, seed_domain::estimator, r));
    Rng rb(derive_seed(78, seed_domain::estimator, r));
    const auto pa = simulate_fbm(hurst, 1024, 1.0, ra);
    const auto pb = simulate_fbm(hurst, 1024, 1.0, rb);
    early.push_back(pa.values[101] - pa.values[100]);
    late.push_back(pb.values[901] - pb.values[900]);
    plain.push_back(pa.values[700]);
    negated.push_back(-pb.values[700]);
  }
  CHECK(stats::ks_two_sample(early, late).p_value > 0.01);
  CHECK(stats::ks_two_sample(plain, negated).p_value > 0.01);
}

TEST_CASE("marginal self-similarity of the path") {
  // {X(s t)} against {s^H X(t)} at a few grid times, in distribution.
  const double hurst = 0.6, s = 0.5;
  const std::size_t n = 1024;
  for (const std::size_t idx : {n / 2, n / 4, 3 * n / 4}) {
    std::vector<double> scaled_time, scaled_value;
    for (int r = 0; r < 300; ++r) {
      Rng ra(derive_seed(79, seed_domain::estimator, r));
      Rng rb(derive_seed(80, seed_domain::estimator, r));
      const auto pa = simulate_fbm(hurst, n, 1.0 / n, ra);
      const auto pb = simulate_fbm(hurst, n, 1.0 / n, rb);
      const auto half = static_cast<std::size_t>(s * idx);
      scaled_time.push_back(pa.values[half]);
      scaled_value.push_back(std::pow(s, hurst) * pb.values[idx]);
    }
    CHECK(stats::ks_two_sample(scaled_time, scaled_value).p_value > 0.01);
  }
}
