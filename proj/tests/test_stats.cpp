#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "scatter/parallel.hpp"
#include "scatter/rng.hpp"
#include "scatter/stats.hpp"

using namespace scatter;

TEST_CASE("pairwise sum matches serial accumulation") {
  Rng rng(11);
  std::vector<double> v(10001);
  for (auto& x : v) x = rng.uniform() - 0.5;
  double serial = 0.0;
  for (double x : v) serial += x;
  CHECK(par::pairwise_sum(v) == doctest::Approx(serial).epsilon(1e-12));
}

TEST_CASE("mean and standard error") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const auto ms = stats::mean_stderr(v);
  CHECK(ms.mean == doctest::Approx(2.5));
  // sample sd = sqrt(5/3), se = sd / 2
  CHECK(ms.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));
  CHECK(ms.n == 4);
}

TEST_CASE("incomplete gamma spot values") {
  // chi-square with 2 dof: survival = exp(-x/2)
  for (double x : {0.5, 1.0, 3.0, 7.0})
    CHECK(stats::chi2_sf(x, 2.0) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-10));
  // P(a, a) grows to 1 with x
  CHECK(stats::gamma_p(3.0, 100.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(stats::gamma_p(3.0, 0.0) == 0.0);
}

TEST_CASE("two-sample KS behaves") {
  Rng rng(5);
  std::vector<double> a(4000), b(4000), c(4000);
  for (auto& x : a) x = rng.normal();
  for (auto& x : b) x = rng.normal();
  for (auto& x : c) x = rng.normal() + 0.5;
  CHECK(stats::ks_two_sample(a, b).p_value > 0.01);
  CHECK(stats::ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("one-sample KS against the normal cdf") {
  Rng rng(9);
  std::vector<double> a(5000);
  for (auto& x : a) x = rng.normal();
  const auto res = stats::ks_one_sample(a, [](double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
  });
  CHECK(res.p_value > 0.01);
}

TEST_CASE("poisson chi-square goodness of fit") {
  Rng rng(21);
  const double mean = 20.0;
  std::vector<int> counts(800);
  for (auto& c : counts) {
    // direct inversion by cumulative search
    const double u = rng.uniform();
    double p = std::exp(-mean), cum = p;
    int k = 0;
    while (u > cum && k < 200) {
      ++k;
      p *= mean / k;
      cum += p;
    }
    c = k;
  }
  CHECK(stats::poisson_chi2_pvalue(counts, mean) > 0.01);

  // shifted counts must fail decisively
  std::vector<int> shifted = counts;
  for (auto& c : shifted) c += 6;
  CHECK(stats::poisson_chi2_pvalue(shifted, mean) < 1e-6);
}

TEST_CASE("log-log slope fit") {
  SUBCASE("exact power law") {
    std::vector<double> x, y, rel;
    for (int k = 0; k < 8; ++k) {
      const double s = std::pow(2.0, -k);
      x.push_back(s);
      y.push_back(3.0 * s * s);
      rel.push_back(0.0);
    }
    const auto fit = stats::fit_loglog_slope(x, y, rel);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-9));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("noise-dominated points are excluded and reported") {
    std::vector<double> x = {1.0, 0.5, 0.25, 0.125, 0.0625};
    std::vector<double> y = {1.0, 0.5, 0.25, 0.125, 0.0625};
    std::vector<double> rel = {0.0, 0.0, 0.0, 0.0, 0.9};
    const auto fit = stats::fit_loglog_slope(x, y, rel);
    CHECK(fit.used_x.size() == 4);
    REQUIRE(fit.excluded_x.size() == 1);
    CHECK(fit.excluded_x[0] == 0.0625);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("too few points throws") {
    std::vector<double> x = {1.0, 0.5, 0.25};
    std::vector<double> y = {1.0, 0.5, 0.25};
    std::vector<double> rel = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(stats::fit_loglog_slope(x, y, rel), std::invalid_argument);
  }
}

TEST_CASE("SCATTER_THREADS caps the worker count") {
  setenv("SCATTER_THREADS", "1", 1);
  CHECK(par::max_threads() == 1);
  unsetenv("SCATTER_THREADS");
  CHECK(par::max_threads() >= 1);
}
