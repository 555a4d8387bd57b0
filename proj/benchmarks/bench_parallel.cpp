// Compares the OpenMP kernels against the serial reference on the hot
// estimator loops and checks that both produce identical bits.

#include <chrono>
#include <cstdio>
#include <string>

#include "scatter/parallel.hpp"
#include "scatter/scattering.hpp"
#include "scatter/theory.hpp"

using namespace scatter;

namespace {

template <class Fn>
double time_seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const std::string& name, double serial, double parallel, bool identical) {
  std::printf("%-34s %9.3f s %9.3f s  x%.2f  %s\n", name.c_str(), serial, parallel,
              serial / parallel, identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main() {
  const auto bump = WindowFunction::smooth_bump();
  std::printf("%-34s %11s %11s  %s\n", "kernel", "serial", "openmp", "speedup");
  std::printf("workers available: %d\n", par::max_threads());

  // Invariant first-order sweep over a dyadic scale ladder.
  {
    const PatternGenerator gen = [](Rng& rng) { return simulate_homogeneous(0.01, 1.0e6, rng); };
    std::vector<GaborFilter> filters;
    for (int k = 1; k <= 10; ++k) filters.push_back({64.0 * std::pow(2.0, -k), 2.2, bump});
    const std::vector<double> ps = {1.0, 2.0};
    SweepEstimates a, b;
    const double ts = time_seconds([&] { a = invariant_sweep(filters, ps, gen, 8, 7, par::Exec::Serial); });
    const double tp = time_seconds([&] { b = invariant_sweep(filters, ps, gen, 8, 7, par::Exec::Parallel); });
    bool same = true;
    for (std::size_t i = 0; i < a.at.size(); ++i)
      for (std::size_t j = 0; j < a.at[i].size(); ++j)
        same = same && a.at[i][j].value == b.at[i][j].value &&
               a.at[i][j].std_error == b.at[i][j].std_error;
    row("invariant sweep (10 scales, R=8)", ts, tp, same);
  }

  // Pointwise estimator over many cheap replicates.
  {
    const PatternGenerator gen = [](Rng& rng) { return simulate_homogeneous(0.3, 16.0, rng); };
    const GaborFilter f{1.0, 0.7, bump};
    MomentEstimate a, b;
    const double ts = time_seconds(
        [&] { a = first_order_pointwise(f, 1.0, gen, 8.0, 400000, 11, par::Exec::Serial); });
    const double tp = time_seconds(
        [&] { b = first_order_pointwise(f, 1.0, gen, 8.0, 400000, 11, par::Exec::Parallel); });
    row("pointwise estimator (R=4e5)", ts, tp, a.value == b.value && a.std_error == b.std_error);
  }

  // Second-order cascade.
  {
    const PatternGenerator gen = [](Rng& rng) { return simulate_homogeneous(0.01, 262144.0, rng); };
    const GaborFilter f{4.0, 0.0, bump};
    MomentEstimate a, b;
    const double ts = time_seconds(
        [&] { a = second_order_invariant_mc(f, 1.0, f, 2.0, gen, 8, 13, par::Exec::Serial); });
    const double tp = time_seconds(
        [&] { b = second_order_invariant_mc(f, 1.0, f, 2.0, gen, 8, 13, par::Exec::Parallel); });
    row("second-order cascade (R=8)", ts, tp, a.value == b.value && a.std_error == b.std_error);
  }

  // Fractional Brownian path batch.
  {
    const std::size_t n = 1 << 14;
    const PathGenerator gen = [n](Rng& rng) { return simulate_fbm(0.5, n, 1.0 / n, rng); };
    std::vector<GaborFilter> filters;
    for (int k = 1; k <= 6; ++k) filters.push_back({std::pow(2.0, -k), 1.9, bump});
    const std::vector<double> ps = {1.0, 2.0};
    SweepEstimates a, b;
    const double ts =
        time_seconds([&] { a = path_sweep(filters, ps, gen, 200, 17, par::Exec::Serial); });
    const double tp =
        time_seconds([&] { b = path_sweep(filters, ps, gen, 200, 17, par::Exec::Parallel); });
    bool same = true;
    for (std::size_t i = 0; i < a.at.size(); ++i)
      for (std::size_t j = 0; j < a.at[i].size(); ++j)
        same = same && a.at[i][j].value == b.at[i][j].value;
    row("fbm path sweep (R=200)", ts, tp, same);
  }

  return 0;
}
