#pragma once

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scatter::par {

/// Execution policy for the data-parallel kernels. Every kernel has one code
/// path; Serial simply runs it on a single worker. Results are identical
/// bit-for-bit either way because each index writes its own slot and
/// reductions use a fixed topology.
enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* cap = std::getenv("SCATTER_THREADS")) {
    const int c = std::atoi(cap);
    if (c >= 1 && c < n) n = c;
  }
  return n;
}

/// Runs body(i) for i in [0, n). Under Exec::Parallel the iterations are
/// distributed over OpenMP threads; body must only write state owned by
/// iteration i. The first exception thrown by any iteration is rethrown on
/// the calling thread once all workers have joined.
template <class Body>
void for_index(std::int64_t n, Exec exec, Body&& body) {
#ifdef _OPENMP
  if (exec == Exec::Parallel && n > 1) {
    const int threads = max_threads();
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
#pragma omp critical(scatter_for_index_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#endif
  (void)exec;
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

/// Pairwise summation with a topology fixed by the length alone, so the
/// result does not depend on thread count or traversal order.
inline double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& values) {
  return pairwise_sum(std::span<const double>(values));
}

} // namespace scatter::par
