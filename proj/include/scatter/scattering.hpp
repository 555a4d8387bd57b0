#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "scatter/filters.hpp"
#include "scatter/parallel.hpp"
#include "scatter/pointprocess.hpp"
#include "scatter/rng.hpp"
#include "scatter/selfsimilar.hpp"

namespace scatter {

enum class EstimatorKind { PointwiseMC, InvariantTimeAverage, SecondOrder };

/// Monte Carlo estimate: replicate mean, standard error of the mean
/// (sample std dev / sqrt(n)), and replicate count.
struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int n_replicates = 0;
  EstimatorKind kind = EstimatorKind::PointwiseMC;
};

using PatternGenerator = std::function<PointPattern(Rng&)>;
using PathGenerator = std::function<SamplePath(Rng&)>;

/// Exact filter response (g * Y)(t) = sum over points of A_j g(t - t_j).
/// The contributing points t - s < t_j < t are located by binary search;
/// no grid is involved.
std::complex<double> conv_at(const GaborFilter& f, const PointPattern& pattern, double t);

/// Time average of |(g * Y)(t)|^p over the grid t = k h inside
/// [t_min, t_max], one value per requested moment order. Grid points with no
/// point of the pattern inside (t - s, t) contribute exactly zero and are
/// skipped, so the cost scales with the number of points, not the horizon.
std::vector<double> time_average_moments(const GaborFilter& f, std::span<const double> ps,
                                         const PointPattern& pattern, double h,
                                         double t_min, double t_max);

/// Invariant first-order moment of one realization: averages |g * Y|^p over a
/// uniform grid with spacing h <= scale/8, excluding a margin of one filter
/// scale at both ends. Requires horizon >= 10 * scale.
MomentEstimate first_order_invariant(const GaborFilter& f, double p,
                                     const PointPattern& pattern, double h);

/// Replicate-averaged invariant moment over fresh realizations.
MomentEstimate first_order_invariant_mc(const GaborFilter& f, double p,
                                        const PatternGenerator& generator, int n_replicates,
                                        std::uint64_t seed, par::Exec exec = par::Exec::Parallel);

/// Pointwise first-order moment: Monte Carlo mean of |(g * Y)(t)|^p over
/// fresh realizations. Requires n_replicates >= 2.
MomentEstimate first_order_pointwise(const GaborFilter& f, double p,
                                     const PatternGenerator& generator, double t,
                                     int n_replicates, std::uint64_t seed,
                                     par::Exec exec = par::Exec::Parallel);

/// Second-order time average of one realization:
/// u = |g * Y|^p on a fine grid (step h <= min(s, s') / 256), convolved with
/// g' by trapezoid quadrature, raised to p', averaged over t with a margin of
/// max(s, s') at both ends.
double second_order_time_average(const GaborFilter& f, double p, const GaborFilter& f2,
                                 double p2, const PointPattern& pattern, double h);

MomentEstimate second_order_invariant(const GaborFilter& f, double p, const GaborFilter& f2,
                                      double p2, const PointPattern& pattern, double h);

MomentEstimate second_order_invariant_mc(const GaborFilter& f, double p, const GaborFilter& f2,
                                         double p2, const PatternGenerator& generator,
                                         int n_replicates, std::uint64_t seed,
                                         par::Exec exec = par::Exec::Parallel);

/// Left-endpoint Riemann-Stieltjes sum of g(t - u) dX(u) over the filter
/// support. Requires path.step <= scale / 256.
std::complex<double> conv_at_path(const GaborFilter& f, const SamplePath& path, double t);

/// Monte Carlo mean of |g * dX|^p at the path endpoint over fresh paths.
MomentEstimate first_order_invariant_path(const GaborFilter& f, double p,
                                          const PathGenerator& generator, int n_replicates,
                                          std::uint64_t seed,
                                          par::Exec exec = par::Exec::Parallel);

// Batched sweeps. One realization (or path) per replicate is reused across
// every filter and moment order, with per-replicate derived seeds, so results
// are independent of the worker count.

struct SweepEstimates {
  // indexed [filter][moment] or [filter][location]
  std::vector<std::vector<MomentEstimate>> at;
};

SweepEstimates invariant_sweep(std::span<const GaborFilter> filters, std::span<const double> ps,
                               const PatternGenerator& generator, int n_replicates,
                               std::uint64_t seed, par::Exec exec = par::Exec::Parallel);

SweepEstimates pointwise_sweep(std::span<const GaborFilter> filters, double p,
                               const PatternGenerator& generator, std::span<const double> ts,
                               int n_replicates, std::uint64_t seed,
                               par::Exec exec = par::Exec::Parallel);

SweepEstimates path_sweep(std::span<const GaborFilter> filters, std::span<const double> ps,
                          const PathGenerator& generator, int n_replicates, std::uint64_t seed,
                          par::Exec exec = par::Exec::Parallel);

} // namespace scatter
