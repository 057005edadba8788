#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bdsde/grid.hpp"
#include "bdsde/model.hpp"
#include "bdsde/tree_solver.hpp"

namespace bdsde {

/// Per-sample statistic; defaults to the root value y0.
using SampleStatistic = std::function<double(const SolveReport&, const NoisePath&)>;

struct McOptions {
  Scheme scheme = Scheme::implicit;
  double tol = 1e-12;
  SampleStatistic statistic;
};

struct McReport {
  std::size_t n_samples = 0;
  std::size_t n_failed = 0;
  double mean_y0 = 0.0;
  double var_y0 = 0.0;
  /// 1.96 * sqrt(var / n_samples)
  double ci_halfwidth = 0.0;
  /// Mean of (y0 - Y0)^2 when the model has a closed form.
  std::optional<double> l2_error_vs_oracle;
  /// Mean of sup_j |y_j - Y_j|^2 + delta * sum_{j<n} |z_j - Z_j|^2 along the
  /// sampled forward path, when the model has a closed form.
  std::optional<double> path_error_vs_oracle;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::implicit;
};

/// Samples eps-paths (seed, 0..n_samples-1), solves each, aggregates.
/// Solver failures are counted and skipped.
McReport estimate(const ProblemSpec& spec, const TimeGrid& grid,
                  std::size_t n_samples, std::uint64_t seed,
                  const McOptions& options = {});

/// Discrete-point error metric sup_j |y_j - y'_j|^2 + delta sum_{j<n} |z_j - z'_j|^2.
double path_error(std::span<const double> y, std::span<const double> z,
                  std::span<const double> y_ref, std::span<const double> z_ref,
                  double delta);

struct ConvergenceRow {
  int n = 0;
  double error = 0.0;
  std::size_t samples = 0;
  /// 95% half-width of the error mean.
  double ci = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(error) against log(n); empty when some error
  /// is at rounding level.
  std::optional<double> slope;
  /// "oracle" or "implicit-vs-explicit".
  std::string reference;
};

/// Error per n against the closed form when one exists, otherwise the
/// implicit-vs-explicit difference on the same paths.
ConvergenceTable convergence_study(const ProblemSpec& spec, double horizon,
                                   std::span<const int> n_list, std::size_t samples,
                                   std::uint64_t seed);

}  // namespace bdsde
