#pragma once

#include <algorithm>
#include <string>

#include "bdsde/errors.hpp"

namespace bdsde::detail {

template <class StepFn>
SolveReport sweep(Scheme scheme, const ProblemSpec& spec, const TimeGrid& grid,
                  std::span<const Sign> eps, const SolveOptions& options,
                  StepFn&& step) {
  check_eps(eps, grid);
  const int n = grid.steps();
  const bool tracking = !options.track_beta.empty();
  if (tracking && options.track_beta.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("solve: tracked forward path has " +
                          std::to_string(options.track_beta.size()) +
                          " signs, grid has " + std::to_string(n));
  }

  // Node reached at each level along the tracked forward path.
  std::vector<int> path_node;
  if (tracking) {
    path_node.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int j = 0; j < n; ++j) {
      path_node[static_cast<std::size_t>(j) + 1] =
          path_node[static_cast<std::size_t>(j)] +
          (options.track_beta[static_cast<std::size_t>(j)] > 0 ? 1 : 0);
    }
  }

  SolveReport report;
  report.scheme = scheme;
  if (tracking) {
    report.path_y.assign(static_cast<std::size_t>(n) + 1, 0.0);
    report.path_z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  }
  if (options.keep_tree) report.levels.resize(static_cast<std::size_t>(n) + 1);

  auto record = [&](const LevelValues& lv) {
    if (tracking) {
      const auto j = static_cast<std::size_t>(lv.level);
      const auto i = static_cast<std::size_t>(path_node[j]);
      report.path_y[j] = lv.y[i];
      report.path_z[j] = lv.z[i];
    }
    if (options.keep_tree) report.levels[static_cast<std::size_t>(lv.level)] = lv;
  };

  LevelValues current = terminal_layer(spec, grid, options.states);
  record(current);
  StepStats stats;
  for (int j = n - 1; j >= 0; --j) {
    current = step(current, eps[static_cast<std::size_t>(j)], stats);
    record(current);
  }
  report.y0 = current.y.front();
  report.z0 = current.z.front();
  report.fixed_point_iterations = stats.max_iterations;
  report.residual = stats.max_residual;
  return report;
}

}  // namespace bdsde::detail
