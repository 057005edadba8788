#include "bdsde/explicit_solver.hpp"

#include <cmath>

#include "bdsde/errors.hpp"

namespace bdsde {

LevelValues explicit_step(const LevelValues& next, Sign eps_sign,
                          const ProblemSpec& spec, const TimeGrid& grid,
                          const NodeStates* states) {
  const int j = next.level - 1;
  if (j < 0) throw InvalidArgument("explicit_step: level 0 has no predecessor");
  const double sd = grid.sqrt_delta();
  const double delta = grid.delta();
  const double t_j = grid.t(j);
  const double t_next = grid.t(j + 1);
  const double eps = eps_sign;

  LevelValues out;
  out.level = j;
  out.y.resize(static_cast<std::size_t>(j) + 1);
  out.z.resize(static_cast<std::size_t>(j) + 1);
  for (int i = 0; i <= j; ++i) {
    const auto up = static_cast<std::size_t>(i) + 1;
    const auto down = static_cast<std::size_t>(i);
    const double y_up = next.y[up];
    const double y_down = next.y[down];
    const double g_up = spec.g(t_next, y_up, next.z[up], node_state(states, grid, j + 1, i + 1));
    const double g_down =
        spec.g(t_next, y_down, next.z[down], node_state(states, grid, j + 1, i));
    const double mean = 0.5 * (y_up + y_down);
    const double z = (y_up - y_down) / (2.0 * sd) + 0.5 * (g_up - g_down) * eps;
    const double y = mean + spec.f(t_j, mean, z, node_state(states, grid, j, i)) * delta +
                     0.5 * sd * (g_up + g_down) * eps;
    if (!std::isfinite(y) || !std::isfinite(z)) {
      throw NumericFailure("explicit step produced a non-finite value", j, i, y);
    }
    out.y[down] = y;
    out.z[down] = z;
  }
  return out;
}

SolveReport solve_backward_explicit(const ProblemSpec& spec, const TimeGrid& grid,
                                    std::span<const Sign> eps,
                                    const SolveOptions& options) {
  validate_spec(spec, grid);
  return detail::sweep(Scheme::explicit_modified, spec, grid, eps, options,
                       [&](const LevelValues& next, Sign e, StepStats&) {
                         return explicit_step(next, e, spec, grid, options.states);
                       });
}

}  // namespace bdsde
