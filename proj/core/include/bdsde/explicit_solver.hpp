#pragma once

#include <span>

#include "bdsde/tree_solver.hpp"

namespace bdsde {

/// Modified explicit step: f is evaluated at the conditional mean of the next
/// level, so no fixed-point solve is needed. The g-term uses the conditional
/// average over the forward branch, as in the implicit step.
LevelValues explicit_step(const LevelValues& next, Sign eps_sign,
                          const ProblemSpec& spec, const TimeGrid& grid,
                          const NodeStates* states = nullptr);

/// Explicit scheme for one backward-noise path; shares the terminal layer
/// with solve_backward. `tol`, `max_iterations` and `terminal_z` are ignored.
SolveReport solve_backward_explicit(const ProblemSpec& spec, const TimeGrid& grid,
                                    std::span<const Sign> eps,
                                    const SolveOptions& options = {});

}  // namespace bdsde
