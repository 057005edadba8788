#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bdsde/grid.hpp"
#include "bdsde/model.hpp"
#include "bdsde/tree_solver.hpp"

namespace bdsde {

/// Forward diffusion dX = b(X) dt + sigma dW with b(x) = drift0 + drift1 * x.
/// Only constant sigma keeps the lattice recombining; sigma_slope != 0 is
/// rejected.
struct ForwardSpec {
  double drift0 = 0.0;
  double drift1 = 0.0;
  double sigma = 1.0;
  double sigma_slope = 0.0;
  TerminalFunctional h = TerminalFunctional::identity();
};

struct Surface {
  std::vector<double> x_grid;
  /// u(0, x) for the realized eps-path.
  std::vector<double> u;
  std::uint64_t path_tag = 0;
};

/// Forward-state lattice started at x. Level j, node i carries the Euler
/// update of its parents, averaged where both parents reach it; with
/// drift1 = 0 this is exactly x + drift0 t_j + sigma (2i - j) sqrt(delta).
NodeStates forward_lattice(const ForwardSpec& fwd, const TimeGrid& grid, double x);

/// u(0, x) = Y_0^{0,x} for each x: terminal y = h(X_n), f and g evaluated at
/// the node state. spec.phi is ignored.
Surface u_surface(const ForwardSpec& fwd, const ProblemSpec& spec,
                  const TimeGrid& grid, std::span<const double> x_grid,
                  std::span<const Sign> eps, std::uint64_t path_tag = 0);

}  // namespace bdsde
