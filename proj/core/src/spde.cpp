#include "bdsde/spde.hpp"

#include <cmath>

#include "bdsde/errors.hpp"

namespace bdsde {

NodeStates forward_lattice(const ForwardSpec& fwd, const TimeGrid& grid, double x) {
  const int n = grid.steps();
  const double delta = grid.delta();
  const double shock = fwd.sigma * grid.sqrt_delta();
  auto drift = [&](double v) { return fwd.drift0 + fwd.drift1 * v; };

  NodeStates states(static_cast<std::size_t>(n) + 1);
  states[0] = {x};
  for (int j = 0; j < n; ++j) {
    const auto& cur = states[static_cast<std::size_t>(j)];
    auto& nxt = states[static_cast<std::size_t>(j) + 1];
    nxt.assign(static_cast<std::size_t>(j) + 2, 0.0);
    for (int i = 0; i <= j + 1; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      double sum = 0.0;
      int parents = 0;
      if (i <= j) {  // down-move from (j, i)
        sum += cur[ii] + drift(cur[ii]) * delta - shock;
        ++parents;
      }
      if (i >= 1) {  // up-move from (j, i-1)
        sum += cur[ii - 1] + drift(cur[ii - 1]) * delta + shock;
        ++parents;
      }
      nxt[ii] = sum / parents;
    }
  }
  if (fwd.drift1 == 0.0) {
    // Closed form; avoids drift accumulation error.
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= j; ++i) {
        states[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
            x + fwd.drift0 * grid.t(j) + fwd.sigma * grid.node_value(j, i);
      }
    }
  }
  return states;
}

Surface u_surface(const ForwardSpec& fwd, const ProblemSpec& spec,
                  const TimeGrid& grid, std::span<const double> x_grid,
                  std::span<const Sign> eps, std::uint64_t path_tag) {
  if (fwd.sigma_slope != 0.0) {
    throw UnsupportedModel(
        "spde: state-dependent volatility does not give a recombining lattice");
  }
  if (fwd.h.path_dependent()) {
    throw UnsupportedModel("spde: terminal function must depend on X_T only");
  }
  Surface out;
  out.path_tag = path_tag;
  out.x_grid.assign(x_grid.begin(), x_grid.end());
  out.u.reserve(x_grid.size());

  ProblemSpec local = spec;
  local.phi = fwd.h;
  for (double x : x_grid) {
    if (!std::isfinite(x)) throw InvalidArgument("spde: x grid must be finite");
    const NodeStates states = forward_lattice(fwd, grid, x);
    SolveOptions opts;
    opts.states = &states;
    out.u.push_back(solve_backward(local, grid, eps, opts).y0);
  }
  return out;
}

}  // namespace bdsde
