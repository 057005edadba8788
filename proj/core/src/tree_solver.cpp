#include "bdsde/tree_solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bdsde/errors.hpp"

namespace bdsde {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::implicit:
      return "implicit";
    case Scheme::explicit_modified:
      return "explicit";
    case Scheme::picard:
      return "picard";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "implicit") return Scheme::implicit;
  if (name == "explicit") return Scheme::explicit_modified;
  if (name == "picard") return Scheme::picard;
  throw InvalidArgument("unknown scheme '" + name + "'");
}

std::vector<double> node_gradient(std::span<const double> y, const TimeGrid& grid) {
  const std::size_t m = y.size();
  std::vector<double> z(m, 0.0);
  if (m < 2) return z;
  const double h = 2.0 * grid.sqrt_delta();
  z.front() = (y[1] - y[0]) / h;
  z.back() = (y[m - 1] - y[m - 2]) / h;
  for (std::size_t i = 1; i + 1 < m; ++i) z[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
  return z;
}

LevelValues terminal_layer(const ProblemSpec& spec, const TimeGrid& grid,
                           const NodeStates* states) {
  const int n = grid.steps();
  LevelValues out;
  out.level = n;
  out.y.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    out.y[static_cast<std::size_t>(i)] =
        spec.phi.at_terminal(node_state(states, grid, n, i));
  }
  out.z = node_gradient(out.y, grid);
  return out;
}

ThetaResult theta_invert(double rhs, double z, double t, const ProblemSpec& spec,
                         const TimeGrid& grid, double tol, int max_iterations,
                         double x) {
  const double delta = grid.delta();
  const auto& f = spec.f;
  ThetaResult out;

  if (!f.depends_on_y()) {
    out.y = rhs + f(t, 0.0, z, x) * delta;
  } else if (const auto* lin = std::get_if<Coefficient::LinearYZ>(&f.repr())) {
    out.y = (rhs + lin->b * z * delta) / (1.0 - lin->a * delta);
  } else if (std::holds_alternative<Coefficient::TabulatedAffine>(f.repr())) {
    // a(t) y + b(t) z: same closed form with the coefficients active at t.
    const double a = f(t, 1.0, 0.0, x);
    const double b = f(t, 0.0, 1.0, x);
    out.y = (rhs + b * z * delta) / (1.0 - a * delta);
  } else {
    double y = rhs;
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iterations; ++it) {
      const double next = rhs + f(t, y, z, x) * delta;
      out.iterations = it;
      const bool stalled = next == y;
      y = next;
      residual = std::abs(y - f(t, y, z, x) * delta - rhs);
      const double floor =
          16.0 * std::numeric_limits<double>::epsilon() * (std::abs(rhs) + std::abs(y) + 1.0);
      if (residual <= tol || (stalled && residual <= floor)) {
        out.y = y;
        out.residual = residual;
        return out;
      }
    }
    throw NumericFailure("theta inversion did not converge in " +
                             std::to_string(max_iterations) +
                             " iterations, residual " + std::to_string(residual),
                         -1, -1, residual);
  }
  out.residual = std::abs(out.y - f(t, out.y, z, x) * delta - rhs);
  return out;
}

namespace {

/// z solving z = slope + (g(Y+, z) - g(Y-, z)) / 2 * eps, contraction alpha.
double psi_solve(double slope, double y_up, double y_down, Sign eps, double t,
                 double x_up, double x_down, const ProblemSpec& spec, double tol,
                 int max_iterations, int level, int node) {
  const auto& g = spec.g;
  double z = slope;
  for (int it = 0; it < max_iterations; ++it) {
    const double next = slope + 0.5 * (g(t, y_up, z, x_up) - g(t, y_down, z, x_down)) * eps;
    const double change = std::abs(next - z);
    z = next;
    if (change <= tol) return z;
  }
  throw NumericFailure("terminal Psi fixed point did not converge", level, node,
                       std::abs(z - slope));
}

}  // namespace

LevelValues implicit_step(const LevelValues& next, Sign eps_sign,
                          const ProblemSpec& spec, const TimeGrid& grid,
                          const SolveOptions& options, StepStats* stats) {
  const int j = next.level - 1;
  if (j < 0) throw InvalidArgument("implicit_step: level 0 has no predecessor");
  const double sd = grid.sqrt_delta();
  const double t_j = grid.t(j);
  const double t_next = grid.t(j + 1);
  const double eps = eps_sign;
  const bool psi = options.terminal_z == TerminalZRule::psi_fixed_point &&
                   next.level == grid.steps();
  const auto& g = spec.g;

  LevelValues out;
  out.level = j;
  out.y.resize(static_cast<std::size_t>(j) + 1);
  out.z.resize(static_cast<std::size_t>(j) + 1);
  for (int i = 0; i <= j; ++i) {
    const auto up = static_cast<std::size_t>(i) + 1;
    const auto down = static_cast<std::size_t>(i);
    const double y_up = next.y[up];
    const double y_down = next.y[down];
    const double x_up = node_state(options.states, grid, j + 1, i + 1);
    const double x_down = node_state(options.states, grid, j + 1, i);
    const double slope = (y_up - y_down) / (2.0 * sd);

    double z = 0.0;
    double g_up = 0.0;
    double g_down = 0.0;
    if (psi) {
      z = psi_solve(slope, y_up, y_down, eps_sign, t_next, x_up, x_down, spec,
                    options.tol, options.max_iterations, j, i);
      g_up = g(t_next, y_up, z, x_up);
      g_down = g(t_next, y_down, z, x_down);
    } else {
      g_up = g(t_next, y_up, next.z[up], x_up);
      g_down = g(t_next, y_down, next.z[down], x_down);
      z = slope + 0.5 * (g_up - g_down) * eps;
    }
    const double rhs = 0.5 * (y_up + y_down) + 0.5 * sd * (g_up + g_down) * eps;

    ThetaResult theta;
    try {
      theta = theta_invert(rhs, z, t_j, spec, grid, options.tol,
                           options.max_iterations,
                           node_state(options.states, grid, j, i));
    } catch (const NumericFailure& e) {
      throw NumericFailure(std::string(e.what()) + " at level " +
                               std::to_string(j) + ", node " + std::to_string(i),
                           j, i, e.residual());
    }
    out.y[down] = theta.y;
    out.z[down] = z;
    if (stats != nullptr) {
      stats->max_iterations = std::max(stats->max_iterations, theta.iterations);
      stats->max_residual = std::max(stats->max_residual, theta.residual);
    }
  }
  return out;
}

namespace detail {

void check_eps(std::span<const Sign> eps, const TimeGrid& grid) {
  if (eps.size() != static_cast<std::size_t>(grid.steps())) {
    throw InvalidArgument("solve: eps has " + std::to_string(eps.size()) +
                          " signs, grid has " + std::to_string(grid.steps()) +
                          " steps");
  }
  for (Sign s : eps) {
    if (s != 1 && s != -1) throw InvalidArgument("solve: eps entries must be +1 or -1");
  }
}

}  // namespace detail

SolveReport solve_backward(const ProblemSpec& spec, const TimeGrid& grid,
                           std::span<const Sign> eps, const SolveOptions& options) {
  validate_spec(spec, grid);
  return detail::sweep(Scheme::implicit, spec, grid, eps, options,
                       [&](const LevelValues& next, Sign e, StepStats& stats) {
                         return implicit_step(next, e, spec, grid, options, &stats);
                       });
}

double scheme_residual(const ProblemSpec& spec, const TimeGrid& grid,
                       std::span<const Sign> eps, const SolveReport& report,
                       const NodeStates* states) {
  const int n = grid.steps();
  if (report.levels.size() != static_cast<std::size_t>(n) + 1) {
    throw InvalidArgument("scheme_residual: report must keep the full tree");
  }
  const double sd = grid.sqrt_delta();
  const double delta = grid.delta();
  double worst = 0.0;
  for (int j = n - 1; j >= 0; --j) {
    const auto& cur = report.levels[static_cast<std::size_t>(j)];
    const auto& nxt = report.levels[static_cast<std::size_t>(j) + 1];
    const double e = eps[static_cast<std::size_t>(j)];
    for (int i = 0; i <= j; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const double x = node_state(states, grid, j, i);
      const double y = cur.y[ii];
      const double z = cur.z[ii];
      const double f_arg = report.scheme == Scheme::explicit_modified
                               ? 0.5 * (nxt.y[ii + 1] + nxt.y[ii])
                               : y;
      const double drift = spec.f(grid.t(j), f_arg, z, x) * delta;
      for (int branch : {1, -1}) {
        const auto k = branch > 0 ? ii + 1 : ii;
        const double xk = node_state(states, grid, j + 1, branch > 0 ? i + 1 : i);
        const double y_next = nxt.y[k];
        const double noise = spec.g(grid.t(j + 1), y_next, nxt.z[k], xk) * sd * e;
        const double rebuilt = y_next + drift + noise - z * sd * branch;
        worst = std::max(worst, std::abs(rebuilt - y));
      }
    }
  }
  return worst;
}

}  // namespace bdsde
