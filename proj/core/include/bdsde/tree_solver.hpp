#pragma once

#include <span>
#include <vector>

#include "bdsde/grid.hpp"
#include "bdsde/model.hpp"

namespace bdsde {

/// Node-indexed (y, z) on one level of the recombining forward tree,
/// conditioned on a fixed eps-suffix. Node i of level j sits at
/// W = (2i - j) sqrt(delta); the up-move maps i to i + 1.
struct LevelValues {
  int level = 0;
  std::vector<double> y;
  std::vector<double> z;
};

/// Forward state per node and level, used when coefficients depend on x.
/// When absent the state is the walk value W itself.
using NodeStates = std::vector<std::vector<double>>;

enum class Scheme { implicit, explicit_modified, picard };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

enum class TerminalZRule {
  /// z_n is the discrete gradient of y_n along the node axis.
  central_difference,
  /// The first backward step solves z = slope + (g(Y+, z) - g(Y-, z))/2 * eps
  /// by fixed point instead of using z_n; z_n is still reported as the
  /// central difference.
  psi_fixed_point,
};

struct SolveOptions {
  bool keep_tree = false;
  double tol = 1e-12;
  int max_iterations = 100;
  TerminalZRule terminal_z = TerminalZRule::central_difference;
  /// When set (n signs), the report carries y and z along this forward path.
  std::span<const Sign> track_beta;
  const NodeStates* states = nullptr;
};

struct SolveReport {
  Scheme scheme = Scheme::implicit;
  /// levels[j] for j = 0..n when keep_tree is set.
  std::vector<LevelValues> levels;
  double y0 = 0.0;
  double z0 = 0.0;
  int fixed_point_iterations = 0;
  double residual = 0.0;
  /// y_j and z_j along track_beta, j = 0..n.
  std::vector<double> path_y;
  std::vector<double> path_z;
};

/// Discrete gradient along the node axis (node spacing 2 sqrt(delta)):
/// central differences inside, one-sided at the two ends.
std::vector<double> node_gradient(std::span<const double> y, const TimeGrid& grid);

/// y_n = Phi(node) and z_n = node_gradient(y_n).
LevelValues terminal_layer(const ProblemSpec& spec, const TimeGrid& grid,
                           const NodeStates* states = nullptr);

struct ThetaResult {
  double y = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves y - f(t, y, z) * delta = rhs. Closed form when f is affine in y or
/// free of y, otherwise the contraction y <- rhs + f(t, y, z) * delta started
/// at y = rhs.
ThetaResult theta_invert(double rhs, double z, double t, const ProblemSpec& spec,
                         const TimeGrid& grid, double tol = 1e-12,
                         int max_iterations = 100, double x = 0.0);

struct StepStats {
  int max_iterations = 0;
  double max_residual = 0.0;
};

/// One step of the implicit scheme from level j+1 to level j.
/// `eps_sign` is epsilon_{j+1}.
LevelValues implicit_step(const LevelValues& next, Sign eps_sign,
                          const ProblemSpec& spec, const TimeGrid& grid,
                          const SolveOptions& options = {},
                          StepStats* stats = nullptr);

/// Implicit scheme for one backward-noise path. The step from level j+1 to j
/// consumes eps[j].
SolveReport solve_backward(const ProblemSpec& spec, const TimeGrid& grid,
                           std::span<const Sign> eps,
                           const SolveOptions& options = {});

/// Largest violation of the per-step scheme equation over all nodes and both
/// forward branches, for a tree produced with keep_tree. For the implicit
/// scheme f is evaluated at (y_j, z_j); for the explicit scheme at the
/// conditional mean of y_{j+1}.
double scheme_residual(const ProblemSpec& spec, const TimeGrid& grid,
                       std::span<const Sign> eps, const SolveReport& report,
                       const NodeStates* states = nullptr);

/// Forward-state value of node (j, i): the explicit state table when given,
/// otherwise the walk value.
inline double node_state(const NodeStates* states, const TimeGrid& grid,
                         int level, int node) {
  if (states != nullptr) {
    return (*states)[static_cast<std::size_t>(level)][static_cast<std::size_t>(node)];
  }
  return grid.node_value(level, node);
}

namespace detail {

/// Backward sweep shared by the implicit and explicit schemes.
template <class StepFn>
SolveReport sweep(Scheme scheme, const ProblemSpec& spec, const TimeGrid& grid,
                  std::span<const Sign> eps, const SolveOptions& options,
                  StepFn&& step);

void check_eps(std::span<const Sign> eps, const TimeGrid& grid);

}  // namespace detail

}  // namespace bdsde

#include "bdsde/detail/sweep.ipp"
