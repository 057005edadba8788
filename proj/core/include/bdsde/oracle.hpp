#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bdsde/grid.hpp"
#include "bdsde/model.hpp"
#include "bdsde/tree_solver.hpp"

namespace bdsde {

/// Exact discrete solution along one joint path: y_path has n+1 entries,
/// z_path has n (z_j for j = 0..n-1).
struct ExactSolution {
  std::vector<double> y_path;
  std::vector<double> z_path;
};

/// Y_j = (B_n - B_j) + W_j, Z_j = 1.
ExactSolution exact_transport(const TimeGrid& grid, const NoisePath& path);

/// Y_j = sqrt(delta) * sum_{m=j}^{n-1} t_{m+1} eps_{m+1}, Z_j = 0.
ExactSolution exact_time_integral(const TimeGrid& grid, const NoisePath& path);

/// Dispatches on spec.oracle; empty when the model has no closed form.
std::optional<ExactSolution> exact_solution(const ProblemSpec& spec,
                                            const TimeGrid& grid,
                                            const NoisePath& path);

inline constexpr int kJointEnumerationCap = 12;

/// A statistic of one solve. It sees the full tree and the eps-path, and
/// returns values that are already averaged over the forward noise.
using Statistic =
    std::function<std::vector<double>(const SolveReport&, std::span<const Sign>)>;

/// Runs `scheme` for every one of the 2^n eps-paths and averages the
/// statistic with weight 2^-n each. Exact under the discrete law.
std::vector<double> brute_force_expectations(const ProblemSpec& spec,
                                             const TimeGrid& grid,
                                             const Statistic& statistic,
                                             Scheme scheme = Scheme::implicit,
                                             int cap = kJointEnumerationCap);

double brute_force_expectation(
    const ProblemSpec& spec, const TimeGrid& grid,
    const std::function<double(const SolveReport&, std::span<const Sign>)>& statistic,
    Scheme scheme = Scheme::implicit, int cap = kJointEnumerationCap);

/// Solve with the full tree kept, dispatching on the scheme.
SolveReport solve_with(Scheme scheme, const ProblemSpec& spec, const TimeGrid& grid,
                       std::span<const Sign> eps, SolveOptions options = {});

/// Forward-noise expectation of fn(value) over one level of the tree.
double level_expectation(std::span<const double> values,
                         const std::function<double(double)>& fn);

/// 1 + sum_{p>=1} b^p / p! * (1 + delta)...(1 + (p-1) delta). Requires
/// b >= 0, delta > 0 and b*delta < 1.
double gronwall_epsilon(double delta, double b);

/// C * exp((1 + 2K + 7K^2) T) with
/// C = |f(0,0)|^2 + 3|g(0,0)|^2 + (1 + K delta + 3 K^2 delta + 3 alpha^2 sqrt(delta)) E|xi|^2.
/// For time-dependent coefficients f(0,0), g(0,0) take the largest magnitude
/// over the grid times.
double apriori_bound_rhs(const ProblemSpec& spec, const TimeGrid& grid,
                         double xi_second_moment);

/// The gate (1 + 2K + 7K^2) delta < 1.
bool apriori_gate(const ProblemSpec& spec, const TimeGrid& grid);

/// Martingale of a terminal variable on the (non-recombining) forward tree.
/// Level j holds 2^j nodes indexed by the forward prefix, first sign most
/// significant and +1 as bit 0; the up child of node k is 2k, the down child
/// 2k + 1.
struct MartingaleTree {
  std::vector<std::vector<double>> m;
  /// z[j] for j = 0..n-1.
  std::vector<std::vector<double>> z;
};

/// M_j = E[X | beta_1..beta_j] by backward averaging and
/// Z_j = (M_{j+1}^+ - M_{j+1}^-) / (2 sqrt(delta)), so that
/// M_{j+1} - M_j = Z_j sqrt(delta) beta_{j+1} identically.
/// `terminal` receives the walk W_0..W_n.
MartingaleTree martingale_representation(
    const std::function<double(std::span<const double>)>& terminal,
    const TimeGrid& grid, int cap = kDefaultEnumerationCap);

}  // namespace bdsde
