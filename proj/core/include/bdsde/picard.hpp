#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bdsde/tree_solver.hpp"

namespace bdsde {

/// Full tree of one Picard iterate; levels[j] holds level j.
struct PicardIterate {
  int p = 0;
  std::vector<LevelValues> levels;
};

/// The p = 0 iterate: identically zero, terminal level included.
PicardIterate zero_iterate(const TimeGrid& grid);

/// One Picard sweep with f and g frozen at `prev`. Terminal y is Phi on the
/// nodes, terminal z the node gradient. Fully explicit.
PicardIterate picard_step(const PicardIterate& prev, const ProblemSpec& spec,
                          const TimeGrid& grid, std::span<const Sign> eps);

enum class NormMethod {
  automatic,
  /// Average over all 2^n forward paths.
  enumeration,
  /// Exact expectation of the path supremum through level sets of the node
  /// values; cost O(n^4).
  level_sets,
  monte_carlo,
};

struct NormOptions {
  NormMethod method = NormMethod::automatic;
  int enumeration_cap = 12;
  int level_set_cap = 128;
  std::uint64_t mc_seed = 0x5eed;
  int mc_samples = 1 << 14;
};

/// E[ sup_k gamma^{k delta} dy_k^2 + delta * sum_{k<n} gamma^{k delta} dz_k^2 ]
/// over forward paths, for difference trees `diff` (levels 0..n).
double weighted_norm(std::span<const LevelValues> diff, double gamma,
                     const TimeGrid& grid, const NormOptions& options = {});

/// Squared-norm ratios are reported only above this denominator.
inline constexpr double kRatioFloor = 1e-28;

struct ContractionDiagnostics {
  /// norms[k] is the squared weighted norm of iterate k+1 minus iterate k.
  std::vector<double> norms;
  /// Same with gamma = 1.
  std::vector<double> norms_unit;
  /// ratios[k] = norms[k] / norms[k-1]; ratios[0] is always empty.
  std::vector<std::optional<double>> ratios;
  double gamma = 0.0;
  double delta = 0.0;
  bool converged = false;
};

struct PicardOptions {
  int p_max = 50;
  double tol = 1e-16;
  double gamma = 2.718281828459045;
  NormOptions norm;
};

struct PicardResult {
  PicardIterate iterate;
  ContractionDiagnostics diagnostics;
};

/// Iterates until the squared norm drops below tol or p_max sweeps are done.
/// Non-convergence is reported through diagnostics.converged, not thrown.
PicardResult picard_solve(const ProblemSpec& spec, const TimeGrid& grid,
                          std::span<const Sign> eps, const PicardOptions& options = {});

/// Node-wise difference a - b of two trees with the same layout.
std::vector<LevelValues> tree_difference(std::span<const LevelValues> a,
                                         std::span<const LevelValues> b);

}  // namespace bdsde
