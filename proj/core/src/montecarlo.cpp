#include "bdsde/montecarlo.hpp"

#include <cmath>
#include <string>

#include "bdsde/errors.hpp"
#include "bdsde/explicit_solver.hpp"
#include "bdsde/numeric.hpp"
#include "bdsde/oracle.hpp"

namespace bdsde {
namespace {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
};

MeanVar mean_var(std::span<const double> v) {
  MeanVar out;
  if (v.empty()) return out;
  out.mean = pairwise_sum(v) / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - out.mean) * (v[i] - out.mean);
  out.var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
  return out;
}

constexpr double kZ95 = 1.96;

SolveReport run_tracked(Scheme scheme, const ProblemSpec& spec, const TimeGrid& grid,
                        const NoisePath& path, double tol) {
  SolveOptions opts;
  opts.tol = tol;
  opts.track_beta = path.beta;
  switch (scheme) {
    case Scheme::implicit:
      return solve_backward(spec, grid, path.eps, opts);
    case Scheme::explicit_modified:
      return solve_backward_explicit(spec, grid, path.eps, opts);
    case Scheme::picard: {
      SolveReport r = solve_with(Scheme::picard, spec, grid, path.eps, opts);
      std::size_t node = 0;
      r.path_y.resize(r.levels.size());
      r.path_z.resize(r.levels.size());
      for (std::size_t j = 0; j < r.levels.size(); ++j) {
        if (j > 0 && path.beta[j - 1] > 0) ++node;
        r.path_y[j] = r.levels[j].y[node];
        r.path_z[j] = r.levels[j].z[node];
      }
      return r;
    }
  }
  throw InvalidArgument("unknown scheme");
}

}  // namespace

double path_error(std::span<const double> y, std::span<const double> z,
                  std::span<const double> y_ref, std::span<const double> z_ref,
                  double delta) {
  double sup = 0.0;
  for (std::size_t j = 0; j < y_ref.size(); ++j) {
    const double d = y[j] - y_ref[j];
    sup = std::max(sup, d * d);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < z_ref.size(); ++j) {
    const double d = z[j] - z_ref[j];
    sum += d * d;
  }
  return sup + delta * sum;
}

McReport estimate(const ProblemSpec& spec, const TimeGrid& grid, std::size_t n_samples,
                  std::uint64_t seed, const McOptions& options) {
  if (n_samples == 0) throw EmptyReport("estimate: n_samples must be positive");
  validate_spec(spec, grid);

  McReport report;
  report.seed = seed;
  report.scheme = options.scheme;

  std::vector<double> values;
  std::vector<double> root_errors;
  std::vector<double> path_errors;
  values.reserve(n_samples);
  const bool has_oracle = spec.oracle != ExactOracle::none;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const NoisePath path = sample_path(grid, seed, k);
    SolveReport r;
    try {
      r = run_tracked(options.scheme, spec, grid, path, options.tol);
    } catch (const NumericFailure&) {
      ++report.n_failed;
      continue;
    }
    values.push_back(options.statistic ? options.statistic(r, path) : r.y0);
    if (has_oracle) {
      const auto exact = exact_solution(spec, grid, path);
      const double d = r.y0 - exact->y_path.front();
      root_errors.push_back(d * d);
      path_errors.push_back(
          path_error(r.path_y, r.path_z, exact->y_path, exact->z_path, grid.delta()));
    }
  }
  report.n_samples = values.size();
  if (values.empty()) throw EmptyReport("estimate: every sample failed");
  const MeanVar mv = mean_var(values);
  report.mean_y0 = mv.mean;
  report.var_y0 = mv.var;
  report.ci_halfwidth = kZ95 * std::sqrt(mv.var / static_cast<double>(values.size()));
  if (has_oracle) {
    report.l2_error_vs_oracle = mean_var(root_errors).mean;
    report.path_error_vs_oracle = mean_var(path_errors).mean;
  }
  return report;
}

ConvergenceTable convergence_study(const ProblemSpec& spec, double horizon,
                                   std::span<const int> n_list, std::size_t samples,
                                   std::uint64_t seed) {
  if (n_list.empty()) throw InvalidArgument("convergence_study: empty n list");
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) {
      throw InvalidArgument("convergence_study: n list must be strictly increasing");
    }
  }
  if (samples == 0) throw EmptyReport("convergence_study: samples must be positive");

  ConvergenceTable table;
  const bool has_oracle = spec.oracle != ExactOracle::none;
  table.reference = has_oracle ? "oracle" : "implicit-vs-explicit";
  for (int n : n_list) {
    const TimeGrid grid(horizon, n);
    validate_spec(spec, grid);
    std::vector<double> errors;
    errors.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
      const NoisePath path = sample_path(grid, seed, k);
      const SolveReport r = run_tracked(Scheme::implicit, spec, grid, path, 1e-12);
      if (has_oracle) {
        const auto exact = exact_solution(spec, grid, path);
        errors.push_back(
            path_error(r.path_y, r.path_z, exact->y_path, exact->z_path, grid.delta()));
      } else {
        const SolveReport e =
            run_tracked(Scheme::explicit_modified, spec, grid, path, 1e-12);
        const auto z_ref = std::span<const double>(e.path_z).first(static_cast<std::size_t>(n));
        errors.push_back(path_error(r.path_y, r.path_z, e.path_y, z_ref, grid.delta()));
      }
    }
    const MeanVar mv = mean_var(errors);
    table.rows.push_back({n, mv.mean, samples,
                          kZ95 * std::sqrt(mv.var / static_cast<double>(samples))});
  }

  bool fit = table.rows.size() >= 2;
  for (const auto& row : table.rows) fit = fit && row.error > 1e-24;
  if (fit) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(table.rows.size());
    for (const auto& row : table.rows) {
      const double x = std::log(static_cast<double>(row.n));
      const double y = std::log(row.error);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    table.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return table;
}

}  // namespace bdsde
