#include "bdsde/oracle.hpp"

#include <cmath>
#include <string>

#include "bdsde/errors.hpp"
#include "bdsde/explicit_solver.hpp"
#include "bdsde/numeric.hpp"
#include "bdsde/picard.hpp"

namespace bdsde {

ExactSolution exact_transport(const TimeGrid& grid, const NoisePath& path) {
  const WalkValues walk = walk_values(path, grid);
  const auto n = static_cast<std::size_t>(grid.steps());
  ExactSolution out;
  out.y_path.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    out.y_path[j] = (walk.B[n] - walk.B[j]) + walk.W[j];
  }
  out.z_path.assign(n, 1.0);
  return out;
}

ExactSolution exact_time_integral(const TimeGrid& grid, const NoisePath& path) {
  const int n = grid.steps();
  if (path.eps.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("exact_time_integral: path length does not match grid");
  }
  ExactSolution out;
  out.y_path.assign(static_cast<std::size_t>(n) + 1, 0.0);
  // Accumulate from the terminal end, the same order as the backward sweep.
  for (int j = n - 1; j >= 0; --j) {
    const auto jj = static_cast<std::size_t>(j);
    out.y_path[jj] =
        out.y_path[jj + 1] + grid.sqrt_delta() * grid.t(j + 1) * path.eps[jj];
  }
  out.z_path.assign(static_cast<std::size_t>(n), 0.0);
  return out;
}

std::optional<ExactSolution> exact_solution(const ProblemSpec& spec,
                                            const TimeGrid& grid,
                                            const NoisePath& path) {
  switch (spec.oracle) {
    case ExactOracle::transport:
      return exact_transport(grid, path);
    case ExactOracle::time_integral:
      return exact_time_integral(grid, path);
    case ExactOracle::none:
      break;
  }
  return std::nullopt;
}

SolveReport solve_with(Scheme scheme, const ProblemSpec& spec, const TimeGrid& grid,
                       std::span<const Sign> eps, SolveOptions options) {
  options.keep_tree = true;
  switch (scheme) {
    case Scheme::implicit:
      return solve_backward(spec, grid, eps, options);
    case Scheme::explicit_modified:
      return solve_backward_explicit(spec, grid, eps, options);
    case Scheme::picard: {
      PicardOptions po;
      po.tol = 1e-28;
      po.p_max = 200;
      po.norm.method = NormMethod::level_sets;
      auto result = picard_solve(spec, grid, eps, po);
      SolveReport report;
      report.scheme = Scheme::picard;
      report.levels = std::move(result.iterate.levels);
      report.y0 = report.levels.front().y.front();
      report.z0 = report.levels.front().z.front();
      report.fixed_point_iterations = result.iterate.p;
      return report;
    }
  }
  throw InvalidArgument("unknown scheme");
}

std::vector<double> brute_force_expectations(const ProblemSpec& spec,
                                             const TimeGrid& grid,
                                             const Statistic& statistic,
                                             Scheme scheme, int cap) {
  const int n = grid.steps();
  const std::uint64_t count = sign_sequence_count(n, cap);
  std::vector<std::vector<double>> per_path;
  per_path.reserve(static_cast<std::size_t>(count));
  enumerate_sign_sequences(
      n,
      [&](std::span<const Sign> eps) {
        const SolveReport report = solve_with(scheme, spec, grid, eps);
        per_path.push_back(statistic(report, eps));
      },
      cap);

  const std::size_t width = per_path.front().size();
  std::vector<double> out(width, 0.0);
  std::vector<double> column(per_path.size());
  for (std::size_t c = 0; c < width; ++c) {
    for (std::size_t k = 0; k < per_path.size(); ++k) {
      if (per_path[k].size() != width) {
        throw InvalidArgument("brute_force_expectations: statistic width varies");
      }
      column[k] = per_path[k][c];
    }
    out[c] = pairwise_sum(column) / static_cast<double>(count);
  }
  return out;
}

double brute_force_expectation(
    const ProblemSpec& spec, const TimeGrid& grid,
    const std::function<double(const SolveReport&, std::span<const Sign>)>& statistic,
    Scheme scheme, int cap) {
  return brute_force_expectations(
             spec, grid,
             [&](const SolveReport& r, std::span<const Sign> eps) {
               return std::vector<double>{statistic(r, eps)};
             },
             scheme, cap)
      .front();
}

double level_expectation(std::span<const double> values,
                         const std::function<double(double)>& fn) {
  const auto w = binomial_weights(static_cast<int>(values.size()) - 1);
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = w[i] * fn(values[i]);
  return pairwise_sum(terms);
}

double gronwall_epsilon(double delta, double b) {
  if (!(delta > 0.0) || !(b >= 0.0)) {
    throw InvalidArgument("gronwall_epsilon: need delta > 0 and b >= 0");
  }
  if (b * delta >= 1.0) {
    throw DivergentSeries("gronwall_epsilon: b*delta=" + std::to_string(b * delta) +
                          " >= 1");
  }
  double sum = 1.0;
  double term = b;
  for (long p = 1; p <= 1'000'000; ++p) {
    if (term < 1e-16 * sum) break;
    sum += term;
    term *= b * (1.0 + static_cast<double>(p) * delta) / static_cast<double>(p + 1);
  }
  return sum;
}

bool apriori_gate(const ProblemSpec& spec, const TimeGrid& grid) {
  const double K = spec.K;
  return (1.0 + 2.0 * K + 7.0 * K * K) * grid.delta() < 1.0;
}

double apriori_bound_rhs(const ProblemSpec& spec, const TimeGrid& grid,
                         double xi_second_moment) {
  const double K = spec.K;
  const double rate = 1.0 + 2.0 * K + 7.0 * K * K;
  if (!apriori_gate(spec, grid)) {
    // Smallest n with rate * T / n < 1.
    const int min_n = static_cast<int>(std::floor(rate * grid.horizon())) + 1;
    throw StepTooCoarse("a-priori bound: (1+2K+7K^2)*delta=" +
                            std::to_string(rate * grid.delta()) + " >= 1",
                        min_n);
  }
  double f00 = 0.0;
  double g00 = 0.0;
  for (int j = 0; j <= grid.steps(); ++j) {
    f00 = std::max(f00, std::abs(spec.f(grid.t(j), 0.0, 0.0)));
    g00 = std::max(g00, std::abs(spec.g(grid.t(j), 0.0, 0.0)));
  }
  const double d = grid.delta();
  const double c = f00 * f00 + 3.0 * g00 * g00 +
                   (1.0 + K * d + 3.0 * K * K * d +
                    3.0 * spec.alpha * spec.alpha * std::sqrt(d)) *
                       xi_second_moment;
  return c * std::exp(rate * grid.horizon());
}

MartingaleTree martingale_representation(
    const std::function<double(std::span<const double>)>& terminal,
    const TimeGrid& grid, int cap) {
  const int n = grid.steps();
  const std::uint64_t count = sign_sequence_count(n, cap);

  MartingaleTree out;
  out.m.resize(static_cast<std::size_t>(n) + 1);
  out.z.resize(static_cast<std::size_t>(n));
  auto& leaves = out.m.back();
  leaves.resize(static_cast<std::size_t>(count));
  std::uint64_t k = 0;
  enumerate_sign_sequences(
      n,
      [&](std::span<const Sign> beta) {
        const auto walk = scaled_partial_sums(beta, grid);
        leaves[static_cast<std::size_t>(k++)] = terminal(walk);
      },
      cap);

  const double sd = grid.sqrt_delta();
  for (int j = n - 1; j >= 0; --j) {
    const auto& child = out.m[static_cast<std::size_t>(j) + 1];
    auto& level = out.m[static_cast<std::size_t>(j)];
    auto& z = out.z[static_cast<std::size_t>(j)];
    const std::size_t width = std::size_t{1} << j;
    level.resize(width);
    z.resize(width);
    for (std::size_t node = 0; node < width; ++node) {
      const double up = child[2 * node];
      const double down = child[2 * node + 1];
      level[node] = 0.5 * (up + down);
      z[node] = (up - down) / (2.0 * sd);
    }
  }
  return out;
}

}  // namespace bdsde
