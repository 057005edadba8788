#include "bdsde/picard.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bdsde/errors.hpp"
#include "bdsde/numeric.hpp"

namespace bdsde {

PicardIterate zero_iterate(const TimeGrid& grid) {
  PicardIterate it;
  it.levels.resize(static_cast<std::size_t>(grid.steps()) + 1);
  for (int j = 0; j <= grid.steps(); ++j) {
    auto& lv = it.levels[static_cast<std::size_t>(j)];
    lv.level = j;
    lv.y.assign(static_cast<std::size_t>(j) + 1, 0.0);
    lv.z.assign(static_cast<std::size_t>(j) + 1, 0.0);
  }
  return it;
}

PicardIterate picard_step(const PicardIterate& prev, const ProblemSpec& spec,
                          const TimeGrid& grid, std::span<const Sign> eps) {
  detail::check_eps(eps, grid);
  const int n = grid.steps();
  if (prev.levels.size() != static_cast<std::size_t>(n) + 1) {
    throw InvalidArgument("picard_step: previous iterate does not match the grid");
  }
  const double sd = grid.sqrt_delta();
  const double delta = grid.delta();

  PicardIterate out;
  out.p = prev.p + 1;
  out.levels.resize(static_cast<std::size_t>(n) + 1);
  out.levels.back() = terminal_layer(spec, grid);

  for (int j = n - 1; j >= 0; --j) {
    const auto& nxt = out.levels[static_cast<std::size_t>(j) + 1];
    const auto& old_nxt = prev.levels[static_cast<std::size_t>(j) + 1];
    const auto& old_cur = prev.levels[static_cast<std::size_t>(j)];
    const double e = eps[static_cast<std::size_t>(j)];
    const double t_j = grid.t(j);
    const double t_next = grid.t(j + 1);
    auto& cur = out.levels[static_cast<std::size_t>(j)];
    cur.level = j;
    cur.y.resize(static_cast<std::size_t>(j) + 1);
    cur.z.resize(static_cast<std::size_t>(j) + 1);
    for (int i = 0; i <= j; ++i) {
      const auto up = static_cast<std::size_t>(i) + 1;
      const auto down = static_cast<std::size_t>(i);
      const double g_up = spec.g(t_next, old_nxt.y[up], old_nxt.z[up],
                                 grid.node_value(j + 1, i + 1));
      const double g_down = spec.g(t_next, old_nxt.y[down], old_nxt.z[down],
                                   grid.node_value(j + 1, i));
      const double f_old =
          spec.f(t_j, old_cur.y[down], old_cur.z[down], grid.node_value(j, i));
      cur.z[down] = (nxt.y[up] - nxt.y[down]) / (2.0 * sd) + 0.5 * (g_up - g_down) * e;
      cur.y[down] = 0.5 * (nxt.y[up] + nxt.y[down]) + f_old * delta +
                    0.5 * sd * (g_up + g_down) * e;
    }
  }
  return out;
}

std::vector<LevelValues> tree_difference(std::span<const LevelValues> a,
                                         std::span<const LevelValues> b) {
  if (a.size() != b.size()) throw InvalidArgument("tree_difference: level counts differ");
  std::vector<LevelValues> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].y.size() != b[j].y.size() || a[j].z.size() != b[j].z.size()) {
      throw InvalidArgument("tree_difference: level " + std::to_string(j) +
                            " layouts differ");
    }
    out[j].level = a[j].level;
    out[j].y.resize(a[j].y.size());
    out[j].z.resize(a[j].z.size());
    for (std::size_t i = 0; i < a[j].y.size(); ++i) {
      out[j].y[i] = a[j].y[i] - b[j].y[i];
      out[j].z[i] = a[j].z[i] - b[j].z[i];
    }
  }
  return out;
}

namespace {

using Table = std::vector<std::vector<double>>;

// sup-part terms gamma^{k delta} dy^2 and sum-part terms
// delta gamma^{k delta} dz^2 (k < n), per node.
struct NormTerms {
  Table sup_terms;
  Table sum_terms;
};

NormTerms norm_terms(std::span<const LevelValues> diff, double gamma,
                     const TimeGrid& grid) {
  const int n = grid.steps();
  NormTerms t;
  t.sup_terms.resize(static_cast<std::size_t>(n) + 1);
  t.sum_terms.resize(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double w = std::pow(gamma, k * grid.delta());
    const auto& lv = diff[kk];
    t.sup_terms[kk].resize(lv.y.size());
    t.sum_terms[kk].assign(lv.z.size(), 0.0);
    for (std::size_t i = 0; i < lv.y.size(); ++i) {
      t.sup_terms[kk][i] = w * lv.y[i] * lv.y[i];
      if (k < n) t.sum_terms[kk][i] = grid.delta() * w * lv.z[i] * lv.z[i];
    }
  }
  return t;
}

double path_value(const NormTerms& t, std::span<const Sign> beta) {
  double sup = t.sup_terms[0][0];
  double sum = t.sum_terms[0][0];
  std::size_t node = 0;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    if (beta[k] > 0) ++node;
    sup = std::max(sup, t.sup_terms[k + 1][node]);
    sum += t.sum_terms[k + 1][node];
  }
  return sup + sum;
}

double by_enumeration(const NormTerms& t, int n, int cap) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(sign_sequence_count(n, cap)));
  enumerate_sign_sequences(
      n, [&](std::span<const Sign> beta) { values.push_back(path_value(t, beta)); }, cap);
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double by_monte_carlo(const NormTerms& t, const TimeGrid& grid, const NormOptions& o) {
  std::vector<double> values(static_cast<std::size_t>(o.mc_samples));
  for (int s = 0; s < o.mc_samples; ++s) {
    const NoisePath path = sample_path(grid, o.mc_seed, static_cast<std::uint64_t>(s));
    values[static_cast<std::size_t>(s)] = path_value(t, path.beta);
  }
  return pairwise_sum(values) / static_cast<double>(values.size());
}

// E[S] = sum_m (v_m - v_{m-1}) P(S >= v_m) over the sorted distinct node
// values v_m, with P(S < v) propagated through the tree.
double expected_sup(const Table& terms) {
  std::vector<double> levels_sorted;
  for (const auto& row : terms) levels_sorted.insert(levels_sorted.end(), row.begin(), row.end());
  std::sort(levels_sorted.begin(), levels_sorted.end());
  levels_sorted.erase(std::unique(levels_sorted.begin(), levels_sorted.end()),
                      levels_sorted.end());

  std::vector<double> prob;
  std::vector<double> next;
  std::vector<double> pieces;
  double previous = 0.0;
  for (double v : levels_sorted) {
    if (v <= 0.0) continue;
    prob.assign(1, terms[0][0] < v ? 1.0 : 0.0);
    for (std::size_t k = 1; k < terms.size(); ++k) {
      next.assign(k + 1, 0.0);
      for (std::size_t i = 0; i < k; ++i) {
        const double half = 0.5 * prob[i];
        next[i] += half;
        next[i + 1] += half;
      }
      for (std::size_t i = 0; i <= k; ++i) {
        if (!(terms[k][i] < v)) next[i] = 0.0;
      }
      prob.swap(next);
    }
    double stay_below = 0.0;
    for (double p : prob) stay_below += p;
    pieces.push_back((v - previous) * (1.0 - stay_below));
    previous = v;
  }
  return pairwise_sum(pieces);
}

double expected_sum(const Table& terms) {
  std::vector<double> pieces;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto w = binomial_weights(static_cast<int>(k));
    double level = 0.0;
    for (std::size_t i = 0; i < terms[k].size(); ++i) level += w[i] * terms[k][i];
    pieces.push_back(level);
  }
  return pairwise_sum(pieces);
}

}  // namespace

double weighted_norm(std::span<const LevelValues> diff, double gamma,
                     const TimeGrid& grid, const NormOptions& options) {
  if (!(gamma > 0.0)) {
    throw InvalidArgument("weighted_norm: gamma must be positive, got " +
                          std::to_string(gamma));
  }
  const int n = grid.steps();
  if (diff.size() != static_cast<std::size_t>(n) + 1) {
    throw InvalidArgument("weighted_norm: tree has " + std::to_string(diff.size()) +
                          " levels, grid needs " + std::to_string(n + 1));
  }
  const NormTerms terms = norm_terms(diff, gamma, grid);

  NormMethod method = options.method;
  if (method == NormMethod::automatic) {
    if (n <= options.enumeration_cap) {
      method = NormMethod::enumeration;
    } else if (n <= options.level_set_cap) {
      method = NormMethod::level_sets;
    } else {
      method = NormMethod::monte_carlo;
    }
  }
  switch (method) {
    case NormMethod::enumeration:
      return by_enumeration(terms, n, std::max(options.enumeration_cap, n));
    case NormMethod::level_sets:
      return expected_sup(terms.sup_terms) + expected_sum(terms.sum_terms);
    case NormMethod::monte_carlo:
    case NormMethod::automatic:
      break;
  }
  return by_monte_carlo(terms, grid, options);
}

PicardResult picard_solve(const ProblemSpec& spec, const TimeGrid& grid,
                          std::span<const Sign> eps, const PicardOptions& options) {
  validate_spec(spec, grid);
  if (options.p_max < 1) throw InvalidArgument("picard_solve: p_max must be >= 1");

  PicardResult result;
  auto& diag = result.diagnostics;
  diag.gamma = options.gamma;
  diag.delta = grid.delta();

  PicardIterate current = zero_iterate(grid);
  for (int p = 1; p <= options.p_max; ++p) {
    PicardIterate next = picard_step(current, spec, grid, eps);
    const auto diff = tree_difference(next.levels, current.levels);
    const double norm = weighted_norm(diff, options.gamma, grid, options.norm);
    diag.norms_unit.push_back(weighted_norm(diff, 1.0, grid, options.norm));
    if (diag.norms.empty() || diag.norms.back() <= kRatioFloor) {
      diag.ratios.emplace_back(std::nullopt);
    } else {
      diag.ratios.emplace_back(norm / diag.norms.back());
    }
    diag.norms.push_back(norm);
    current = std::move(next);
    if (norm < options.tol) {
      diag.converged = true;
      break;
    }
  }
  result.iterate = std::move(current);
  return result;
}

}  // namespace bdsde
