#include "bdsde/numeric.hpp"

#include <cmath>

namespace bdsde {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> binomial_weights(int level) {
  // Built by repeated halving so the weights stay exact dyadic rationals.
  std::vector<double> w{1.0};
  for (int j = 0; j < level; ++j) {
    std::vector<double> next(w.size() + 1, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      next[i] += 0.5 * w[i];
      next[i + 1] += 0.5 * w[i];
    }
    w = std::move(next);
  }
  return w;
}

}  // namespace bdsde
