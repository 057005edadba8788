#pragma once

#include <span>
#include <vector>

namespace bdsde {

/// Pairwise summation with a fixed split order, so the result depends only on
/// the input sequence.
double pairwise_sum(std::span<const double> values);

/// Probabilities C(j, i) / 2^j of reaching node i of level j on the forward
/// walk, i = 0..j.
std::vector<double> binomial_weights(int level);

}  // namespace bdsde
