#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bdsde {

/// A single Bernoulli increment, always +1 or -1.
using Sign = std::int8_t;
using Signs = std::vector<Sign>;

/// Uniform partition 0 = t_0 < ... < t_n = T with step delta = T / n.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double delta() const { return delta_; }
  double sqrt_delta() const { return sqrt_delta_; }
  double t(int j) const;
  std::vector<double> times() const;

  /// Value of the scaled walk at node i of level j: (2i - j) * sqrt(delta).
  double node_value(int level, int node) const {
    return (2 * node - level) * sqrt_delta_;
  }

 private:
  double horizon_;
  int steps_;
  double delta_;
  double sqrt_delta_;
};

TimeGrid make_grid(double horizon, int steps);

/// One joint realization of the backward-noise signs (eps, drives B) and the
/// forward-noise signs (beta, drives W). eps[m] stores epsilon_{m+1}.
struct NoisePath {
  Signs eps;
  Signs beta;
  std::uint64_t seed = 0;
  std::uint64_t substream = 0;
};

/// Draws a path from the stream keyed by (seed, substream). The same key
/// always yields the same path, so samples can be generated in any order.
NoisePath sample_path(const TimeGrid& grid, std::uint64_t seed,
                      std::uint64_t substream = 0);

struct WalkValues {
  std::vector<double> B;
  std::vector<double> W;
};

WalkValues walk_values(const NoisePath& path, const TimeGrid& grid);

/// Partial sums sqrt(delta) * sum_{m <= j} signs[m-1], j = 0..n.
std::vector<double> scaled_partial_sums(std::span<const Sign> signs,
                                        const TimeGrid& grid);

inline constexpr int kDefaultEnumerationCap = 20;

/// Number of sign sequences of length n, after checking the cap.
std::uint64_t sign_sequence_count(int n, int cap = kDefaultEnumerationCap);

/// Sequence number `index` in lexicographic order with +1 < -1: the first
/// sign is the most significant bit, bit 0 meaning +1.
Signs sign_sequence(int n, std::uint64_t index);

/// Calls `visit` for each of the 2^n sign sequences exactly once, in
/// lexicographic order. Throws ResourceLimit when n > cap.
void enumerate_sign_sequences(
    int n, const std::function<void(std::span<const Sign>)>& visit,
    int cap = kDefaultEnumerationCap);

}  // namespace bdsde
