#include "bdsde/grid.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bdsde/errors.hpp"

namespace bdsde {

TimeGrid::TimeGrid(double horizon, int steps)
    : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("time grid: horizon must be positive, got " +
                          std::to_string(horizon));
  }
  if (steps < 1) {
    throw InvalidArgument("time grid: step count must be >= 1, got " +
                          std::to_string(steps));
  }
  delta_ = horizon / steps;
  sqrt_delta_ = std::sqrt(delta_);
}

double TimeGrid::t(int j) const {
  if (j == steps_) return horizon_;
  return j * delta_;
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(static_cast<std::size_t>(steps_) + 1);
  for (int j = 0; j <= steps_; ++j) out[static_cast<std::size_t>(j)] = t(j);
  return out;
}

TimeGrid make_grid(double horizon, int steps) { return TimeGrid(horizon, steps); }

NoisePath sample_path(const TimeGrid& grid, std::uint64_t seed,
                      std::uint64_t substream) {
  std::seed_seq key{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(substream),
                    static_cast<std::uint32_t>(substream >> 32)};
  std::mt19937_64 engine(key);

  const auto n = static_cast<std::size_t>(grid.steps());
  NoisePath path;
  path.seed = seed;
  path.substream = substream;
  path.eps.resize(n);
  path.beta.resize(n);

  std::uint64_t word = 0;
  int bits_left = 0;
  auto next_sign = [&]() -> Sign {
    if (bits_left == 0) {
      word = engine();
      bits_left = 64;
    }
    const Sign s = (word & 1U) ? Sign{-1} : Sign{1};
    word >>= 1;
    --bits_left;
    return s;
  };
  for (auto& s : path.eps) s = next_sign();
  for (auto& s : path.beta) s = next_sign();
  return path;
}

std::vector<double> scaled_partial_sums(std::span<const Sign> signs,
                                        const TimeGrid& grid) {
  if (signs.size() != static_cast<std::size_t>(grid.steps())) {
    throw InvalidArgument("walk: sign count " + std::to_string(signs.size()) +
                          " does not match grid steps " +
                          std::to_string(grid.steps()));
  }
  std::vector<double> out(signs.size() + 1, 0.0);
  long long running = 0;
  for (std::size_t m = 0; m < signs.size(); ++m) {
    running += signs[m];
    out[m + 1] = grid.sqrt_delta() * static_cast<double>(running);
  }
  return out;
}

WalkValues walk_values(const NoisePath& path, const TimeGrid& grid) {
  return {scaled_partial_sums(path.eps, grid),
          scaled_partial_sums(path.beta, grid)};
}

std::uint64_t sign_sequence_count(int n, int cap) {
  if (n < 0) throw InvalidArgument("enumeration: negative length");
  if (n > cap) {
    throw ResourceLimit("enumeration: n=" + std::to_string(n) +
                        " exceeds cap " + std::to_string(cap));
  }
  return std::uint64_t{1} << n;
}

Signs sign_sequence(int n, std::uint64_t index) {
  Signs out(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const auto bit = (index >> (n - 1 - m)) & 1U;
    out[static_cast<std::size_t>(m)] = bit ? Sign{-1} : Sign{1};
  }
  return out;
}

void enumerate_sign_sequences(
    int n, const std::function<void(std::span<const Sign>)>& visit, int cap) {
  const std::uint64_t count = sign_sequence_count(n, cap);
  for (std::uint64_t k = 0; k < count; ++k) {
    const Signs seq = sign_sequence(n, k);
    visit(seq);
  }
}

}  // namespace bdsde
