#pragma once

#include "superx/parallel.hpp"
#include "superx/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace superx::detail {

/// Per-component sums over a fixed number of Monte Carlo draws.
struct Moments {
  std::size_t count = 0;
  std::vector<double> sum;
  std::vector<double> sum_sq;

  double mean(std::size_t i) const { return sum[i] / static_cast<double>(count); }
  /// Standard error of mean(i).
  double standard_error(std::size_t i) const {
    const auto n = static_cast<double>(count);
    if (count < 2) return 0.0;
    const double m = mean(i);
    const double var = std::max(0.0, (sum_sq[i] - n * m * m) / (n - 1.0));
    return std::sqrt(var / n);
  }
};

inline constexpr std::size_t kChunkSize = 4096;

/// Runs `draws` evaluations of draw(rng, values) where `values` has `width`
/// slots. Chunk c of kChunkSize draws uses substream (seed, channel, c), and
/// chunk totals are combined in chunk order, so the result does not depend
/// on the worker count.
template <typename Draw>
Moments chunked_moments(std::size_t draws, std::size_t width, std::uint64_t seed,
                        std::uint32_t channel, Draw&& draw) {
  const std::size_t chunks = (draws + kChunkSize - 1) / kChunkSize;
  std::vector<double> sums(chunks * width, 0.0), squares(chunks * width, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng = substream(seed, channel, static_cast<std::uint32_t>(c));
    std::vector<double> values(width);
    const std::size_t end = std::min(draws, (c + 1) * kChunkSize);
    for (std::size_t d = c * kChunkSize; d < end; ++d) {
      draw(rng, std::span<double>(values));
      for (std::size_t i = 0; i < width; ++i) {
        sums[c * width + i] += values[i];
        squares[c * width + i] += values[i] * values[i];
      }
    }
  });
  Moments m;
  m.count = draws;
  m.sum.assign(width, 0.0);
  m.sum_sq.assign(width, 0.0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t i = 0; i < width; ++i) {
      m.sum[i] += sums[c * width + i];
      m.sum_sq[i] += squares[c * width + i];
    }
  return m;
}

}  // namespace superx::detail
