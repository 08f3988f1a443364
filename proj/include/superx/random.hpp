#pragma once

// Counter-based random number generation.
//
// Every Monte Carlo replicate draws from its own Philox4x32-10 substream,
// addressed by (seed, stream id). Results therefore do not depend on how
// replicates are distributed across worker threads.

#include <array>
#include <cstdint>
#include <limits>

namespace superx {

/// Philox4x32 with 10 rounds. Satisfies UniformRandomBitGenerator.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32() : Philox4x32(0, 0) {}
  Philox4x32(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        counter_{0, 0, static_cast<std::uint32_t>(stream),
                 static_cast<std::uint32_t>(stream >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (cursor_ == 2) {
      buffer_ = generate(counter_, key_);
      // 64-bit block counter in words 0..1; words 2..3 hold the stream id.
      if (++counter_[0] == 0) ++counter_[1];
      cursor_ = 0;
    }
    const auto lo = static_cast<std::uint64_t>(buffer_[2 * cursor_]);
    const auto hi = static_cast<std::uint64_t>(buffer_[2 * cursor_ + 1]);
    ++cursor_;
    return (hi << 32) | lo;
  }

  /// Skips `blocks` 128-bit blocks ahead of the current position.
  void discard_blocks(std::uint64_t blocks) {
    const std::uint64_t c = (static_cast<std::uint64_t>(counter_[1]) << 32 | counter_[0]) + blocks;
    counter_[0] = static_cast<std::uint32_t>(c);
    counter_[1] = static_cast<std::uint32_t>(c >> 32);
    cursor_ = 2;
  }

  /// The raw bijection: ten Philox rounds applied to `counter` under `key`.
  static constexpr Block generate(Block counter, Key key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * counter[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * counter[2];
      counter = Block{static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                      static_cast<std::uint32_t>(p1),
                      static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                      static_cast<std::uint32_t>(p0)};
    }
    return counter;
  }

 private:
  Key key_;
  Block counter_;
  Block buffer_{};
  int cursor_ = 2;
};

using Rng = Philox4x32;

/// Stream ids are split into a channel (which experiment or sample set) and
/// an index (which replicate). Channels keep unrelated sample sets disjoint
/// under a single user seed.
constexpr std::uint64_t stream_id(std::uint32_t channel, std::uint32_t index) {
  return (static_cast<std::uint64_t>(channel) << 32) | index;
}

inline Rng substream(std::uint64_t seed, std::uint32_t channel, std::uint32_t index) {
  return Rng(seed, stream_id(channel, index));
}

}  // namespace superx
