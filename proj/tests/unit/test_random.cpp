#include "doctest.h"

#include "superx/random.hpp"

#include <random>
#include <set>

using superx::Philox4x32;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference outputs published with the Random123 library.
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             {0xffffffffu, 0xffffffffu}) ==
        Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("substreams are reproducible and distinct") {
  auto a = superx::substream(42, 3, 7);
  auto b = superx::substream(42, 3, 7);
  auto c = superx::substream(42, 3, 8);
  auto d = superx::substream(43, 3, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }
}

TEST_CASE("discard_blocks skips whole blocks") {
  superx::Rng a(9, 1), b(9, 1);
  for (int i = 0; i < 6; ++i) a();
  b.discard_blocks(3);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}

TEST_CASE("uniform output has no obvious bias") {
  superx::Rng rng(1, 0);
  std::uniform_real_distribution<double> unif;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += unif(rng);
  // mean 1/2, sd sqrt(1/12 / n) ~ 6.5e-4
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12.0 / n));
}
