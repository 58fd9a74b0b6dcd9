// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "lens/errors.hpp"

namespace lens {

// Deterministic 64-bit generator (splitmix64). We avoid <random> engines and
// distributions on purpose: their outputs are implementation-defined, and the
// pipeline promises bit-identical artifacts for a given seed on every
// platform. Substreams derived with mix() make per-item randomness
// independent of evaluation order, so threading cannot change results.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    if (!(lo <= hi)) throw DomainError("uniform: empty interval");
    return lo + (hi - lo) * uniform();
  }

  // Uniform integer in [0, n) via rejection sampling (no modulo bias).
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_below: n must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Stateless hash combine used to key substreams (one splitmix64 step over
  // the xor of the inputs, avalanched again to decorrelate nearby indices).
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Independent generator for item `index` of the stream named by `seed`.
  static SeededRng substream(std::uint64_t seed, std::uint64_t index) {
    return SeededRng(mix(seed, index));
  }

 private:
  std::uint64_t state_;
};

}  // namespace lens
