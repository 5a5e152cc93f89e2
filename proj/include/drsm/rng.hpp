#pragma once

#include <cmath>
#include <cstdint>

#include "drsm/common.hpp"

namespace drsm {

/// SplitMix64: seedable 64-bit generator, bit-identical across platforms.
/// Sampling is done by inverse CDF from the raw 53-bit uniform, so generated
/// instances do not depend on any library distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Independent substream keyed by tag; forking does not disturb this stream.
  Rng fork(std::uint64_t tag) const {
    Rng mixer(state_ ^ (0x632BE59BD9B4E019ULL * (tag + 1)));
    return Rng(mixer.next_u64());
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Exponential with rate lambda via inverse CDF.
  double exponential(double lambda) {
    return -std::log1p(-uniform01()) / lambda;
  }

  /// Standard normal via Box-Muller (one value per draw pair).
  double gaussian() {
    double u1 = uniform01();
    double u2 = uniform01();
    // keep u1 away from 0 so the log is finite
    u1 = 1.0 - u1;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace drsm
