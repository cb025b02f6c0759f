#pragma once

#include <cstdint>

#include "pvd/bitstring.hpp"

namespace pvd {

// Counter-mode splitmix64 stream.
//
// The stream is a pure function of (key, draw count), and fork(label) derives
// the child key from the parent key alone, not from how much the parent has
// been consumed. Per-trial generators are therefore identical no matter which
// thread runs the trial or in what order, which is what makes serial and
// OpenMP runs produce the same tallies.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix(key_ + (++ctr_) * kGamma); }

  SplitRng fork(std::uint64_t label) const {
    return SplitRng(mix(key_ ^ mix(label * kGamma + kLabelSalt)));
  }

  int bit() { return static_cast<int>(next_u64() >> 63); }

  // Uniform in [0, bound) via rejection; bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % bound;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  BitString bits(std::size_t n) {
    BitString b(n);
    for (std::size_t i = 0; i < n; ++i) b.set_bit(i, bit());
    return b;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kLabelSalt = 0x8CB92BA72F3D8DD7ULL;

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace pvd
