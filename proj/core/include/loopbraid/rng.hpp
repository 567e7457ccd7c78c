#pragma once

#include <cstdint>

#include "loopbraid/tensor.hpp"

namespace loopbraid {

/// Counter-based generator: the k-th draw of stream s under seed is a pure
/// function splitmix64(seed, s, k), so sweeps are reproducible point by point.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix(key_ + counter * 0x9e3779b97f4a7c15ULL);
  }
  std::uint64_t next() noexcept { return at(counter_++); }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept {
    const double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
  }
  /// Real and imaginary parts uniform in [-radius, radius).
  CScalar complex_in_box(double radius) noexcept {
    const double re = uniform(-radius, radius);
    const double im = uniform(-radius, radius);
    return {re, im};
  }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace loopbraid
