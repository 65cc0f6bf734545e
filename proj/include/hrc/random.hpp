#pragma once

#include <cstdint>
#include <random>

namespace hrc {

/// Seeded uniform sampler whose output depends only on the seed: the double
/// is built from the top 53 bits of mt19937_64, which the standard fixes,
/// instead of a library-specific distribution.
class UniformSampler {
 public:
  explicit UniformSampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double next() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hrc
