#pragma once

#include <cstdint>

namespace roveval {

// SplitMix64. Chosen as the fixture PRNG because the whole algorithm fits in
// a dozen lines and reproduces bit-identically in any language:
//   state += 0x9E3779B97F4A7C15
//   z = state; z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
//   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Bernoulli(p) draw; p outside [0,1] saturates.
  bool next_bool(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace roveval
