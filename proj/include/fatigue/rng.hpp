#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fatigue {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std::mt19937_64 +
// std::*_distribution because the distributions are not bit-identical
// across standard library implementations; this generator is.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform index in [0, n) by rejection, bias-free.
  uint64_t next_index(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller, spare value cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Decorrelated substream for worker `index` of a run seeded with `seed`.
inline uint64_t derive_stream_seed(uint64_t seed, uint64_t index) {
  SplitMix64 mix(seed ^ (0xd1342543de82ef95ull * (index + 1)));
  return mix.next_u64();
}

}  // namespace fatigue
