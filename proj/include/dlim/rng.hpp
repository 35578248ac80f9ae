#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

namespace dlim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic hash of a coordinate into [0,1). Used for seeded symbolic
/// bases and seeded matrix generators: the value depends only on the bit
/// pattern of y and the seed, never on call order.
inline double hash01(double y, std::uint64_t seed) {
  std::uint64_t bits;
  std::memcpy(&bits, &y, sizeof bits);
  std::uint64_t h = splitmix64(bits ^ splitmix64(seed));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// xoshiro256** with splitmix64 seeding. Self-contained so that streams are
/// bit-reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    for (auto& word : state_) {
      seed = splitmix64(seed);
      word = seed;
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Box-Muller; one value per call, deterministic.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Derive an independent deterministic stream.
  Rng fork(std::uint64_t stream) const {
    return Rng(splitmix64(state_[0] ^ splitmix64(stream ^ 0x5851F42D4C957F2DULL)));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace dlim
