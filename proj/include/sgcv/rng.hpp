#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sgcv {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer: bijective avalanche mix of one 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
  z += kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-based generator: output i is a hash of seed + i*gamma. Portable,
/// value-semantic, and trivially splittable into independent streams.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGoldenGamma;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform on (0, 1]; never zero, so it is safe under log().
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via the Box-Muller transform; consumes exactly two
  /// uniforms per call (no pair caching, keeps streams stateless per draw).
  double next_normal() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// Seed of substream `index` under a base seed. Distinct indices give
/// decorrelated streams, so Monte Carlo trials can run in any order or in
/// parallel and still reproduce bit-identically.
inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(mix64(base) + kGoldenGamma * (index + 1));
}

}  // namespace sgcv
