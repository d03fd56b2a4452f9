#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace holecalib {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Order-sensitive hash of a seed and a list of counters.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

/// Counter-based normal draws: the value depends only on (key, counter), so
/// any evaluation order or thread split gives identical streams.
class CounterNormal {
 public:
  explicit CounterNormal(std::uint64_t key) : key_(key) {}

  double operator()(std::uint64_t counter) const {
    const std::uint64_t a = mix64(key_ ^ mix64(2 * counter));
    const std::uint64_t b = mix64(key_ ^ mix64(2 * counter + 1));
    // 53-bit uniforms; u1 in (0, 1] keeps the log finite.
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t key_;
};

}  // namespace holecalib
