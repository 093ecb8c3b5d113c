#pragma once

#include <cstdint>
#include <random>

namespace windplan {

// splitmix64 finalizer; disperses structured ids into seed material.
constexpr std::uint64_t hash_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return hash_mix(seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

/// Derives an independent stream seed from a base seed plus structured parts
/// (level, horizon, seed index, trial index, ...). Order-sensitive.
template <typename... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t base, Parts... parts) {
  std::uint64_t h = hash_mix(base);
  ((h = hash_combine(h, static_cast<std::uint64_t>(parts))), ...);
  return h;
}

/// Deterministic random stream. All draws go through uniform_double(), which
/// maps mt19937_64 output directly to [0,1), so sequences are reproducible
/// bit-for-bit for a given seed independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform draw in [0, 1).
  double uniform_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform draw in {0, ..., n-1}.
  int uniform_int(int n) { return static_cast<int>(uniform_double() * n); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace windplan
