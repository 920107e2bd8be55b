#pragma once

#include <cstdint>
#include <random>

namespace sdc {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` of a run started from `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Thin wrapper over std::mt19937_64 with distribution mappings that are
/// identical on every standard library (the std:: distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [lo, hi], rejection-sampled to avoid modulo bias.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return next();
    const std::uint64_t threshold = (0 - span) % span;  // 2^64 mod span
    std::uint64_t x = next();
    while (x < threshold) x = next();
    return lo + x % span;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sdc
