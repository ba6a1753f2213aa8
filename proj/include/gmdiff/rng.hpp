#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gmdiff {

/// Deterministic random stream. mt19937_64 output is pinned by the standard;
/// uniform and normal variates are generated with explicit formulas rather
/// than std::*_distribution so that a seed reproduces the same stream on any
/// implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (no spare caching, two uniforms per draw).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Derive a per-task seed from a base seed and stream index (splitmix64).
  static std::uint64_t derive(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t x = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gmdiff
