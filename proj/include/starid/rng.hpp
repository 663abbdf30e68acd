#pragma once

// SplitMix64 (Steele, Lea, Flood 2014) with explicit uniform and Gaussian
// transforms, so streams are bit-identical across compilers and platforms.
// std::normal_distribution and friends are implementation-defined.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace starid {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n > 0, for n well below 2^53.
  std::uint64_t below(std::uint64_t n) {
    const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Independent seed for item k of a campaign with base seed `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
  SplitMix64 a(base ^ 0xD1B54A32D192ED03ull);
  const std::uint64_t h = a.next();
  SplitMix64 b(h + k * 0x9E3779B97F4A7C15ull);
  return b.next();
}

}  // namespace starid
