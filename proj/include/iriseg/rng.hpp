#ifndef IRISEG_RNG_HPP
#define IRISEG_RNG_HPP

#include <cmath>
#include <cstdint>

namespace iriseg {

/// Small deterministic generator (splitmix64). Distributions are hand-rolled
/// so streams are reproducible across standard libraries, which the
/// fixed-seed determinism contract relies on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * 3.14159265358979323846 * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Poisson draw: Knuth's product method for small means, normal
  /// approximation above 30 (adequate for photon-noise simulation).
  double poisson(double mean) {
    if (mean <= 0.0) return 0.0;
    if (mean > 30.0) {
      double v = mean + std::sqrt(mean) * normal();
      return v < 0.0 ? 0.0 : std::floor(v + 0.5);
    }
    double limit = std::exp(-mean);
    double prod = uniform();
    int n = 0;
    while (prod > limit) {
      prod *= uniform();
      ++n;
    }
    return static_cast<double>(n);
  }

  /// Decorrelated per-item seed for parallel streams.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace iriseg

#endif  // IRISEG_RNG_HPP
