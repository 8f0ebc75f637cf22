#pragma once

// Seedable, portable random number generation for the experiment
// harness.  The engine is the standard mt19937_64; uniform and normal
// variates are produced by fixed transforms (53-bit mantissa scaling
// and Box-Muller) rather than the unspecified std:: distributions, so
// a given seed reproduces the same stream everywhere.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace bisr {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream for trial i of a run with the given base seed:
  /// mt19937_64 seeded with splitmix64(seed ^ trial_index).
  static Rng for_trial(std::uint64_t seed, std::uint64_t trial_index) {
    return Rng(splitmix64(seed ^ trial_index));
  }

  /// Uniform in [0, 1): top 53 bits of the engine output.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) by rejection on the top bits.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal via Box-Muller; one spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bisr
