#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace cachedof {

// Deterministic random source. Gaussians come from an explicit Box-Muller on
// 53-bit uniforms so draws do not depend on the standard library's
// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // uniform in (0, 1]
  double uniform_pos() { return 1.0 - uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
  }

  // circularly-symmetric complex normal CN(0, 1)
  std::complex<double> cnormal() {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    double re = gaussian();
    double im = gaussian();
    return {re * inv_sqrt2, im * inv_sqrt2};
  }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    return n ? eng_() % n : 0;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable sub-seed derivation (splitmix64 finalizer over mixed-in words).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
  std::uint64_t x = seed;
  for (std::uint64_t w : {a, b, c}) {
    x += 0x9e3779b97f4a7c15ull + w;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    x = x ^ (x >> 31);
  }
  return x;
}

}  // namespace cachedof
