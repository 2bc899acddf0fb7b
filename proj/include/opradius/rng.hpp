#ifndef OPRADIUS_RNG_HPP
#define OPRADIUS_RNG_HPP

#include <cstdint>
#include <random>

#include "opradius/types.hpp"

// Deterministic random helpers. The standard <random> distributions are
// implementation-defined, so Gaussians are drawn by explicit Box-Muller on
// the raw mt19937_64 stream.

namespace opradius::detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = seed;
  (void)splitmix64(s);
  s ^= a * 0xA24BAED4963EE407ull;
  (void)splitmix64(s);
  s ^= b * 0x9FB21C651E98DF25ull;
  return splitmix64(s);
}

struct Rng {
  std::mt19937_64 gen;
  bool has_cached = false;
  double cached = 0.0;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform01() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (has_cached) {
      has_cached = false;
      return cached;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached = r * std::sin(a);
    has_cached = true;
    return r * std::cos(a);
  }

  // Standard complex Gaussian CN(0,1).
  Complex cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re * M_SQRT1_2, im * M_SQRT1_2);
  }

  CVector unit_vector(Eigen::Index n) {
    CVector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = Complex(gaussian(), gaussian());
    const double nrm = x.norm();
    if (nrm == 0.0) return CVector::Unit(n, 0);
    return x / nrm;
  }
};

}  // namespace opradius::detail

#endif
