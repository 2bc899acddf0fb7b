#ifndef OPRADIUS_TESTS_ORACLES_HPP
#define OPRADIUS_TESTS_ORACLES_HPP

// Test-only oracles, independent of the library's computation paths.

#include <cmath>
#include <vector>

#include "opradius/rng.hpp"
#include "opradius/types.hpp"

namespace test_oracles {

using opradius::CMatrix;
using opradius::Complex;
using opradius::CVector;

// Characteristic polynomial coefficients by Faddeev-LeVerrier:
// p(z) = z^n + c[0] z^{n-1} + ... + c[n-1].
inline std::vector<Complex> char_poly(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<Complex> c(n);
  CMatrix m = CMatrix::Zero(n, n);
  Complex ck = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    m = a * m + ck * CMatrix::Identity(n, n);
    CMatrix am = a * m;
    ck = -am.trace() / static_cast<double>(k + 1);
    c[k] = ck;
  }
  return c;
}

// Exact value of the scalar integral over [0,1] of (t*a + (1-t)*b)^r dt
// for a, b >= 0.
inline double scalar_segment_integral(double a, double b, double r) {
  if (a == b) return std::pow(a, r);
  return (std::pow(a, r + 1.0) - std::pow(b, r + 1.0)) / ((r + 1.0) * (a - b));
}

inline CMatrix random_ginibre(opradius::detail::Rng& rng, int n) {
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.cgaussian();
  return a;
}

inline CMatrix nilpotent_shift(int n) {
  CMatrix s = CMatrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) s(i, i + 1) = 1.0;
  return s;
}

}  // namespace test_oracles

#endif
