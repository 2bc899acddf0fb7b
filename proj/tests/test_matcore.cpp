#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "opradius/matcore.hpp"
#include "oracles.hpp"

using namespace opradius;
using test_oracles::random_ginibre;

namespace {

CMatrix cdiag(std::initializer_list<Complex> d) {
  CMatrix m = CMatrix::Zero(d.size(), d.size());
  Eigen::Index i = 0;
  for (Complex v : d) m(i, i) = v, ++i;
  return m;
}

}  // namespace

TEST_CASE("adjoint basics") {
  CMatrix id = CMatrix::Identity(3, 3);
  CHECK((adjoint(id) - id).norm() == 0.0);

  CMatrix nilp = test_oracles::nilpotent_shift(2);
  CMatrix expected = CMatrix::Zero(2, 2);
  expected(1, 0) = 1.0;
  CHECK((adjoint(nilp) - expected).norm() == 0.0);

  CMatrix sc(1, 1);
  sc(0, 0) = Complex(0, 1);
  CHECK(adjoint(sc)(0, 0) == Complex(0, -1));

  detail::Rng rng(7);
  CMatrix a = random_ginibre(rng, 4);
  CHECK((adjoint(adjoint(a)) - a).norm() == 0.0);
}

TEST_CASE("hermitian_eig analytic cases") {
  CMatrix d = cdiag({3.0, 1.0, 2.0});
  EigenSystem s = hermitian_eig(d);
  CHECK(s.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s.eigenvalues(2) == doctest::Approx(3.0).epsilon(1e-14));

  CMatrix pauli_x(2, 2);
  pauli_x << 0, 1, 1, 0;
  EigenSystem p = hermitian_eig(pauli_x);
  CHECK(p.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(p.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hermitian_eig reconstruction and unitarity residuals") {
  detail::Rng rng(11);
  const double u = std::numeric_limits<double>::epsilon();
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5;
    CMatrix g = random_ginibre(rng, n);
    CMatrix h = 0.5 * (g + g.adjoint());
    EigenSystem s = hermitian_eig(h);
    const double norm_h = spectral_norm(h);
    CMatrix recon = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
    CHECK(spectral_norm(recon - h) <= 1e-12 * norm_h);
    CHECK(spectral_norm(recon - h) <= 100.0 * n * u * norm_h);
    CMatrix qq = s.eigenvectors.adjoint() * s.eigenvectors - CMatrix::Identity(n, n);
    CHECK(spectral_norm(qq) <= 100.0 * n * u);
    for (Eigen::Index i = 0; i + 1 < n; ++i) CHECK(s.eigenvalues(i) <= s.eigenvalues(i + 1));
  }
}

TEST_CASE("hermitian_eig rejects asymmetric input") {
  CMatrix a(2, 2);
  a << 0, 1, 0, 0;
  CHECK_THROWS_AS(hermitian_eig(a), NotHermitian);
  // tiny asymmetry within tolerance is symmetrized away
  CMatrix h(2, 2);
  h << 1.0, Complex(0.5, 1e-13), Complex(0.5, -1e-13 + 1e-14), 2.0;
  CHECK_NOTHROW(hermitian_eig(h));
}

TEST_CASE("svd analytic and residuals") {
  SvdResult s = svd(CMatrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(s.sigma(i) == doctest::Approx(1.0).epsilon(1e-14));

  SvdResult nil = svd(test_oracles::nilpotent_shift(2));
  CHECK(nil.sigma(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(nil.sigma(1) == doctest::Approx(0.0).epsilon(1e-14));

  detail::Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix a = random_ginibre(rng, 4);
    SvdResult f = svd(a);
    const double norm_a = spectral_norm(a);
    CMatrix recon = f.w * f.sigma.asDiagonal() * f.v.adjoint();
    CHECK(spectral_norm(recon - a) <= 1e-12 * norm_a);
    CHECK(spectral_norm(f.w.adjoint() * f.w - CMatrix::Identity(4, 4)) <= 1e-12);
    CHECK(spectral_norm(f.v.adjoint() * f.v - CMatrix::Identity(4, 4)) <= 1e-12);
    for (int i = 0; i + 1 < 4; ++i) CHECK(f.sigma(i) >= f.sigma(i + 1));
  }
}

TEST_CASE("spectral_norm values and norm identities") {
  CHECK(spectral_norm(CMatrix::Identity(4, 4)) == doctest::Approx(1.0));
  CHECK(spectral_norm(test_oracles::nilpotent_shift(2)) == doctest::Approx(1.0));
  CMatrix m(2, 2);
  m << 0, 2, 3, 0;
  CHECK(spectral_norm(m) == doctest::Approx(3.0));

  detail::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix a = random_ginibre(rng, 3 + trial % 3);
    const double na = spectral_norm(a);
    CHECK(spectral_norm(a.adjoint()) == doctest::Approx(na).epsilon(1e-10));
    CHECK(spectral_norm(a.adjoint() * a) == doctest::Approx(na * na).epsilon(1e-10));
  }
}

TEST_CASE("psd_function powers") {
  CMatrix d = cdiag({0.0, 4.0});
  CMatrix root = psd_function(d, ScalarFunctionSpec::power(0.5));
  CHECK(root(0, 0).real() == doctest::Approx(0.0));
  CHECK(root(1, 1).real() == doctest::Approx(2.0));

  CMatrix sq = psd_function(cdiag({1.0, 3.0}), ScalarFunctionSpec::power(2.0));
  CHECK(sq(0, 0).real() == doctest::Approx(1.0));
  CHECK(sq(1, 1).real() == doctest::Approx(9.0));

  // 0^0 = 1 so the zeroth power of a singular PSD matrix is the identity
  CMatrix zp = psd_function(cdiag({0.0, 2.0}), ScalarFunctionSpec::power(0.0));
  CHECK(spectral_norm(zp - CMatrix::Identity(2, 2)) <= 1e-14);
}

TEST_CASE("psd_function round trip on random PSD") {
  detail::Rng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix g = random_ginibre(rng, 4);
    CMatrix h = g.adjoint() * g;
    const double r = 1.0 + rng.uniform01();
    CMatrix back = psd_function(psd_function(h, ScalarFunctionSpec::power(r)),
                                ScalarFunctionSpec::power(1.0 / r));
    CHECK(spectral_norm(back - h) <= 1e-10 * std::max(1.0, spectral_norm(h)));
  }
}

TEST_CASE("psd_function clamps roundoff negatives and rejects real ones") {
  CMatrix tiny = cdiag({-5e-11, 1.0});
  CMatrix r = psd_function(tiny, ScalarFunctionSpec::power(0.5));
  CHECK(r(0, 0).real() == doctest::Approx(0.0));
  CHECK(r(1, 1).real() == doctest::Approx(1.0));

  CHECK_THROWS_AS(psd_function(cdiag({-1.0, 1.0}), ScalarFunctionSpec::power(0.5)), NotPSD);
}

TEST_CASE("psd_function diagonal exactness") {
  detail::Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix d = CMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) d(i, i) = 2.0 * rng.uniform01();
    const double p = 2.0 * rng.uniform01();
    CMatrix f = psd_function(d, ScalarFunctionSpec::power(p));
    for (int i = 0; i < 3; ++i)
      CHECK(f(i, i).real() == doctest::Approx(std::pow(d(i, i).real(), p)).epsilon(1e-13));
  }
}

TEST_CASE("custom scalar function hook") {
  ScalarFunctionSpec f = ScalarFunctionSpec::custom([](double x) { return x + 1.0; });
  CMatrix d = cdiag({1.0, 2.0});
  CMatrix out = psd_function(d, f);
  CHECK(out(0, 0).real() == doctest::Approx(2.0));
  CHECK(out(1, 1).real() == doctest::Approx(3.0));
  CHECK_THROWS_AS(ScalarFunctionSpec::power(-1.0), ParameterOutOfRange);
}

TEST_CASE("abs_operator") {
  CMatrix d = cdiag({Complex(-2.0, 0.0), Complex(0.0, 3.0)});
  CMatrix a = abs_operator(d);
  CHECK(a(0, 0).real() == doctest::Approx(2.0));
  CHECK(a(1, 1).real() == doctest::Approx(3.0));

  CMatrix nil = abs_operator(test_oracles::nilpotent_shift(2));
  CHECK(nil(0, 0).real() == doctest::Approx(0.0));
  CHECK(nil(1, 1).real() == doctest::Approx(1.0));

  detail::Rng rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix t = random_ginibre(rng, 4);
    const double nt = spectral_norm(t);
    CHECK(spectral_norm(abs_operator(t)) == doctest::Approx(nt).epsilon(1e-10));
  }
}

TEST_CASE("segment_power_integral analytic cases") {
  CMatrix a = cdiag({0.0, 1.0});
  CMatrix b = cdiag({1.0, 0.0});
  CMatrix i2 = segment_power_integral(a, b, 2.0, 1e-12);
  CHECK(i2(0, 0).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
  CHECK(i2(1, 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-11));

  CMatrix i15 = segment_power_integral(a, b, 1.5, 1e-11);
  CHECK(i15(0, 0).real() == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(i15(1, 1).real() == doctest::Approx(0.4).epsilon(1e-10));

  CMatrix id = CMatrix::Identity(3, 3);
  for (double r : {1.0, 1.3, 2.0}) {
    CMatrix c = segment_power_integral(id, id, r, 1e-12);
    CHECK(spectral_norm(c - id) <= 1e-12);
  }
}

TEST_CASE("segment_power_integral matches the exact polynomial integral") {
  detail::Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix a = CMatrix::Zero(3, 3), b = CMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
      a(i, i) = 3.0 * rng.uniform01();
      b(i, i) = 3.0 * rng.uniform01();
    }
    for (double r : {1.0, 2.0}) {
      CMatrix got = segment_power_integral(a, b, r, 1e-12);
      for (int i = 0; i < 3; ++i) {
        const double exact =
            test_oracles::scalar_segment_integral(a(i, i).real(), b(i, i).real(), r);
        CHECK(got(i, i).real() == doctest::Approx(exact).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("segment_power_integral errors") {
  CMatrix a = cdiag({1.0, 1.0});
  CHECK_THROWS_AS(segment_power_integral(a, a, 2.5, 1e-10), ParameterOutOfRange);
  CHECK_THROWS_AS(segment_power_integral(a, a, 1.5, 0.0), InvalidTolerance);
  CHECK_THROWS_AS(segment_power_integral(cdiag({-1.0, 1.0}), a, 1.5, 1e-10), NotPSD);
  CHECK_THROWS_AS(segment_power_integral(a, CMatrix::Identity(3, 3), 1.5, 1e-10),
                  DimensionMismatch);
}

TEST_CASE("Hermite-Hadamard for scalar power maps") {
  detail::Rng rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = 4.0 * rng.uniform01();
    const double b = 4.0 * rng.uniform01();
    const double r = 1.0 + rng.uniform01();
    CMatrix ma(1, 1), mb(1, 1);
    ma(0, 0) = a;
    mb(0, 0) = b;
    const double mid = segment_power_integral(ma, mb, r, 1e-12)(0, 0).real();
    CHECK(mid == doctest::Approx(test_oracles::scalar_segment_integral(a, b, r)).epsilon(1e-10));
    CHECK(std::pow(0.5 * (a + b), r) <= mid + 1e-10);
    CHECK(mid <= 0.5 * (std::pow(a, r) + std::pow(b, r)) + 1e-10);
  }
}

TEST_CASE("gauss legendre nodes integrate polynomials exactly") {
  std::vector<double> t, w;
  detail::gauss_legendre_01(8, t, w);
  for (int k = 0; k <= 15; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += w[i] * std::pow(t[i], k);
    CHECK(acc == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
  }
}

TEST_CASE("matrix validation errors") {
  CMatrix bad(2, 3);
  bad.setZero();
  CHECK_THROWS_AS(spectral_norm(bad), DimensionMismatch);
}
