#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opradius/harness.hpp"
#include "opradius/matcore.hpp"
#include "opradius/radii.hpp"
#include "opradius/transforms.hpp"
#include "oracles.hpp"

using namespace opradius;
using test_oracles::random_ginibre;

TEST_CASE("cartesian decomposition") {
  auto [re_i, im_i] = cartesian(CMatrix::Identity(2, 2));
  CHECK(spectral_norm(re_i - CMatrix::Identity(2, 2)) <= 1e-15);
  CHECK(spectral_norm(im_i) <= 1e-15);

  CMatrix nilp = test_oracles::nilpotent_shift(2);
  auto [re, im] = cartesian(nilp);
  CHECK(re(0, 1) == Complex(0.5, 0.0));
  CHECK(re(1, 0) == Complex(0.5, 0.0));
  CHECK(im(0, 1) == Complex(0.0, -0.5));
  CHECK(im(1, 0) == Complex(0.0, 0.5));
  CHECK(spectral_norm(re) == doctest::Approx(0.5));
  CHECK(spectral_norm(im) == doctest::Approx(0.5));

  detail::Rng rng(41);
  const Complex i_unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix t = random_ginibre(rng, 4);
    auto [a, b] = cartesian(t);
    CHECK(spectral_norm(a - a.adjoint()) <= 1e-14 * spectral_norm(t));
    CHECK(spectral_norm(b - b.adjoint()) <= 1e-14 * spectral_norm(t));
    CHECK(spectral_norm(a + i_unit * b - t) <= 1e-14 * spectral_norm(t));
  }
}

TEST_CASE("polar decomposition analytic cases") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -3.0;
  PolarParts p = polar(d);
  CHECK(p.u(0, 0).real() == doctest::Approx(1.0));
  CHECK(p.u(1, 1).real() == doctest::Approx(-1.0));
  CHECK(p.p(0, 0).real() == doctest::Approx(2.0));
  CHECK(p.p(1, 1).real() == doctest::Approx(3.0));

  CMatrix nilp = test_oracles::nilpotent_shift(2);
  PolarParts pn = polar(nilp);
  CHECK(spectral_norm(pn.u - nilp) <= 1e-14);
  CHECK(pn.p(0, 0).real() == doctest::Approx(0.0));
  CHECK(pn.p(1, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("polar invariants across ensembles") {
  EnsembleSpec full;
  full.kind = EnsembleKind::Ginibre;
  full.dim = 4;
  full.seed = 51;
  full.trials = 10;
  EnsembleSpec deficient;
  deficient.kind = EnsembleKind::RankDeficient;
  deficient.dim = 4;
  deficient.seed = 52;
  deficient.trials = 10;
  deficient.rank = 2;
  for (const EnsembleSpec& spec : {full, deficient}) {
    for (int trial = 0; trial < spec.trials; ++trial) {
      CMatrix t = generate(spec, trial);
      const double nt = spectral_norm(t);
      PolarParts p = polar(t);
      CHECK(spectral_norm(p.u * p.p - t) <= 1e-10 * nt);
      CHECK(spectral_norm(p.p - abs_operator(t)) <= 1e-10 * nt);
      // U*U is the orthogonal projection onto range(P)
      CMatrix proj = p.u.adjoint() * p.u;
      CHECK(spectral_norm(proj * proj - proj) <= 1e-10);
      CHECK(spectral_norm(proj * p.p - p.p) <= 1e-10 * std::max(1.0, nt));
    }
  }
  detail::Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix t = random_ginibre(rng, 4);  // full rank a.s.
    PolarParts p = polar(t);
    CHECK(spectral_norm(p.u.adjoint() * p.u - CMatrix::Identity(4, 4)) <= 1e-10);
  }
}

TEST_CASE("aluthge transform analytic cases") {
  CMatrix nilp = test_oracles::nilpotent_shift(2);
  CHECK(spectral_norm(aluthge_t(nilp, 0.5)) <= 1e-14);

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -3.0;
  for (double t : {0.0, 0.25, 0.5, 1.0}) CHECK(spectral_norm(aluthge_t(d, t) - d) <= 1e-12);

  // 0^0 = 1 makes the endpoint t = 0 reproduce U|T| = T
  CHECK(spectral_norm(aluthge_t(nilp, 0.0) - nilp) <= 1e-12);

  CHECK_THROWS_AS(aluthge_t(nilp, 1.5), ParameterOutOfRange);
  CHECK_THROWS_AS(aluthge_t(nilp, -0.1), ParameterOutOfRange);
}

TEST_CASE("aluthge preserves the norm of normal operators") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::Normal;
  spec.dim = 4;
  spec.seed = 57;
  spec.trials = 15;
  detail::Rng prng(58);
  for (int trial = 0; trial < spec.trials; ++trial) {
    CMatrix t = generate(spec, trial);
    const double tp = prng.uniform01();
    CHECK(spectral_norm(aluthge_t(t, tp)) == doctest::Approx(spectral_norm(t)).epsilon(1e-9));
  }
}

TEST_CASE("aluthge keeps the characteristic polynomial") {
  detail::Rng rng(59);
  EnsembleSpec deficient;
  deficient.kind = EnsembleKind::RankDeficient;
  deficient.dim = 5;
  deficient.seed = 60;
  deficient.trials = 5;
  deficient.rank = 2;
  for (int trial = 0; trial < 12; ++trial) {
    CMatrix t = trial < 5 ? generate(deficient, trial) : random_ginibre(rng, 3 + trial % 3);
    const double tp = rng.uniform01();
    CMatrix alu = aluthge_t(t, tp);
    auto ct = test_oracles::char_poly(t);
    auto ca = test_oracles::char_poly(alu);
    const double scale = std::max(1.0, spectral_norm(t));
    double scale_pow = scale;
    for (std::size_t k = 0; k < ct.size(); ++k) {
      CHECK(std::abs(ct[k] - ca[k]) <= 1e-8 * scale_pow);
      scale_pow *= scale;
    }
  }
}

TEST_CASE("aluthge never increases the numerical radius") {
  detail::Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix t = random_ginibre(rng, 4);
    const double tp = rng.uniform01();
    Enclosure wt = numerical_radius(t, 1e-9 * scale_of(t));
    Enclosure wa = numerical_radius(aluthge_t(t, tp), 1e-9 * scale_of(t));
    CHECK(wa.lower <= wt.upper + 1e-8);
  }
}

TEST_CASE("offdiag block assembly") {
  CMatrix one = CMatrix::Identity(1, 1);
  CMatrix block = offdiag_block(one, one);
  CHECK(block.rows() == 2);
  CHECK(block(0, 1) == Complex(1.0, 0.0));
  CHECK(block(1, 0) == Complex(1.0, 0.0));
  CHECK(block(0, 0) == Complex(0.0, 0.0));

  detail::Rng rng(67);
  CMatrix x = random_ginibre(rng, 3), y = random_ginibre(rng, 3);
  CMatrix lhs = adjoint(offdiag_block(x, y));
  CMatrix rhs = offdiag_block(y.adjoint(), x.adjoint());
  CHECK(spectral_norm(lhs - rhs) == 0.0);

  CHECK_THROWS_AS(offdiag_block(x, CMatrix::Identity(2, 2)), DimensionMismatch);
}

TEST_CASE("offdiag of identity and zero is the nilpotent block shift") {
  CMatrix x = CMatrix::Identity(2, 2);
  CMatrix zero = CMatrix::Zero(2, 2);
  CMatrix block = offdiag_block(x, zero);
  CHECK(spectral_norm(block) == doctest::Approx(1.0));
  Enclosure w = numerical_radius(block, 1e-10);
  CHECK(w.lower == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(w.upper == doctest::Approx(0.5).epsilon(1e-9));
  // independent oracle for the same value
  CHECK(w_oracle(block, 2000, 5) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("offdiag swap symmetry of the numerical radius") {
  detail::Rng rng(71);
  for (int trial = 0; trial < 8; ++trial) {
    CMatrix x = random_ginibre(rng, 3), y = random_ginibre(rng, 3);
    CMatrix bxy = offdiag_block(x, y);
    CMatrix byx = offdiag_block(y, x);
    Enclosure exy = numerical_radius(bxy, 1e-8 * scale_of(bxy));
    Enclosure eyx = numerical_radius(byx, 1e-8 * scale_of(byx));
    CHECK(exy.lower <= eyx.upper + 1e-10);
    CHECK(eyx.lower <= exy.upper + 1e-10);
  }
}
