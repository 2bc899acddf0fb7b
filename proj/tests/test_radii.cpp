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

namespace {

Complex qform(const CMatrix& a, const CVector& x) { return x.dot(a * x); }

void check_enclosure_contract(const CMatrix& t, const Enclosure& e) {
  CHECK(e.lower <= e.upper);
  CHECK(e.upper - e.lower <= e.tol_requested * (1.0 + 1e-12));
  const double scale = std::max(1.0, spectral_norm(t));
  const double reproduced = std::abs(qform(t, e.witness.x));
  CHECK(std::abs(reproduced - e.lower) <= 1e-12 * scale);
  CHECK(std::abs(e.witness.x.norm() - 1.0) <= 1e-12);
}

}  // namespace

TEST_CASE("numerical_radius analytic cases") {
  Enclosure id = numerical_radius(CMatrix::Identity(3, 3), 1e-9);
  CHECK(id.contains(1.0));
  CHECK(id.width() <= 1e-9);

  CMatrix nilp = test_oracles::nilpotent_shift(2);
  Enclosure en = numerical_radius(nilp, 1e-10);
  CHECK(en.lower == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(en.upper == doctest::Approx(0.5).epsilon(1e-10));
  check_enclosure_contract(nilp, en);

  Enclosure ez = numerical_radius(CMatrix::Zero(2, 2), 1e-10);
  CHECK(ez.lower == 0.0);
  CHECK(ez.upper == 0.0);
}

TEST_CASE("numerical_radius input validation") {
  CMatrix t = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(numerical_radius(t, 0.0), InvalidTolerance);
  CHECK_THROWS_AS(numerical_radius(t, -1e-8), InvalidTolerance);
  CMatrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(numerical_radius(rect, 1e-8), DimensionMismatch);
}

TEST_CASE("numerical_radius agrees with the sampling oracle") {
  detail::Rng rng(101);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 4;
    CMatrix t = random_ginibre(rng, n);
    const double tol = 1e-8 * scale_of(t);
    Enclosure e = numerical_radius(t, tol);
    check_enclosure_contract(t, e);
    const double oracle = w_oracle(t, 3000, 1000 + trial);
    CHECK(oracle <= e.upper + 1e-12);
    CHECK(oracle >= e.lower - 1e-7 * scale_of(t));
  }
}

TEST_CASE("numerical_radius scale equivariance") {
  detail::Rng rng(103);
  for (int trial = 0; trial < 6; ++trial) {
    CMatrix t = random_ginibre(rng, 3);
    const double tol = 1e-9 * scale_of(t);
    Enclosure base = numerical_radius(t, tol);
    for (Complex c : {Complex(2.0, 0.0), Complex(0.0, 1.0)}) {
      Enclosure scaled = numerical_radius(c * t, tol * std::abs(c));
      CHECK(std::abs(scaled.lower - std::abs(c) * base.lower) <= 2.0 * tol * std::abs(c));
    }
  }
}

TEST_CASE("numerical_radius unitary invariance") {
  EnsembleSpec uspec;
  uspec.kind = EnsembleKind::Unitary;
  uspec.dim = 4;
  uspec.seed = 313;
  uspec.trials = 6;
  detail::Rng rng(107);
  for (int trial = 0; trial < 6; ++trial) {
    CMatrix t = random_ginibre(rng, 4);
    CMatrix q = generate(uspec, trial);
    const double tol = 1e-8 * scale_of(t);
    Enclosure a = numerical_radius(t, tol);
    Enclosure b = numerical_radius(q.adjoint() * t * q, tol);
    CHECK(a.lower <= b.upper + 1e-9 * scale_of(t));
    CHECK(b.lower <= a.upper + 1e-9 * scale_of(t));
  }
}

TEST_CASE("norm sandwich for the numerical radius") {
  detail::Rng rng(109);
  for (int trial = 0; trial < 15; ++trial) {
    CMatrix t = random_ginibre(rng, 2 + trial % 4);
    const double nt = spectral_norm(t);
    const double tol = 1e-9 * scale_of(t);
    Enclosure e = numerical_radius(t, tol);
    CHECK(0.5 * nt - tol <= e.upper);
    CHECK(e.lower <= nt + tol);
  }
}

TEST_CASE("euclidean_radius analytic cases") {
  CMatrix one = CMatrix::Identity(1, 1);
  Enclosure sqrt2 = euclidean_radius(one, one, 1e-9);
  CHECK(sqrt2.lower == doctest::Approx(M_SQRT2).epsilon(1e-9));
  CHECK(sqrt2.upper == doctest::Approx(M_SQRT2).epsilon(1e-9));

  CMatrix id2 = CMatrix::Identity(2, 2);
  Enclosure degenerate = euclidean_radius(id2, CMatrix::Zero(2, 2), 1e-9);
  CHECK(degenerate.contains(1.0));
  CHECK(degenerate.width() <= 1e-9);

  Enclosure zero = euclidean_radius(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2), 1e-9);
  CHECK(zero.upper == 0.0);

  CHECK_THROWS_AS(euclidean_radius(id2, CMatrix::Identity(3, 3), 1e-8), DimensionMismatch);
  CHECK_THROWS_AS(euclidean_radius(id2, id2, 0.0), InvalidTolerance);
}

TEST_CASE("euclidean_radius agrees with the sampling oracle") {
  detail::Rng rng(113);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + trial % 2;
    CMatrix b = random_ginibre(rng, n);
    CMatrix c = random_ginibre(rng, n);
    const double scale = std::max(scale_of(b), scale_of(c));
    Enclosure e = euclidean_radius(b, c, 1e-6 * scale);
    CHECK(e.lower <= e.upper);
    CHECK(e.width() <= 1e-6 * scale * (1.0 + 1e-12));
    const double obj = std::hypot(std::abs(qform(b, e.witness.x)), std::abs(qform(c, e.witness.x)));
    CHECK(std::abs(obj - e.lower) <= 1e-12 * scale);
    const double oracle = we_oracle(b, c, 3000, 7000 + trial);
    CHECK(oracle <= e.upper + 1e-12);
    CHECK(oracle >= e.lower - 1e-6 * scale);
  }
}

TEST_CASE("euclidean radius norm sandwich") {
  detail::Rng rng(127);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix b = random_ginibre(rng, 3);
    CMatrix c = random_ginibre(rng, 3);
    const double gram = spectral_norm(b.adjoint() * b + c.adjoint() * c);
    const double scale = std::max(scale_of(b), scale_of(c));
    Enclosure e = euclidean_radius(b, c, 1e-5 * scale);
    CHECK(0.125 * gram <= e.upper * e.upper + 1e-6 * scale * scale);
    CHECK(e.lower * e.lower <= gram + 1e-6 * scale * scale);
  }
}

TEST_CASE("euclidean radius dominates both numerical radii") {
  detail::Rng rng(131);
  for (int trial = 0; trial < 8; ++trial) {
    CMatrix b = random_ginibre(rng, 3);
    CMatrix c = random_ginibre(rng, 3);
    const double scale = std::max(scale_of(b), scale_of(c));
    Enclosure we = euclidean_radius(b, c, 1e-6 * scale);
    Enclosure wb = numerical_radius(b, 1e-8 * scale);
    Enclosure wc = numerical_radius(c, 1e-8 * scale);
    CHECK(we.upper >= std::max(wb.lower, wc.lower) - 1e-6 * scale);
  }
}

TEST_CASE("w_oracle basics") {
  CHECK(w_oracle(CMatrix::Identity(3, 3), 50, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CMatrix nilp = test_oracles::nilpotent_shift(2);
  CHECK(w_oracle(nilp, 10000, 42) >= 0.499);

  detail::Rng rng(137);
  for (int trial = 0; trial < 5; ++trial) {
    CMatrix t = random_ginibre(rng, 4);
    const double small = w_oracle(t, 100, 99);
    const double big = w_oracle(t, 10000, 99);
    CHECK(big >= small - 1e-12);
  }
}

TEST_CASE("we_oracle basics") {
  CMatrix id = CMatrix::Identity(2, 2);
  CHECK(we_oracle(id, id, 200, 3) == doctest::Approx(M_SQRT2).epsilon(1e-9));
  CMatrix zero = CMatrix::Zero(2, 2);
  CHECK(we_oracle(zero, zero, 100, 3) == 0.0);

  detail::Rng rng(139);
  for (int trial = 0; trial < 5; ++trial) {
    CMatrix b = random_ginibre(rng, 3);
    CMatrix c = random_ginibre(rng, 3);
    const double scale = std::max(scale_of(b), scale_of(c));
    Enclosure e = euclidean_radius(b, c, 1e-6 * scale);
    CHECK(we_oracle(b, c, 2000, 1234 + trial) <= e.upper + 1e-12);
  }
}

TEST_CASE("default_tol scales with the operator") {
  CMatrix big = 100.0 * CMatrix::Identity(2, 2);
  CHECK(default_tol(big) == doctest::Approx(1e-6));
  CHECK(default_tol(CMatrix::Identity(2, 2)) == doctest::Approx(1e-8));
}
