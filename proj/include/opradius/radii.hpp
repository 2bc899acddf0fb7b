#ifndef OPRADIUS_RADII_HPP
#define OPRADIUS_RADII_HPP

#include <cstdint>

#include "opradius/types.hpp"

// Certified enclosures for the numerical radius w(T) and the Euclidean
// operator radius w_e(B,C), plus independent sampling oracles used to
// validate them.

namespace opradius {

/// Certified enclosure of w(T) = max_theta lambda_max(Re(e^{i theta} T)).
/// The sweep over theta is a branch-and-bound whose per-cell upper bounds
/// combine the Lipschitz constant L = ||T|| with the chord bound obtained
/// from convexity of lambda_max along matrix segments. The returned lower
/// bound is always an attained value |<Tx,x>| at the unit witness vector.
Enclosure numerical_radius(const CMatrix& t, double tol);

/// Certified enclosure of w_e(B,C) via the reduction
///   w_e(B,C) = max over s in [0,pi/2], phi in [0,2pi) of
///              w(cos(s) B + e^{i phi} sin(s) C),
/// a 2-D branch-and-bound with inner numerical_radius calls at tol/4.
Enclosure euclidean_radius(const CMatrix& b, const CMatrix& c, double tol);

/// Lower-bound oracle: max of |<Tx,x>| over `samples` Haar-random unit
/// vectors, then eigenvector ascent from the best 10 candidates.
/// Deterministic for a fixed seed; monotone in `samples`.
double w_oracle(const CMatrix& t, long samples, std::uint64_t seed);

/// Same scheme with objective sqrt(|<Bx,x>|^2 + |<Cx,x>|^2).
double we_oracle(const CMatrix& b, const CMatrix& c, long samples, std::uint64_t seed);

/// Default CLI tolerance: 1e-8 * max(1, ||T||).
double default_tol(const CMatrix& t);

namespace detail {
/// One ascent run for |<Tx,x>|: alternate the optimal support rotation with
/// a top-eigenvector step. Returns the (monotone) final objective; x is
/// updated in place.
double ascend_w(const CMatrix& t, CVector& x, int max_iters);
double ascend_we(const CMatrix& b, const CMatrix& c, CVector& x, int max_iters);
}  // namespace detail

}  // namespace opradius

#endif
