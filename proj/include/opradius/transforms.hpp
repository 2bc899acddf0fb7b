#ifndef OPRADIUS_TRANSFORMS_HPP
#define OPRADIUS_TRANSFORMS_HPP

#include <utility>

#include "opradius/types.hpp"

// Operator decompositions consumed by the bound formulas: Cartesian and
// polar decompositions, the t-Aluthge transform and 2x2 off-diagonal block
// assembly.

namespace opradius {

/// T = U P with P = |T| PSD and U the canonical partial isometry that
/// vanishes on ker(T). `rank_tol` is the singular-value cutoff that was
/// used to decide the kernel.
struct PolarParts {
  CMatrix u;
  CMatrix p;
  double rank_tol = 0.0;
};

/// (Re T, Im T) with T = Re T + i Im T, both Hermitian.
std::pair<CMatrix, CMatrix> cartesian(const CMatrix& t);

PolarParts polar(const CMatrix& t);

/// |T|^t U |T|^{1-t} for t in [0,1], with U from polar(). At t = 1/2 this
/// is the Aluthge transform; at t = 0 it reduces to T itself.
CMatrix aluthge_t(const CMatrix& t, double tparam);

/// [[0, X], [Y, 0]] of size 2n for n-dimensional X, Y.
CMatrix offdiag_block(const CMatrix& x, const CMatrix& y);

}  // namespace opradius

#endif
