#include "opradius/transforms.hpp"

#include <cmath>
#include <limits>

#include "opradius/matcore.hpp"

namespace opradius {

std::pair<CMatrix, CMatrix> cartesian(const CMatrix& t) {
  require_square(t, "cartesian");
  require_finite(t, "cartesian");
  const Complex two_i(0.0, 2.0);
  CMatrix re = 0.5 * (t + t.adjoint());
  CMatrix im = (t - t.adjoint()) / two_i;
  return {re, im};
}

PolarParts polar(const CMatrix& t) {
  SvdResult f = svd(t);
  const Eigen::Index n = t.rows();
  const double sigma_max = f.sigma.size() ? f.sigma(0) : 0.0;
  const double rank_tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * sigma_max;

  // U = W Pi V* with Pi zeroing the numerically-null directions, so U
  // vanishes on ker(T) and U*U projects onto range(P).
  RVector mask(f.sigma.size());
  for (Eigen::Index k = 0; k < f.sigma.size(); ++k) mask(k) = f.sigma(k) > rank_tol ? 1.0 : 0.0;
  CMatrix u = f.w * mask.asDiagonal() * f.v.adjoint();
  CMatrix p = f.v * f.sigma.asDiagonal() * f.v.adjoint();
  p = 0.5 * (p + p.adjoint());
  return PolarParts{std::move(u), std::move(p), rank_tol};
}

CMatrix aluthge_t(const CMatrix& t, double tparam) {
  require_square(t, "aluthge_t");
  require_finite(t, "aluthge_t");
  if (!(tparam >= 0.0 && tparam <= 1.0))
    throw ParameterOutOfRange("aluthge_t: t must be in [0,1]");
  PolarParts parts = polar(t);
  CMatrix left = psd_function(parts.p, ScalarFunctionSpec::power(tparam));
  CMatrix right = psd_function(parts.p, ScalarFunctionSpec::power(1.0 - tparam));
  return left * parts.u * right;
}

CMatrix offdiag_block(const CMatrix& x, const CMatrix& y) {
  require_same_dim(x, y, "offdiag_block");
  require_finite(x, "offdiag_block");
  require_finite(y, "offdiag_block");
  const Eigen::Index n = x.rows();
  CMatrix t = CMatrix::Zero(2 * n, 2 * n);
  t.block(0, n, n, n) = x;
  t.block(n, 0, n, n) = y;
  return t;
}

}  // namespace opradius
