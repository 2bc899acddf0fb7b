#ifndef OPRADIUS_MATCORE_HPP
#define OPRADIUS_MATCORE_HPP

#include <functional>

#include "opradius/types.hpp"

// Dense complex matrix kernel: Hermitian eigendecomposition, SVD, spectral
// norm, spectral calculus on PSD matrices and matrix-valued quadrature.
// All functions are pure; none touch global state.

namespace opradius {

struct EigenSystem {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // unitary, columns are eigenvectors
};

struct SvdResult {
  CMatrix w;      // left singular vectors
  RVector sigma;  // descending, nonnegative
  CMatrix v;      // right singular vectors
};

/// Scalar map applied through the spectral theorem. Power maps use the
/// 0^0 = 1 convention so that H^0 = I for singular H.
struct ScalarFunctionSpec {
  enum class Kind { Power, Custom };
  Kind kind = Kind::Power;
  double exponent = 1.0;
  std::function<double(double)> fn;  // Custom only; domain [0, inf)

  static ScalarFunctionSpec power(double p);
  static ScalarFunctionSpec custom(std::function<double(double)> f);
  double operator()(double x) const;
};

CMatrix adjoint(const CMatrix& a);

/// Symmetrizes as (H+H*)/2, then factors. Throws NotHermitian when the
/// asymmetry exceeds 1e-10*||H||, ConvergenceFailure when the QR iteration
/// fails.
EigenSystem hermitian_eig(const CMatrix& h);

SvdResult svd(const CMatrix& a);

double spectral_norm(const CMatrix& a);

/// Largest eigenvalue of a Hermitian matrix (input is symmetrized, not
/// checked). Fast path for n <= 2.
double lambda_max_hermitian(const CMatrix& h);

/// Q f(clamp(lambda, 0)) Q* for Hermitian PSD H. Eigenvalues in
/// [-tau_psd, 0) with tau_psd = 1e-10*max(1, ||H||) are clamped to zero;
/// anything below -tau_psd throws NotPSD.
CMatrix psd_function(const CMatrix& h, const ScalarFunctionSpec& f);

/// |T| = (T*T)^{1/2}.
CMatrix abs_operator(const CMatrix& t);

/// Gauss-Legendre approximation of the integral over [0,1] of
/// (t*A + (1-t)*B)^r dt for Hermitian PSD A, B and r in [1,2]. Nodes double
/// (8, 16, ..., 1024) until successive approximations differ by at most
/// `tol` in spectral norm; throws NoConvergence past 1024 nodes.
CMatrix segment_power_integral(const CMatrix& a, const CMatrix& b, double r, double tol);

namespace detail {
/// Nodes/weights of the N-point Gauss-Legendre rule on [0,1].
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);
}  // namespace detail

}  // namespace opradius

#endif
