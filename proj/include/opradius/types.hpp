#ifndef OPRADIUS_TYPES_HPP
#define OPRADIUS_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "opradius/errors.hpp"

namespace opradius {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;  // dense square complex matrix
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Unit vector (and optimal sweep angle(s)) at which an enclosure's lower
/// bound is attained.
struct Witness {
  CVector x;
  std::vector<double> angles;  // {theta} for w, {s, phi} for w_e
  double objective = 0.0;
};

/// Certified interval for a radius value. `lower` is an attained objective
/// value, `upper` a rigorous global bound.
struct Enclosure {
  double lower = 0.0;
  double upper = 0.0;
  double tol_requested = 0.0;
  long evaluations = 0;
  Witness witness;

  double width() const { return upper - lower; }
  double mid() const { return 0.5 * (lower + upper); }
  bool contains(double v) const { return lower <= v && v <= upper; }
};

inline void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw DimensionMismatch(std::string(what) + ": matrix must be square and nonempty");
}

inline void require_finite(const CMatrix& a, const char* what) {
  if (!a.allFinite())
    throw ParseError(std::string(what) + ": matrix has NaN or Inf entries");
}

inline void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows())
    throw DimensionMismatch(std::string(what) + ": operands have different dimensions");
}

/// Natural size of a matrix for relative tolerances: max(1, ||A||_2).
double scale_of(const CMatrix& a);

}  // namespace opradius

#endif
