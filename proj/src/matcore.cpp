#include "opradius/matcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace opradius {

namespace {

// Symmetrized copy; every spectral routine below works on this.
CMatrix hermitian_part(const CMatrix& h) { return 0.5 * (h + h.adjoint()); }

Eigen::SelfAdjointEigenSolver<CMatrix> factor(const CMatrix& hs, bool with_vectors) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es;
  es.compute(hs, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("hermitian_eig: QR iteration did not converge");
  return es;
}

double spectral_abs_max(const RVector& eigenvalues) {
  return std::max(std::abs(eigenvalues(0)), std::abs(eigenvalues(eigenvalues.size() - 1)));
}

// Spectral power of an already-Hermitian matrix, clamping the roundoff
// window [-tau_psd, 0) to zero.
CMatrix psd_apply(const Eigen::SelfAdjointEigenSolver<CMatrix>& es, const ScalarFunctionSpec& f,
                  const char* what) {
  const RVector& lam = es.eigenvalues();
  const double norm_h = spectral_abs_max(lam);
  const double tau_psd = 1e-10 * std::max(1.0, norm_h);
  RVector mapped(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    double x = lam(i);
    if (x < -tau_psd) {
      std::ostringstream os;
      os << what << ": eigenvalue " << x << " below PSD tolerance " << -tau_psd;
      throw NotPSD(os.str());
    }
    mapped(i) = f(std::max(x, 0.0));
  }
  const CMatrix& q = es.eigenvectors();
  CMatrix out = q * mapped.asDiagonal() * q.adjoint();
  return hermitian_part(out);
}

}  // namespace

double scale_of(const CMatrix& a) { return std::max(1.0, spectral_norm(a)); }

ScalarFunctionSpec ScalarFunctionSpec::power(double p) {
  if (!(p >= 0.0) || !std::isfinite(p))
    throw ParameterOutOfRange("ScalarFunctionSpec::power: exponent must be finite and >= 0");
  ScalarFunctionSpec s;
  s.kind = Kind::Power;
  s.exponent = p;
  return s;
}

ScalarFunctionSpec ScalarFunctionSpec::custom(std::function<double(double)> f) {
  if (!f) throw ParameterOutOfRange("ScalarFunctionSpec::custom: empty function");
  ScalarFunctionSpec s;
  s.kind = Kind::Custom;
  s.fn = std::move(f);
  return s;
}

double ScalarFunctionSpec::operator()(double x) const {
  if (kind == Kind::Custom) return fn(x);
  const double p = exponent;
  if (x <= 0.0) return p == 0.0 ? 1.0 : 0.0;  // 0^0 = 1
  if (p == 0.0) return 1.0;
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  if (p == 0.5) return std::sqrt(x);
  return std::pow(x, p);
}

CMatrix adjoint(const CMatrix& a) {
  require_square(a, "adjoint");
  return a.adjoint();
}

EigenSystem hermitian_eig(const CMatrix& h) {
  require_square(h, "hermitian_eig");
  require_finite(h, "hermitian_eig");
  CMatrix hs = hermitian_part(h);
  auto es = factor(hs, true);
  const double norm_h = spectral_abs_max(es.eigenvalues());
  const double tau_herm = 1e-10 * norm_h;
  // Frobenius dominates the spectral norm, so the cheap test clears almost
  // every caller; the exact norm settles the borderline ones.
  const CMatrix asym = h - h.adjoint();
  if (asym.norm() > tau_herm && spectral_norm(asym) > tau_herm)
    throw NotHermitian("hermitian_eig: asymmetry exceeds 1e-10*||H||");
  return EigenSystem{es.eigenvalues(), es.eigenvectors()};
}

SvdResult svd(const CMatrix& a) {
  require_square(a, "svd");
  require_finite(a, "svd");
  Eigen::JacobiSVD<CMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success)
    throw ConvergenceFailure("svd: Jacobi iteration did not converge");
  return SvdResult{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

double spectral_norm(const CMatrix& a) {
  require_square(a, "spectral_norm");
  if (a.rows() == 1) return std::abs(a(0, 0));
  CMatrix gram = a.adjoint() * a;
  double lam = lambda_max_hermitian(gram);
  return std::sqrt(std::max(lam, 0.0));
}

double lambda_max_hermitian(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  if (n == 1) return h(0, 0).real();
  if (n == 2) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const Complex b = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
    return 0.5 * (a + d) + std::hypot(0.5 * (a - d), std::abs(b));
  }
  auto es = factor(hermitian_part(h), false);
  return es.eigenvalues()(n - 1);
}

CMatrix psd_function(const CMatrix& h, const ScalarFunctionSpec& f) {
  EigenSystem sys = hermitian_eig(h);
  const double norm_h = spectral_abs_max(sys.eigenvalues);
  const double tau_psd = 1e-10 * std::max(1.0, norm_h);
  RVector mapped(sys.eigenvalues.size());
  for (Eigen::Index i = 0; i < sys.eigenvalues.size(); ++i) {
    double x = sys.eigenvalues(i);
    if (x < -tau_psd) {
      std::ostringstream os;
      os << "psd_function: eigenvalue " << x << " below PSD tolerance " << -tau_psd;
      throw NotPSD(os.str());
    }
    mapped(i) = f(std::max(x, 0.0));
  }
  CMatrix out = sys.eigenvectors * mapped.asDiagonal() * sys.eigenvectors.adjoint();
  return hermitian_part(out);
}

CMatrix abs_operator(const CMatrix& t) {
  require_square(t, "abs_operator");
  require_finite(t, "abs_operator");
  CMatrix gram = hermitian_part(t.adjoint() * t);
  auto es = factor(gram, true);
  return psd_apply(es, ScalarFunctionSpec::power(0.5), "abs_operator");
}

namespace detail {

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mutex;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  // Newton on P_n over [-1,1], then map to [0,1].
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (x[i] + 1.0);
    weights[i] = 0.5 * w[i];
  }
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(n, std::make_pair(nodes, weights));
}

}  // namespace detail

CMatrix segment_power_integral(const CMatrix& a, const CMatrix& b, double r, double tol) {
  require_same_dim(a, b, "segment_power_integral");
  require_finite(a, "segment_power_integral");
  require_finite(b, "segment_power_integral");
  if (!(r >= 1.0 && r <= 2.0))
    throw ParameterOutOfRange("segment_power_integral: r must be in [1,2]");
  if (!(tol > 0.0)) throw InvalidTolerance("segment_power_integral: tol must be positive");

  const CMatrix as = hermitian_part(a);
  const CMatrix bs = hermitian_part(b);
  for (const CMatrix* m : {&as, &bs}) {
    auto es = factor(*m, false);
    const double norm_m = spectral_abs_max(es.eigenvalues());
    if (es.eigenvalues()(0) < -1e-10 * std::max(1.0, norm_m))
      throw NotPSD("segment_power_integral: operand is not PSD");
  }

  const ScalarFunctionSpec f = ScalarFunctionSpec::power(r);
  auto quadrature = [&](int nodes_count) {
    std::vector<double> t, w;
    detail::gauss_legendre_01(nodes_count, t, w);
    CMatrix acc = CMatrix::Zero(a.rows(), a.cols());
    for (int k = 0; k < nodes_count; ++k) {
      CMatrix seg = t[k] * as + (1.0 - t[k]) * bs;
      auto es = factor(seg, true);
      acc += w[k] * psd_apply(es, f, "segment_power_integral");
    }
    return acc;
  };

  CMatrix prev = quadrature(8);
  for (int nodes_count = 16; nodes_count <= 1024; nodes_count *= 2) {
    CMatrix next = quadrature(nodes_count);
    if (spectral_norm(next - prev) <= tol) return hermitian_part(next);
    prev = next;
  }
  throw NoConvergence("segment_power_integral: node budget (1024) exhausted");
}

}  // namespace opradius
