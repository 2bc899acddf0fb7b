#include "opradius/radii.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <vector>

#include "opradius/matcore.hpp"
#include "opradius/rng.hpp"

namespace opradius {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

Complex quad_form(const CMatrix& a, const CVector& x) { return x.dot(a * x); }

// Hermitian part of e^{i theta} T.
CMatrix rotated_real_part(const CMatrix& t, double theta) {
  const Complex phase = std::polar(1.0, theta);
  CMatrix m = phase * t;
  return 0.5 * (m + m.adjoint());
}

CVector top_eigenvector(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("numerical_radius: eigensolver failed on a sweep sample");
  return es.eigenvectors().col(h.rows() - 1);
}

struct SweepOptions {
  int initial_cells = 64;
  bool algebraic_caps = true;
  long eval_budget = 4000000;
};

// Phase-gauge test: if every significant entry T_ij sits on a graded
// support pattern (q_j = q_i + 1 along each edge), then
// e^{i theta} T = D T D* for the diagonal unitary D = diag(e^{-i theta q_k}),
// so the sweep objective is constant in theta. Off-pattern entries are
// returned as a perturbation norm bound; w(T) <= g(0) + 2*offpattern.
// Diagonal entries can never satisfy the grading, which correctly excludes
// matrices whose range rotates with theta.
bool graded_support(const CMatrix& t, double& offpattern_norm) {
  const Eigen::Index n = t.rows();
  const double max_abs = t.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) {
    offpattern_norm = 0.0;
    return true;
  }
  const double tau_big = 1e-7 * max_abs;

  std::vector<double> q(n, 0.0);
  std::vector<int> state(n, -1);  // component id, -1 = unvisited
  int comp = 0;
  for (Eigen::Index start = 0; start < n; ++start) {
    if (state[start] >= 0) continue;
    state[start] = comp;
    q[start] = 0.0;
    std::vector<Eigen::Index> stack{start};
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(t(i, j)) > tau_big) {  // edge i -> j: q_j = q_i + 1
          if (state[j] < 0) {
            state[j] = comp;
            q[j] = q[i] + 1.0;
            stack.push_back(j);
          } else if (q[j] != q[i] + 1.0) {
            return false;
          }
        }
        if (std::abs(t(j, i)) > tau_big) {  // edge j -> i: q_i = q_j + 1
          if (state[j] < 0) {
            state[j] = comp;
            q[j] = q[i] - 1.0;
            stack.push_back(j);
          } else if (q[i] != q[j] + 1.0) {
            return false;
          }
        }
      }
    }
    ++comp;
  }
  double frob2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = std::abs(t(i, j));
      if (a > 0.0 && a <= tau_big && q[j] != q[i] + 1.0) frob2 += a * a;
    }
  offpattern_norm = std::sqrt(frob2);
  return true;
}

struct ThetaCell {
  double a, b;    // interval
  double ga, gb;  // endpoint samples
  double upper;   // certified bound over the interval
};

struct ThetaCellLess {
  bool operator()(const ThetaCell& lhs, const ThetaCell& rhs) const {
    if (lhs.upper != rhs.upper) return lhs.upper < rhs.upper;
    return lhs.a > rhs.a;  // prefer the smaller angle on ties
  }
};

// Valid on intervals of width < pi: e^{i theta} is a radial blow-up of the
// chord between the endpoint phases (factor in [cos(delta/2), 1]), and
// lambda_max is convex and positively homogeneous on Hermitian matrices.
double cell_upper_bound(const ThetaCell& c, double lipschitz, double cap) {
  const double delta = c.b - c.a;
  const double m = std::max(c.ga, c.gb);
  const double chord = m >= 0.0 ? m / std::cos(0.5 * delta) : m;
  const double lips = 0.5 * (c.ga + c.gb) + 0.5 * lipschitz * delta;
  return std::min({chord, lips, cap});
}

Enclosure numerical_radius_impl(const CMatrix& t, double tol, const SweepOptions& opt) {
  require_square(t, "numerical_radius");
  require_finite(t, "numerical_radius");
  if (!(tol > 0.0)) throw InvalidTolerance("numerical_radius: tol must be positive");

  const Eigen::Index n = t.rows();
  const double norm_t = spectral_norm(t);

  Enclosure out;
  out.tol_requested = tol;
  if (norm_t == 0.0) {
    out.witness.x = CVector::Unit(n, 0);
    out.witness.angles = {0.0};
    return out;
  }

  const double lipschitz = norm_t;
  const double eig_slack = 64.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * norm_t;
  long evals = 0;

  std::vector<std::pair<double, double>> samples;  // (theta, g)
  auto eval_g = [&](double theta) {
    ++evals;
    double g = lambda_max_hermitian(rotated_real_part(t, theta));
    samples.emplace_back(theta, g);
    return g;
  };

  // Global algebraic caps on w(T); they close flat sweeps immediately.
  double cap = norm_t;
  if (opt.algebraic_caps) {
    cap = std::min(cap, 0.5 * (norm_t + std::sqrt(spectral_norm(t * t))));
    cap = std::min(cap, std::sqrt(0.5 * spectral_norm(t.adjoint() * t + t * t.adjoint())));
    cap = std::min(cap, 0.5 * spectral_norm(abs_operator(t) + abs_operator(t.adjoint())));
  }
  const double capped = cap + eig_slack;

  // Graded support means the objective is provably constant in theta: one
  // sample plus ascent closes the enclosure without any sweep.
  {
    double offpattern = 0.0;
    if (graded_support(t, offpattern)) {
      const double g0 = eval_g(0.0);
      CVector x0 = top_eigenvector(rotated_real_part(t, 0.0));
      evals += 1;
      const double att = detail::ascend_w(t, x0, 80);
      evals += 20;
      const double flat_lower = std::max(att, g0);
      const double flat_upper =
          std::max(std::min(g0 + 2.0 * offpattern + eig_slack, capped), flat_lower);
      if (flat_upper <= flat_lower + tol) {
        out.lower = flat_lower;
        out.upper = flat_upper;
        out.evaluations = evals;
        out.witness.x = x0;
        out.witness.angles = {0.0};
        out.witness.objective = flat_lower;
        return out;
      }
    }
  }

  const int k = std::max(4, opt.initial_cells);
  std::vector<double> grid_g(k + 1);
  double best_sample = -std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  for (int j = 0; j < k; ++j) {
    const double theta = kTwoPi * j / k;
    grid_g[j] = eval_g(theta);
    if (grid_g[j] > best_sample) {
      best_sample = grid_g[j];
      best_theta = theta;
    }
  }
  grid_g[k] = grid_g[0];

  // Attained lower bound: |<Tx,x>| at the best support eigenvector, then
  // eigenvector ascent.
  CVector witness_x = top_eigenvector(rotated_real_part(t, best_theta));
  evals += 1;
  double lower = detail::ascend_w(t, witness_x, 80);
  evals += 80;  // ascent bound, counted coarsely
  lower = std::max(lower, best_sample);

  std::priority_queue<ThetaCell, std::vector<ThetaCell>, ThetaCellLess> queue;
  auto push_cell = [&](double a, double b, double ga, double gb) {
    ThetaCell c{a, b, ga, gb, 0.0};
    c.upper = cell_upper_bound(c, lipschitz, cap) + eig_slack;
    if (c.upper > lower) queue.push(c);
  };
  for (int j = 0; j < k; ++j) push_cell(kTwoPi * j / k, kTwoPi * (j + 1) / k, grid_g[j], grid_g[j + 1]);

  double upper = capped;
  while (!queue.empty()) {
    ThetaCell top = queue.top();
    if (top.upper <= lower) {  // pruned since push
      queue.pop();
      continue;
    }
    upper = std::min(top.upper, capped);
    if (upper <= lower + tol) break;
    if (evals > opt.eval_budget)
      throw ConvergenceFailure("numerical_radius: evaluation budget exhausted");
    queue.pop();

    const double mid = 0.5 * (top.a + top.b);
    const double gm = eval_g(mid);
    if (gm > best_sample) {
      best_sample = gm;
      best_theta = mid;
    }
    if (gm > lower) {
      CVector x = top_eigenvector(rotated_real_part(t, mid));
      evals += 1;
      double att = detail::ascend_w(t, x, 80);
      evals += 20;
      if (att > lower) {
        lower = att;
        witness_x = x;
      }
      lower = std::max(lower, gm);
    }
    push_cell(top.a, mid, top.ga, gm);
    push_cell(mid, top.b, gm, top.gb);
  }
  if (queue.empty()) upper = lower;
  upper = std::max(upper, lower);

  // Tie-break: report the smallest theta attaining the best sample within
  // 1e-12 * scale.
  const double tie_tol = 1e-12 * std::max(1.0, norm_t);
  double theta_hat = best_theta;
  for (const auto& [theta, g] : samples)
    if (g >= best_sample - tie_tol && theta < theta_hat) theta_hat = theta;
  if (theta_hat != best_theta) {
    CVector x = top_eigenvector(rotated_real_part(t, theta_hat));
    evals += 1;
    double att = detail::ascend_w(t, x, 80);
    if (att >= lower) {
      lower = att;
      witness_x = x;
    }
  }

  out.lower = lower;
  out.upper = std::max(upper, lower);
  out.evaluations = evals;
  out.witness.x = witness_x;
  out.witness.angles = {theta_hat};
  out.witness.objective = lower;
  return out;
}

}  // namespace

namespace detail {

double ascend_w(const CMatrix& t, CVector& x, int max_iters) {
  x.normalize();
  double obj = std::abs(quad_form(t, x));
  for (int it = 0; it < max_iters; ++it) {
    const Complex c = quad_form(t, x);
    const Complex phase = std::abs(c) > 0.0 ? std::conj(c) / std::abs(c) : Complex(1.0, 0.0);
    CMatrix m = phase * t;
    CVector xn = top_eigenvector(0.5 * (m + m.adjoint()));
    const double objn = std::abs(quad_form(t, xn));
    if (objn <= obj + 1e-15 * std::max(1.0, obj)) break;
    x = xn;
    obj = objn;
  }
  return obj;
}

double ascend_we(const CMatrix& b, const CMatrix& c, CVector& x, int max_iters) {
  x.normalize();
  auto objective = [&](const CVector& v) {
    return std::hypot(std::abs(quad_form(b, v)), std::abs(quad_form(c, v)));
  };
  double obj = objective(x);
  for (int it = 0; it < max_iters; ++it) {
    const Complex pb = quad_form(b, x);
    const Complex pc = quad_form(c, x);
    const double norm = std::hypot(std::abs(pb), std::abs(pc));
    CMatrix a = norm > 0.0 ? CMatrix((std::conj(pb) * b + std::conj(pc) * c) / norm)
                           : CMatrix(b + c);
    CVector xn = top_eigenvector(0.5 * (a + a.adjoint()));
    const double objn = objective(xn);
    if (objn <= obj + 1e-15 * std::max(1.0, obj)) break;
    x = xn;
    obj = objn;
  }
  return obj;
}

}  // namespace detail

Enclosure numerical_radius(const CMatrix& t, double tol) {
  return numerical_radius_impl(t, tol, SweepOptions{});
}

double default_tol(const CMatrix& t) { return 1e-8 * scale_of(t); }

namespace {

struct CornerEval {
  double lo = 0.0;       // certified lower for M(s, phi)
  double up = 0.0;       // certified upper
  double attained = 0.0; // w_e objective at the inner witness
  CVector x;
};

struct PlaneCell {
  double s1, s2, phi1, phi2;
  double m_up;  // max corner upper
  double upper;
};

struct PlaneCellLess {
  bool operator()(const PlaneCell& lhs, const PlaneCell& rhs) const {
    if (lhs.upper != rhs.upper) return lhs.upper < rhs.upper;
    if (lhs.s1 != rhs.s1) return lhs.s1 > rhs.s1;
    return lhs.phi1 > rhs.phi1;
  }
};

}  // namespace

Enclosure euclidean_radius(const CMatrix& b, const CMatrix& c, double tol) {
  require_same_dim(b, c, "euclidean_radius");
  require_finite(b, "euclidean_radius");
  require_finite(c, "euclidean_radius");
  if (!(tol > 0.0)) throw InvalidTolerance("euclidean_radius: tol must be positive");

  const Eigen::Index n = b.rows();
  const double norm_b = spectral_norm(b);
  const double norm_c = spectral_norm(c);

  Enclosure out;
  out.tol_requested = tol;
  if (norm_b == 0.0 && norm_c == 0.0) {
    out.witness.x = CVector::Unit(n, 0);
    out.witness.angles = {0.0, 0.0};
    return out;
  }

  const double lips_s = norm_b + norm_c;
  const double inner_tol = 0.25 * tol;
  const double cap = std::sqrt(spectral_norm(b.adjoint() * b + c.adjoint() * c));

  long evals = 0;
  SweepOptions inner_opt;
  inner_opt.initial_cells = 24;

  auto objective = [&](const CVector& x) {
    return std::hypot(std::abs(quad_form(b, x)), std::abs(quad_form(c, x)));
  };

  // Corner evaluations are shared between neighboring cells; at s = 0 the
  // angle phi is irrelevant (M = w(B)) and at s = pi/2 it only rotates C,
  // so those rows collapse onto canonical keys.
  std::map<std::pair<double, double>, CornerEval> corners;
  double lower = 0.0;
  CVector witness_x = CVector::Unit(n, 0);
  double best_attained = -1.0;
  double best_s = 0.0, best_phi = 0.0;

  auto corner = [&](double s, double phi) -> const CornerEval& {
    std::pair<double, double> key(s, phi);
    if (s == 0.0) key = {0.0, 0.0};
    if (s == 0.5 * M_PI) key = {0.5 * M_PI, 0.0};
    auto it = corners.find(key);
    if (it != corners.end()) return it->second;

    const Complex coef = std::polar(1.0, key.second) * std::sin(key.first);
    CMatrix a = std::cos(key.first) * b + coef * c;
    Enclosure inner = numerical_radius_impl(a, inner_tol, inner_opt);
    evals += inner.evaluations;

    CornerEval ce;
    ce.lo = inner.lower;
    ce.up = inner.upper;
    ce.x = inner.witness.x;
    ce.attained = objective(ce.x);
    auto [pos, inserted] = corners.emplace(key, std::move(ce));
    const CornerEval& ref = pos->second;
    if (ref.attained > best_attained) {
      best_attained = ref.attained;
      best_s = key.first;
      best_phi = key.second;
      if (ref.attained > lower) {
        CVector x = ref.x;
        double att = detail::ascend_we(b, c, x, 80);
        evals += 20;
        if (att > lower) {
          lower = att;
          witness_x = x;
        }
        lower = std::max(lower, ref.attained);
      }
    }
    return ref;
  };

  auto cell_bound = [&](PlaneCell& cell) {
    const double m_up = cell.m_up;
    const double ds = cell.s2 - cell.s1;
    const double dphi = cell.phi2 - cell.phi1;
    const double sin_hi = std::sin(cell.s2);
    const double chord =
        (m_up + sin_hi * (1.0 / std::cos(0.5 * dphi) - 1.0) * norm_c) / std::cos(0.5 * ds);
    const double lips = m_up + 0.5 * lips_s * ds + 0.5 * sin_hi * norm_c * dphi;
    cell.upper = std::min({chord, lips, cap});
  };

  std::priority_queue<PlaneCell, std::vector<PlaneCell>, PlaneCellLess> queue;
  auto push_cell = [&](double s1, double s2, double phi1, double phi2) {
    PlaneCell cell{s1, s2, phi1, phi2, 0.0, 0.0};
    cell.m_up = std::max({corner(s1, phi1).up, corner(s1, phi2).up, corner(s2, phi1).up,
                          corner(s2, phi2).up});
    cell_bound(cell);
    if (cell.upper > lower) queue.push(cell);
  };

  const int ks = 3, kphi = 8;
  for (int i = 0; i < ks; ++i)
    for (int j = 0; j < kphi; ++j)
      push_cell(0.5 * M_PI * i / ks, 0.5 * M_PI * (i + 1) / ks, kTwoPi * j / kphi,
                kTwoPi * (j + 1) / kphi);

  double upper = cap;
  const long budget = 20000000;
  while (!queue.empty()) {
    PlaneCell top = queue.top();
    if (top.upper <= lower) {
      queue.pop();
      continue;
    }
    upper = std::min(top.upper, cap);
    if (upper <= lower + tol) break;
    if (evals > budget) throw ConvergenceFailure("euclidean_radius: evaluation budget exhausted");
    queue.pop();

    // Split the direction that contributes more certified slack.
    const double ds = top.s2 - top.s1;
    const double dphi = top.phi2 - top.phi1;
    const double gap_s = top.m_up * (1.0 / std::cos(0.5 * ds) - 1.0) + 0.5 * 1e-3 * lips_s * ds;
    const double gap_phi =
        std::sin(top.s2) * norm_c * ((1.0 / std::cos(0.5 * dphi) - 1.0) + 0.5 * 1e-3 * dphi);
    if (gap_s >= gap_phi) {
      const double sm = 0.5 * (top.s1 + top.s2);
      push_cell(top.s1, sm, top.phi1, top.phi2);
      push_cell(sm, top.s2, top.phi1, top.phi2);
    } else {
      const double pm = 0.5 * (top.phi1 + top.phi2);
      push_cell(top.s1, top.s2, top.phi1, pm);
      push_cell(top.s1, top.s2, pm, top.phi2);
    }
  }
  if (queue.empty()) upper = lower;
  upper = std::max(upper, lower);

  // Lexicographically smallest (s, phi) attaining the best corner objective
  // within 1e-12 * scale.
  const double tie_tol = 1e-12 * std::max(1.0, std::max(norm_b, norm_c));
  double s_hat = best_s, phi_hat = best_phi;
  for (const auto& [key, ce] : corners)
    if (ce.attained >= best_attained - tie_tol &&
        (key.first < s_hat || (key.first == s_hat && key.second < phi_hat))) {
      s_hat = key.first;
      phi_hat = key.second;
    }
  if (s_hat != best_s || phi_hat != best_phi) {
    CVector x = corners.at({s_hat, phi_hat}).x;
    double att = detail::ascend_we(b, c, x, 80);
    if (att >= lower) {
      lower = att;
      witness_x = x;
    }
  }

  out.lower = lower;
  out.upper = std::max(upper, lower);
  out.evaluations = evals;
  out.witness.x = witness_x;
  out.witness.angles = {s_hat, phi_hat};
  out.witness.objective = lower;
  return out;
}

namespace {

using detail::Rng;

template <typename Objective, typename Ascend>
double sampling_oracle(Eigen::Index n, long samples, std::uint64_t seed, Objective&& objective,
                       Ascend&& ascend) {
  samples = std::max<long>(1, samples);
  Rng rng(seed);

  const std::size_t keep = 10;
  std::vector<std::pair<double, CVector>> top;  // descending by objective
  double best = 0.0;
  for (long k = 0; k < samples; ++k) {
    CVector x = rng.unit_vector(n);
    const double obj = objective(x);
    best = std::max(best, obj);
    if (top.size() < keep || obj > top.back().first) {
      auto pos = std::upper_bound(top.begin(), top.end(), obj,
                                  [](double v, const auto& e) { return v > e.first; });
      top.emplace(pos, obj, std::move(x));
      if (top.size() > keep) top.pop_back();
    }
  }
  for (auto& [obj, x] : top) best = std::max(best, ascend(x));
  return best;
}

}  // namespace

double w_oracle(const CMatrix& t, long samples, std::uint64_t seed) {
  require_square(t, "w_oracle");
  require_finite(t, "w_oracle");
  return sampling_oracle(
      t.rows(), samples, seed, [&](const CVector& x) { return std::abs(quad_form(t, x)); },
      [&](CVector& x) { return detail::ascend_w(t, x, 150); });
}

double we_oracle(const CMatrix& b, const CMatrix& c, long samples, std::uint64_t seed) {
  require_same_dim(b, c, "we_oracle");
  require_finite(b, "we_oracle");
  require_finite(c, "we_oracle");
  return sampling_oracle(
      b.rows(), samples, seed,
      [&](const CVector& x) {
        return std::hypot(std::abs(quad_form(b, x)), std::abs(quad_form(c, x)));
      },
      [&](CVector& x) { return detail::ascend_we(b, c, x, 150); });
}

}  // namespace opradius
