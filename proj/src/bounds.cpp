#include "opradius/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "opradius/matcore.hpp"
#include "opradius/matrix_io.hpp"
#include "opradius/radii.hpp"
#include "opradius/transforms.hpp"

namespace opradius {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

const std::vector<BoundInfo>& registry() {
  using K = BoundKind;
  using T = BoundTarget;
  using S = BoundSignature;
  static const std::vector<BoundInfo> table = {
      {BoundId::we_lower_21i, "we_lower_21i", K::Lower, T::We, S::BC,
       "w_e >= max{w(B), w(C)}"},
      {BoundId::we_lower_21ii, "we_lower_21ii", K::Lower, T::We, S::BC,
       "w_e >= w(B + e^{i th} C)/sqrt(2), best th on a 64-point grid"},
      {BoundId::we_lower_21iii, "we_lower_21iii", K::Lower, T::We, S::BC,
       "w_e^2 >= w(B^2 + e^{i th} C^2)/2 + |w^2(B) - w^2(C)|/2, best th"},
      {BoundId::we_lower_21iv, "we_lower_21iv", K::Lower, T::We, S::BC,
       "w_e^2 >= w(BC + CB)/2"},
      {BoundId::we_lower_th22, "we_lower_th22", K::Lower, T::We, S::BC,
       "w_e^2 >= w(B^2+C^2)/4 + (w^2(B)+w^2(C))/4 + |w^2(B)-w^2(C)|/2"},
      {BoundId::we_lower_dragomir, "we_lower_dragomir", K::Lower, T::We, S::BC,
       "w_e^2 >= w(B^2+C^2)/2 (baseline)"},
      {BoundId::we_lower_normal, "we_lower_normal", K::Lower, T::We, S::BC,
       "normal B,C: w_e^2 >= ||B^2+C^2||/4 + (||B||^2+||C||^2)/4 + | ||B||^2-||C||^2 |/2"},
      {BoundId::w_lower_cor25, "w_lower_cor25", K::Lower, T::W, S::T,
       "w^2 >= ||T*T+TT*||/8 + (||Re T||^2+||Im T||^2)/4 + | ||Re T||^2-||Im T||^2 |/2"},
      {BoundId::w_lower_cor27, "w_lower_cor27", K::Lower, T::W, S::T,
       "w^2 >= ||T*T+TT*||/8 + (||Re+Im||^2+||Re-Im||^2)/8 + | ||Re+Im||^2-||Re-Im||^2 |/4"},
      {BoundId::we_upper_th28, "we_upper_th28", K::Upper, T::We, S::BCt,
       "w_e <= ||t^2 B*B+(1-t)^2 C*C||^{1/2} + sqrt((w^2((1-t)B+tC)+w^2((1-t)B-tC))/2)"},
      {BoundId::we_upper_eq5, "we_upper_eq5", K::Upper, T::We, S::BC,
       "w_e <= ||B*B+C*C||^{1/2}/2 + sqrt(w^2(B+C)+w^2(B-C))/(2 sqrt(2))"},
      {BoundId::w_twosided_29i, "w_twosided_29i", K::TwoSided, T::W, S::T,
       "||T*T+TT*||/4 + alpha <= w^2 <= ||T*T+TT*||/4 + beta, alpha/beta from ||Re T||, ||Im T||"},
      {BoundId::w_twosided_29ii, "w_twosided_29ii", K::TwoSided, T::W, S::T,
       "||T*T+TT*||/4 + gamma <= w^2 <= ||T*T+TT*||/4 + delta, gamma/delta from ||Re+-Im||"},
      {BoundId::we_upper_integral_r, "we_upper_integral_r", K::Upper, T::We, S::BCr,
       "w_e^{2r} <= ||int_0^1 (t(B*B+C*C)+(1-t)(BB*+CC*))^r dt||"},
      {BoundId::w_upper_cor313, "w_upper_cor313", K::Upper, T::W, S::Tr,
       "w^2 <= ||int_0^1 (t T*T+(1-t) TT*)^r dt||^{1/r}"},
      {BoundId::w_lower_th214, "w_lower_th214", K::Lower, T::W, S::T,
       "w >= ||T||/4 + (||Re T||+||Im T||)/4 + | ||Re T||-||Im T|| |/2"},
      {BoundId::w_lower_laa21_29, "w_lower_laa21_29", K::Lower, T::W, S::T,
       "w^2 >= ||T*T+TT*||/4 + | ||Re T||^2-||Im T||^2 |/2 (baseline)"},
      {BoundId::w_lower_psk1_23, "w_lower_psk1_23", K::Lower, T::W, S::T,
       "w^2 >= ||T*T+TT*||/4 + | ||Re+Im||^2-||Re-Im||^2 |/4 (baseline)"},
      {BoundId::w_lower_hks, "w_lower_hks", K::Lower, T::W, S::T,
       "w >= ||T||/2 + | ||Re T||-||T||/2 |/4 + | ||Im T||-||T||/2 |/4 (baseline)"},
      {BoundId::w_lower_laa21_21, "w_lower_laa21_21", K::Lower, T::W, S::T,
       "w >= ||T||/2 + | ||Re T||-||Im T|| |/2 (baseline)"},
      {BoundId::w_sandwich_eqv, "w_sandwich_eqv", K::TwoSided, T::W, S::T,
       "||T||/2 <= w <= ||T|| (baseline)"},
      {BoundId::we_sandwich_eqn1, "we_sandwich_eqn1", K::TwoSided, T::We, S::BC,
       "||B*B+C*C||/8 <= w_e^2 <= ||B*B+C*C|| (baseline)"},
      {BoundId::offdiag_lower_31i, "offdiag_lower_31i", K::Lower, T::WOffdiag, S::XY,
       "w >= max{||X||,||Y||}/4 + (||X+Y*||/2+||X-Y*||/2)/4 + | ||X+Y*||/2-||X-Y*||/2 |/2"},
      {BoundId::offdiag_lower_31ii, "offdiag_lower_31ii", K::Lower, T::WOffdiag, S::XY,
       "w^2 >= max{||X*X+YY*||,||XX*+Y*Y||}/8 + quarter-norm terms of X+-Y*"},
      {BoundId::offdiag_lower_31iii, "offdiag_lower_31iii", K::Lower, T::WOffdiag, S::XY,
       "w^2 >= max{...}/8 + eighth-norm terms of (1-i)X+(1+i)Y* and (1+i)X+(1-i)Y*"},
      {BoundId::offdiag_upper_31iv, "offdiag_upper_31iv", K::Upper, T::WOffdiag, S::XY,
       "w^2 <= max{||X*X+YY*||,||XX*+Y*Y||}/4 + (||X+Y*||^2+||X-Y*||^2)/8"},
      {BoundId::offdiag_upper_31v, "offdiag_upper_31v", K::Upper, T::WOffdiag, S::XY,
       "w^2 <= max{...}/4 + (||(1-i)X+(1+i)Y*||^2+||(1+i)X+(1-i)Y*||^2)/16"},
      {BoundId::offdiag_upper_psk, "offdiag_upper_psk", K::Upper, T::WOffdiag, S::XY,
       "w^2 <= sqrt(min{beta, gamma}) with S=|X|^2+|Y*|^2, P=|X*|^2+|Y|^2"},
      {BoundId::offdiag_lower_pko27, "offdiag_lower_pko27", K::Lower, T::WOffdiag, S::XY,
       "w >= max{||X||,||Y||}/2 + | ||X+Y*||/2-||X-Y*||/2 |/2 (baseline)"},
      {BoundId::offdiag_lower_pko212, "offdiag_lower_pko212", K::Lower, T::WOffdiag, S::XY,
       "w^2 >= max{||X*X+YY*||,||XX*+Y*Y||}/4 + | ||X+Y*||^2-||X-Y*||^2 |/8 (baseline)"},
      {BoundId::w_upper_aluthge_t, "w_upper_aluthge_t", K::Upper, T::W, S::Tt,
       "w^2 <= ||P_t||^2/16 + w^2(At(T))/4 + w(At(T)P_t+P_t At(T))/8, P_t=|T|^{2(1-t)}+|T|^{2t}"},
      {BoundId::w_upper_aluthge_half, "w_upper_aluthge_half", K::Upper, T::W, S::T,
       "w^2 <= ||T||^2/4 + w^2(A(T))/4 + w(A(T)|T|+|T|A(T))/4"},
      {BoundId::w_upper_qt, "w_upper_qt", K::Upper, T::W, S::Tt,
       "w^2 <= ||Q_t||^2/12 + w(TQ_t+Q_tT)/6, Q_t=|T*|^{2(1-t)}+|T|^{2t} (solved fixed point)"},
  };
  return table;
}

struct EvalCtx {
  WCache* cache = nullptr;
  WCache local;
  double uncertainty = 0.0;

  WCache& store() { return cache ? *cache : local; }

  Enclosure enclosure(const CMatrix& m, double tol, const char* tag) {
    const std::string key = matrix_digest({&m}, {tol}) + tag;
    if (std::optional<Enclosure> hit = store().find(key)) return *hit;
    Enclosure e = numerical_radius(m, tol);
    store().insert(key, e);
    return e;
  }

  // Midpoint of the certified enclosure at the registry tolerance; the
  // half-width is accumulated into the reported uncertainty.
  double wmid(const CMatrix& m) {
    Enclosure e = enclosure(m, 1e-10 * scale_of(m), ":f");
    uncertainty += 0.5 * e.width();
    return e.mid();
  }

  // Coarse probe used only to pick the best grid angle.
  double wprobe(const CMatrix& m) { return enclosure(m, 1e-6 * scale_of(m), ":c").mid(); }
};

const CMatrix& need(const std::optional<CMatrix>& m, const char* which, std::string_view id) {
  if (!m)
    throw WrongInputShape("evaluate(" + std::string(id) + "): missing input " + which);
  return *m;
}

double need_param(const std::optional<double>& p, double lo, double hi, const char* which,
                  std::string_view id) {
  if (!p)
    throw WrongInputShape("evaluate(" + std::string(id) + "): missing parameter " + which);
  if (!(*p >= lo && *p <= hi))
    throw ParameterOutOfRange("evaluate(" + std::string(id) + "): " + which + " must be in [" +
                              std::to_string(lo) + "," + std::to_string(hi) + "]");
  return *p;
}

void put(Breakdown& b, std::string name, double v) { b.emplace_back(std::move(name), v); }

double sqrt0(double v) { return std::sqrt(std::max(v, 0.0)); }

struct CartesianNorms {
  CMatrix re, im;
  double n_re, n_im, n_gram;  // ||Re T||, ||Im T||, ||T*T+TT*||
};

CartesianNorms cartesian_norms(const CMatrix& t) {
  auto [re, im] = cartesian(t);
  CartesianNorms cn;
  cn.n_re = spectral_norm(re);
  cn.n_im = spectral_norm(im);
  cn.n_gram = spectral_norm(t.adjoint() * t + t * t.adjoint());
  cn.re = std::move(re);
  cn.im = std::move(im);
  return cn;
}

// Best angle of a 64-point grid under a coarse probe, ties to the smaller
// angle.
template <typename F>
double best_grid_angle(F&& probe_value) {
  const int grid = 64;
  double best = -std::numeric_limits<double>::infinity();
  double theta_star = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double theta = 2.0 * M_PI * j / grid;
    const double v = probe_value(theta);
    if (v > best) {
      best = v;
      theta_star = theta;
    }
  }
  return theta_star;
}

double quad_tol_for(double scale, double r) {
  return 1e-11 * std::pow(std::max(1.0, scale), r);
}

}  // namespace

const std::vector<BoundInfo>& list_bounds() { return registry(); }

const BoundInfo& bound_info(BoundId id) {
  for (const BoundInfo& info : registry())
    if (info.id == id) return info;
  throw InvalidSpec("bound_info: unknown id");
}

std::string_view to_string(BoundId id) { return bound_info(id).name; }

std::optional<BoundId> parse_bound_id(std::string_view name) {
  for (const BoundInfo& info : registry())
    if (info.name == name) return info.id;
  return std::nullopt;
}

double breakdown_get(const Breakdown& b, std::string_view name) {
  for (const auto& [k, v] : b)
    if (k == name) return v;
  throw InvalidSpec("breakdown_get: no entry named " + std::string(name));
}

bool breakdown_has(const Breakdown& b, std::string_view name) {
  for (const auto& [k, v] : b)
    if (k == name) return true;
  return false;
}

std::optional<Enclosure> WCache::find(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void WCache::insert(const std::string& key, Enclosure e) {
  std::unique_lock lock(mutex_);
  if (entries_.size() >= 60000) entries_.clear();  // memory cap; values never change
  entries_[key] = std::move(e);
}

std::size_t WCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

BoundResult evaluate(BoundId id, const BoundInputs& in, WCache* cache) {
  const BoundInfo& info = bound_info(id);
  EvalCtx ctx;
  ctx.cache = cache;

  BoundResult res;
  res.id = id;
  res.kind = info.kind;
  res.target = info.target;
  Breakdown& bd = res.breakdown;

  switch (id) {
    case BoundId::we_lower_21i: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      const double wb = ctx.wmid(b), wc = ctx.wmid(c);
      res.value = std::max(wb, wc);
      res.inputs_digest = matrix_digest({&b, &c});
      put(bd, "w_B", wb);
      put(bd, "w_C", wc);
      break;
    }
    case BoundId::we_lower_21ii: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      const double theta_star = best_grid_angle([&](double th) {
        return ctx.wprobe(b + std::polar(1.0, th) * c);
      });
      res.value = kInvSqrt2 * ctx.wmid(b + std::polar(1.0, theta_star) * c);
      res.inputs_digest = matrix_digest({&b, &c});
      put(bd, "theta_star", theta_star);
      break;
    }
    case BoundId::we_lower_21iii: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      const CMatrix b2 = b * b, c2 = c * c;
      const double wb = ctx.wmid(b), wc = ctx.wmid(c);
      const double spread = 0.5 * std::abs(wb * wb - wc * wc);
      const double theta_star = best_grid_angle([&](double th) {
        return ctx.wprobe(b2 + std::polar(1.0, th) * c2);
      });
      const double w_sum = ctx.wmid(b2 + std::polar(1.0, theta_star) * c2);
      res.value = sqrt0(0.5 * w_sum + spread);
      res.inputs_digest = matrix_digest({&b, &c});
      put(bd, "theta_star", theta_star);
      put(bd, "w_B", wb);
      put(bd, "w_C", wc);
      put(bd, "w_B2_thC2", w_sum);
      break;
    }
    case BoundId::we_lower_21iv: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      const double w_anti = ctx.wmid(b * c + c * b);
      res.value = sqrt0(0.5 * w_anti);
      res.inputs_digest = matrix_digest({&b, &c});
      put(bd, "w_BCCB", w_anti);
      break;
    }
    case BoundId::we_lower_th22: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      const double wb = ctx.wmid(b), wc = ctx.wmid(c);
      const double ws = ctx.wmid(b * b + c * c);
      res.value = sqrt0(0.25 * ws + 0.25 * (wb * wb + wc * wc) + 0.5 * std::abs(wb * wb - wc * wc));
      res.inputs_digest = matrix_digest({&b, &c});
      put(bd, "t1", std::max(wb * wb, 0.5 * ws));
      put(bd, "t2", std::max(wc * wc, 0.5 * ws));
      put(bd, "m1", std::abs(wb * wb - 0.5 * ws));
      put(bd, "m2", std::abs(wc * wc - 0.5 * ws));
      put(bd, "w_B", wb);
      put(bd, "w_C", wc);
      put(bd, "w_B2C2", ws);
      break;
    }
    case BoundId::we_lower_dragomir: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      const double ws = ctx.wmid(b * b + c * c);
      res.value = sqrt0(0.5 * ws);
      res.inputs_digest = matrix_digest({&b, &c});
      put(bd, "w_B2C2", ws);
      break;
    }
    case BoundId::we_lower_normal: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      for (const CMatrix* m : {&b, &c}) {
        const double nm = spectral_norm(*m);
        if (spectral_norm(*m * m->adjoint() - m->adjoint() * *m) > 1e-10 * nm * nm)
          throw NotApplicable("we_lower_normal: input is not normal");
      }
      const double nb = spectral_norm(b), nc = spectral_norm(c);
      const double ns = spectral_norm(b * b + c * c);
      const double s1 = std::max(nb * nb, 0.5 * ns);
      const double s2 = std::max(nc * nc, 0.5 * ns);
      const double p1 = std::abs(nb * nb - 0.5 * ns);
      const double p2 = std::abs(nc * nc - 0.5 * ns);
      res.value =
          sqrt0(0.25 * ns + 0.25 * (nb * nb + nc * nc) + 0.5 * std::abs(nb * nb - nc * nc));
      res.inputs_digest = matrix_digest({&b, &c});
      put(bd, "s1", s1);
      put(bd, "s2", s2);
      put(bd, "p1", p1);
      put(bd, "p2", p2);
      put(bd, "alt_value", sqrt0(0.5 * ns + 0.25 * (p1 + p2) + 0.5 * std::abs(s1 - s2)));
      break;
    }
    case BoundId::w_lower_cor25: {
      const CMatrix& t = need(in.T, "T", info.name);
      const CartesianNorms cn = cartesian_norms(t);
      const double re2 = cn.n_re * cn.n_re, im2 = cn.n_im * cn.n_im;
      res.value = sqrt0(0.125 * cn.n_gram + 0.25 * (re2 + im2) + 0.5 * std::abs(re2 - im2));
      res.inputs_digest = matrix_digest({&t});
      put(bd, "alpha", std::abs(re2 - 0.25 * cn.n_gram));
      put(bd, "beta", std::abs(im2 - 0.25 * cn.n_gram));
      put(bd, "gamma", std::max(re2, 0.25 * cn.n_gram));
      put(bd, "delta", std::max(im2, 0.25 * cn.n_gram));
      break;
    }
    case BoundId::w_lower_cor27: {
      const CMatrix& t = need(in.T, "T", info.name);
      const CartesianNorms cn = cartesian_norms(t);
      const double np = spectral_norm(cn.re + cn.im), nm = spectral_norm(cn.re - cn.im);
      const double p2 = np * np, m2 = nm * nm;
      const double beta = std::abs(p2 - m2);
      res.value = sqrt0(0.125 * cn.n_gram + 0.125 * (p2 + m2) + 0.25 * beta);
      res.inputs_digest = matrix_digest({&t});
      put(bd, "gamma", std::abs(0.5 * p2 - 0.25 * cn.n_gram));
      put(bd, "delta", std::abs(0.5 * m2 - 0.25 * cn.n_gram));
      put(bd, "xi", std::max(0.5 * p2, 0.25 * cn.n_gram));
      put(bd, "eta", std::max(0.5 * m2, 0.25 * cn.n_gram));
      put(bd, "beta", beta);
      break;
    }
    case BoundId::we_upper_th28: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      const double t = need_param(in.t, 0.0, 1.0, "t", info.name);
      const double norm_term =
          std::sqrt(spectral_norm(t * t * (b.adjoint() * b) + (1 - t) * (1 - t) * (c.adjoint() * c)));
      const double wp = ctx.wmid((1 - t) * b + t * c);
      const double wm = ctx.wmid((1 - t) * b - t * c);
      res.value = norm_term + kInvSqrt2 * std::sqrt(wp * wp + wm * wm);
      res.inputs_digest = matrix_digest({&b, &c}, {t});
      put(bd, "norm_term", norm_term);
      put(bd, "w_plus", wp);
      put(bd, "w_minus", wm);
      put(bd, "t", t);
      break;
    }
    case BoundId::we_upper_eq5: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      const double norm_term = std::sqrt(spectral_norm(b.adjoint() * b + c.adjoint() * c));
      const double wp = ctx.wmid(b + c);
      const double wm = ctx.wmid(b - c);
      res.value = 0.5 * norm_term + 0.5 * kInvSqrt2 * std::sqrt(wp * wp + wm * wm);
      res.inputs_digest = matrix_digest({&b, &c});
      put(bd, "norm_term", norm_term);
      put(bd, "w_plus", wp);
      put(bd, "w_minus", wm);
      break;
    }
    case BoundId::w_twosided_29i: {
      const CMatrix& t = need(in.T, "T", info.name);
      const CartesianNorms cn = cartesian_norms(t);
      const double re2 = cn.n_re * cn.n_re, im2 = cn.n_im * cn.n_im;
      const double alpha = 0.5 * std::abs(re2 - im2);
      const double beta = 0.5 * (re2 + im2);
      res.value = sqrt0(0.25 * cn.n_gram + alpha);
      res.upper_value = sqrt0(0.25 * cn.n_gram + beta);
      res.inputs_digest = matrix_digest({&t});
      put(bd, "alpha", alpha);
      put(bd, "beta", beta);
      break;
    }
    case BoundId::w_twosided_29ii: {
      const CMatrix& t = need(in.T, "T", info.name);
      const CartesianNorms cn = cartesian_norms(t);
      const double np = spectral_norm(cn.re + cn.im), nm = spectral_norm(cn.re - cn.im);
      const double gamma = 0.25 * std::abs(np * np - nm * nm);
      const double delta = 0.25 * (np * np + nm * nm);
      res.value = sqrt0(0.25 * cn.n_gram + gamma);
      res.upper_value = sqrt0(0.25 * cn.n_gram + delta);
      res.inputs_digest = matrix_digest({&t});
      put(bd, "gamma", gamma);
      put(bd, "delta", delta);
      break;
    }
    case BoundId::we_upper_integral_r: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      const double r = need_param(in.r, 1.0, 2.0, "r", info.name);
      const CMatrix g1 = b.adjoint() * b + c.adjoint() * c;
      const CMatrix g2 = b * b.adjoint() + c * c.adjoint();
      const double scale = std::max(spectral_norm(g1), spectral_norm(g2));
      const CMatrix integral = segment_power_integral(g1, g2, r, quad_tol_for(scale, r));
      const double integral_norm = spectral_norm(integral);
      const ScalarFunctionSpec f = ScalarFunctionSpec::power(r);
      const double relax2r = 0.5 * spectral_norm(psd_function(g1, f) + psd_function(g2, f));
      res.value = std::pow(integral_norm, 1.0 / (2.0 * r));
      res.inputs_digest = matrix_digest({&b, &c}, {r});
      put(bd, "integral_norm", integral_norm);
      put(bd, "relaxation", std::pow(relax2r, 1.0 / (2.0 * r)));
      put(bd, "r", r);
      break;
    }
    case BoundId::w_upper_cor313: {
      const CMatrix& t = need(in.T, "T", info.name);
      const double r = need_param(in.r, 1.0, 2.0, "r", info.name);
      const CMatrix g1 = t.adjoint() * t;
      const CMatrix g2 = t * t.adjoint();
      const double scale = spectral_norm(g1);
      const CMatrix integral = segment_power_integral(g1, g2, r, quad_tol_for(scale, r));
      const double integral_norm = spectral_norm(integral);
      const double w2_bound = std::pow(integral_norm, 1.0 / r);
      const ScalarFunctionSpec f = ScalarFunctionSpec::power(r);
      const double relax_w2 =
          std::pow(spectral_norm(0.5 * (psd_function(g1, f) + psd_function(g2, f))), 1.0 / r);
      res.value = std::sqrt(w2_bound);
      res.inputs_digest = matrix_digest({&t}, {r});
      put(bd, "integral_norm", integral_norm);
      put(bd, "w2_bound", w2_bound);
      put(bd, "relaxation_w2", relax_w2);
      put(bd, "relaxation", std::sqrt(relax_w2));
      put(bd, "r", r);
      break;
    }
    case BoundId::w_lower_th214: {
      const CMatrix& t = need(in.T, "T", info.name);
      const double norm_t = spectral_norm(t);
      const CartesianNorms cn = cartesian_norms(t);
      res.value = 0.25 * norm_t + 0.25 * (cn.n_re + cn.n_im) + 0.5 * std::abs(cn.n_re - cn.n_im);
      res.inputs_digest = matrix_digest({&t});
      put(bd, "q1", std::max(cn.n_re, 0.5 * norm_t));
      put(bd, "q2", std::max(cn.n_im, 0.5 * norm_t));
      put(bd, "r1", std::abs(cn.n_re - 0.5 * norm_t));
      put(bd, "r2", std::abs(cn.n_im - 0.5 * norm_t));
      break;
    }
    case BoundId::w_lower_laa21_29: {
      const CMatrix& t = need(in.T, "T", info.name);
      const CartesianNorms cn = cartesian_norms(t);
      res.value =
          sqrt0(0.25 * cn.n_gram + 0.5 * std::abs(cn.n_re * cn.n_re - cn.n_im * cn.n_im));
      res.inputs_digest = matrix_digest({&t});
      break;
    }
    case BoundId::w_lower_psk1_23: {
      const CMatrix& t = need(in.T, "T", info.name);
      const CartesianNorms cn = cartesian_norms(t);
      const double np = spectral_norm(cn.re + cn.im), nm = spectral_norm(cn.re - cn.im);
      res.value = sqrt0(0.25 * cn.n_gram + 0.25 * std::abs(np * np - nm * nm));
      res.inputs_digest = matrix_digest({&t});
      break;
    }
    case BoundId::w_lower_hks: {
      const CMatrix& t = need(in.T, "T", info.name);
      const double norm_t = spectral_norm(t);
      const CartesianNorms cn = cartesian_norms(t);
      res.value = 0.5 * norm_t + 0.25 * std::abs(cn.n_re - 0.5 * norm_t) +
                  0.25 * std::abs(cn.n_im - 0.5 * norm_t);
      res.inputs_digest = matrix_digest({&t});
      break;
    }
    case BoundId::w_lower_laa21_21: {
      const CMatrix& t = need(in.T, "T", info.name);
      const double norm_t = spectral_norm(t);
      const CartesianNorms cn = cartesian_norms(t);
      res.value = 0.5 * norm_t + 0.5 * std::abs(cn.n_re - cn.n_im);
      res.inputs_digest = matrix_digest({&t});
      break;
    }
    case BoundId::w_sandwich_eqv: {
      const CMatrix& t = need(in.T, "T", info.name);
      const double norm_t = spectral_norm(t);
      res.value = 0.5 * norm_t;
      res.upper_value = norm_t;
      res.inputs_digest = matrix_digest({&t});
      put(bd, "norm_T", norm_t);
      break;
    }
    case BoundId::we_sandwich_eqn1: {
      const CMatrix& b = need(in.B, "B", info.name);
      const CMatrix& c = need(in.C, "C", info.name);
      require_same_dim(b, c, "evaluate");
      const double ng = spectral_norm(b.adjoint() * b + c.adjoint() * c);
      res.value = sqrt0(0.125 * ng);
      res.upper_value = sqrt0(ng);
      res.inputs_digest = matrix_digest({&b, &c});
      put(bd, "norm_gram", ng);
      break;
    }
    case BoundId::offdiag_lower_31i: {
      const CMatrix& x = need(in.X, "X", info.name);
      const CMatrix& y = need(in.Y, "Y", info.name);
      require_same_dim(x, y, "evaluate");
      const double a = 0.5 * spectral_norm(x + y.adjoint());
      const double b = 0.5 * spectral_norm(x - y.adjoint());
      res.value = 0.25 * std::max(spectral_norm(x), spectral_norm(y)) + 0.25 * (a + b) +
                  0.5 * std::abs(a - b);
      res.inputs_digest = matrix_digest({&x, &y});
      put(bd, "half_sum", a);
      put(bd, "half_diff", b);
      break;
    }
    case BoundId::offdiag_lower_31ii:
    case BoundId::offdiag_upper_31iv:
    case BoundId::offdiag_lower_pko212: {
      const CMatrix& x = need(in.X, "X", info.name);
      const CMatrix& y = need(in.Y, "Y", info.name);
      require_same_dim(x, y, "evaluate");
      const double g1 = spectral_norm(x.adjoint() * x + y * y.adjoint());
      const double g2 = spectral_norm(x * x.adjoint() + y.adjoint() * y);
      const double a2 = 0.25 * std::pow(spectral_norm(x + y.adjoint()), 2);
      const double b2 = 0.25 * std::pow(spectral_norm(x - y.adjoint()), 2);
      double rhs = 0.0;
      if (id == BoundId::offdiag_lower_31ii)
        rhs = 0.125 * std::max(g1, g2) + 0.25 * (a2 + b2) + 0.5 * std::abs(a2 - b2);
      else if (id == BoundId::offdiag_upper_31iv)
        rhs = 0.25 * std::max(g1, g2) + 0.5 * (a2 + b2);
      else
        rhs = 0.25 * std::max(g1, g2) + 0.5 * std::abs(a2 - b2);
      res.value = sqrt0(rhs);
      res.inputs_digest = matrix_digest({&x, &y});
      put(bd, "quarter_sum_sq", a2);
      put(bd, "quarter_diff_sq", b2);
      break;
    }
    case BoundId::offdiag_lower_31iii:
    case BoundId::offdiag_upper_31v: {
      const CMatrix& x = need(in.X, "X", info.name);
      const CMatrix& y = need(in.Y, "Y", info.name);
      require_same_dim(x, y, "evaluate");
      const double g1 = spectral_norm(x.adjoint() * x + y * y.adjoint());
      const double g2 = spectral_norm(x * x.adjoint() + y.adjoint() * y);
      const Complex one_minus_i(1.0, -1.0), one_plus_i(1.0, 1.0);
      const double c2 =
          0.25 * std::pow(spectral_norm(one_minus_i * x + one_plus_i * y.adjoint()), 2);
      const double d2 =
          0.25 * std::pow(spectral_norm(one_plus_i * x + one_minus_i * y.adjoint()), 2);
      double rhs = 0.0;
      if (id == BoundId::offdiag_lower_31iii)
        rhs = 0.125 * std::max(g1, g2) + 0.125 * (c2 + d2) + 0.25 * std::abs(c2 - d2);
      else
        rhs = 0.25 * std::max(g1, g2) + 0.25 * (c2 + d2);
      res.value = sqrt0(rhs);
      res.inputs_digest = matrix_digest({&x, &y});
      put(bd, "rot_sum_sq", c2);
      put(bd, "rot_diff_sq", d2);
      break;
    }
    case BoundId::offdiag_upper_psk: {
      const CMatrix& x = need(in.X, "X", info.name);
      const CMatrix& y = need(in.Y, "Y", info.name);
      require_same_dim(x, y, "evaluate");
      const CMatrix s = x.adjoint() * x + y * y.adjoint();  // |X|^2 + |Y*|^2
      const CMatrix p = x * x.adjoint() + y.adjoint() * y;  // |X*|^2 + |Y|^2
      const CMatrix yx = y * x, xy = x * y;
      const double ns = spectral_norm(s), np = spectral_norm(p);
      const double w_yx = ctx.wmid(yx), w_xy = ctx.wmid(xy);
      const double w_yxs = ctx.wmid(yx * s + s * yx);
      const double w_xyp = ctx.wmid(xy * p + p * xy);
      const double beta = ns * ns / 16.0 + 0.25 * w_yx * w_yx + 0.125 * w_yxs;
      const double gamma = np * np / 16.0 + 0.25 * w_xy * w_xy + 0.125 * w_xyp;
      res.value = std::pow(std::max(std::min(beta, gamma), 0.0), 0.25);
      res.inputs_digest = matrix_digest({&x, &y});
      put(bd, "S", ns);
      put(bd, "P", np);
      put(bd, "beta", beta);
      put(bd, "gamma", gamma);
      put(bd, "w_YX", w_yx);
      put(bd, "w_XY", w_xy);
      break;
    }
    case BoundId::offdiag_lower_pko27: {
      const CMatrix& x = need(in.X, "X", info.name);
      const CMatrix& y = need(in.Y, "Y", info.name);
      require_same_dim(x, y, "evaluate");
      const double a = 0.5 * spectral_norm(x + y.adjoint());
      const double b = 0.5 * spectral_norm(x - y.adjoint());
      res.value = 0.5 * std::max(spectral_norm(x), spectral_norm(y)) + 0.5 * std::abs(a - b);
      res.inputs_digest = matrix_digest({&x, &y});
      put(bd, "half_sum", a);
      put(bd, "half_diff", b);
      break;
    }
    case BoundId::w_upper_aluthge_t: {
      const CMatrix& t = need(in.T, "T", info.name);
      const double tp = need_param(in.t, 0.0, 1.0, "t", info.name);
      const CMatrix abs_t = abs_operator(t);
      const CMatrix p_t = psd_function(abs_t, ScalarFunctionSpec::power(2.0 * (1.0 - tp))) +
                          psd_function(abs_t, ScalarFunctionSpec::power(2.0 * tp));
      const CMatrix alu = aluthge_t(t, tp);
      const double np = spectral_norm(p_t);
      const double wa = ctx.wmid(alu);
      const double cross = ctx.wmid(alu * p_t + p_t * alu);
      res.value = sqrt0(np * np / 16.0 + 0.25 * wa * wa + 0.125 * cross);
      res.inputs_digest = matrix_digest({&t}, {tp});
      put(bd, "P_t", np);
      put(bd, "w_aluthge", wa);
      put(bd, "w_cross", cross);
      put(bd, "relaxation", 0.25 * np + 0.5 * wa);
      put(bd, "t", tp);
      break;
    }
    case BoundId::w_upper_aluthge_half: {
      const CMatrix& t = need(in.T, "T", info.name);
      const double norm_t = spectral_norm(t);
      const CMatrix abs_t = abs_operator(t);
      const CMatrix alu = aluthge_t(t, 0.5);
      const double wa = ctx.wmid(alu);
      const double cross = ctx.wmid(alu * abs_t + abs_t * alu);
      res.value = sqrt0(0.25 * norm_t * norm_t + 0.25 * wa * wa + 0.25 * cross);
      res.inputs_digest = matrix_digest({&t});
      put(bd, "w_aluthge", wa);
      put(bd, "w_cross", cross);
      put(bd, "relaxation", 0.5 * norm_t + 0.5 * wa);
      break;
    }
    case BoundId::w_upper_qt: {
      const CMatrix& t = need(in.T, "T", info.name);
      const double tp = need_param(in.t, 0.0, 1.0, "t", info.name);
      const CMatrix abs_t = abs_operator(t);
      const CMatrix abs_tadj = abs_operator(t.adjoint());
      const CMatrix q_t = psd_function(abs_tadj, ScalarFunctionSpec::power(2.0 * (1.0 - tp))) +
                          psd_function(abs_t, ScalarFunctionSpec::power(2.0 * tp));
      const double nq = spectral_norm(q_t);
      const double cross = ctx.wmid(t * q_t + q_t * t);
      // w^2 <= ||Q_t||^2/16 + w^2/4 + cross/8, solved for w.
      res.value = sqrt0(nq * nq / 12.0 + cross / 6.0);
      const double w_t = ctx.wmid(t);
      const double predicate_rhs = sqrt0(nq * nq / 16.0 + 0.25 * w_t * w_t + 0.125 * cross);
      res.inputs_digest = matrix_digest({&t}, {tp});
      put(bd, "Q_t", nq);
      put(bd, "w_cross", cross);
      put(bd, "w_T", w_t);
      put(bd, "predicate_rhs", predicate_rhs);
      put(bd, "predicate_slack", predicate_rhs - w_t);
      put(bd, "half_qt", 0.5 * nq);
      put(bd, "t", tp);
      break;
    }
  }

  put(bd, "w_uncertainty", ctx.uncertainty);
  if (!std::isfinite(res.value) || res.value < 0.0)
    throw Error("evaluate(" + std::string(info.name) + "): non-finite bound value");
  return res;
}

}  // namespace opradius
