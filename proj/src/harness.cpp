#include "opradius/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "opradius/matcore.hpp"
#include "opradius/matrix_io.hpp"
#include "opradius/radii.hpp"
#include "opradius/rng.hpp"
#include "opradius/transforms.hpp"

namespace opradius {

namespace {

using detail::Rng;
using detail::mix_seed;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kEnsembleNames[] = {
    "ginibre",  "hermitian",      "normal",   "unitary",
    "nilpotent_shift", "rank_deficient", "diagonal", "scaled",
};

CMatrix ginibre(Rng& rng, int n) {
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.cgaussian();
  return a;
}

CMatrix haar_unitary(Rng& rng, int n) {
  CMatrix g = ginibre(rng, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  CVector phase(n);
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    phase(i) = std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0, 0.0);
  }
  return q * phase.asDiagonal();
}

CMatrix generate_kind(EnsembleKind kind, const EnsembleSpec& spec, Rng& rng) {
  const int n = spec.dim;
  switch (kind) {
    case EnsembleKind::Ginibre:
      return ginibre(rng, n);
    case EnsembleKind::Hermitian: {
      CMatrix g = ginibre(rng, n);
      return 0.5 * (g + g.adjoint());
    }
    case EnsembleKind::Normal: {
      CMatrix u = haar_unitary(rng, n);
      CVector d(n);
      for (int i = 0; i < n; ++i) d(i) = rng.cgaussian();
      return u * d.asDiagonal() * u.adjoint();
    }
    case EnsembleKind::Unitary:
      return haar_unitary(rng, n);
    case EnsembleKind::NilpotentShift: {
      CMatrix s = CMatrix::Zero(n, n);
      for (int i = 0; i + 1 < n; ++i) s(i, i + 1) = 1.0;
      return s;
    }
    case EnsembleKind::RankDeficient: {
      const int k = spec.rank >= 0 ? spec.rank : spec.dim / 2;
      CMatrix left(n, std::max(k, 1)), right(n, std::max(k, 1));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < std::max(k, 1); ++j) {
          left(i, j) = rng.cgaussian();
          right(i, j) = rng.cgaussian();
        }
      if (k == 0) return CMatrix::Zero(n, n);
      return left.leftCols(k) * right.leftCols(k).adjoint();
    }
    case EnsembleKind::Diagonal: {
      CVector d(n);
      for (int i = 0; i < n; ++i) d(i) = rng.cgaussian();
      return CMatrix(d.asDiagonal());
    }
    case EnsembleKind::Scaled: {
      CMatrix base = generate_kind(spec.base, spec, rng);
      return spec.scalar * base;
    }
  }
  throw InvalidSpec("generate: unknown ensemble kind");
}

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= v.size()) return v.back();
  return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

struct PropertyFlags {
  bool soundness = false;
  bool refinements = false;
  bool chain_xy = false;
  bool th212 = false;
  bool lemma_cauchy_schwarz = false;
  bool lemma_jensen = false;
  bool hermite_hadamard = false;
  bool qt_predicate = false;
  bool equality_conditions = false;

  bool any() const {
    return soundness || refinements || chain_xy || th212 || lemma_cauchy_schwarz ||
           lemma_jensen || hermite_hadamard || qt_predicate || equality_conditions;
  }
};

PropertyFlags parse_properties(const std::vector<std::string>& names) {
  PropertyFlags f;
  for (const std::string& name : names) {
    if (name == "all") {
      f.soundness = f.refinements = f.chain_xy = f.th212 = f.lemma_cauchy_schwarz =
          f.lemma_jensen = f.hermite_hadamard = f.qt_predicate = f.equality_conditions = true;
    } else if (name == "soundness") {
      f.soundness = true;
    } else if (name == "refinements") {
      f.refinements = true;
    } else if (name == "chain_xy") {
      f.chain_xy = true;
    } else if (name == "th212") {
      f.th212 = true;
    } else if (name == "lemma_cauchy_schwarz") {
      f.lemma_cauchy_schwarz = true;
    } else if (name == "lemma_jensen") {
      f.lemma_jensen = true;
    } else if (name == "hermite_hadamard") {
      f.hermite_hadamard = true;
    } else if (name == "qt_predicate") {
      f.qt_predicate = true;
    } else if (name == "equality_conditions") {
      f.equality_conditions = true;
    } else {
      throw InvalidSpec("run_campaign: unknown property \"" + name + "\"");
    }
  }
  return f;
}

const BoundResult* find_bound(const std::vector<BoundResult>& rows, BoundId id) {
  for (const BoundResult& r : rows)
    if (r.id == id) return &r;
  return nullptr;
}

Enclosure cached_w(WCache* cache, const CMatrix& m, double tol) {
  if (!cache) return numerical_radius(m, tol);
  const std::string key = matrix_digest({&m}, {tol}) + ":w";
  if (std::optional<Enclosure> hit = cache->find(key)) return *hit;
  Enclosure e = numerical_radius(m, tol);
  cache->insert(key, e);
  return e;
}

Enclosure cached_we(WCache* cache, const CMatrix& b, const CMatrix& c, double tol) {
  if (!cache) return euclidean_radius(b, c, tol);
  const std::string key = matrix_digest({&b, &c}, {tol}) + ":we";
  if (std::optional<Enclosure> hit = cache->find(key)) return *hit;
  Enclosure e = euclidean_radius(b, c, tol);
  cache->insert(key, e);
  return e;
}

// One campaign trial. Violations are gated by combined numerical
// uncertainty; raw near-misses become warnings.
TrialRecord run_trial(const EnsembleSpec& spec, int trial, const PropertyFlags& flags,
                      WCache& cache) {
  TrialRecord rec;
  rec.ensemble = std::string(to_string(spec.kind));
  rec.dim = spec.dim;
  rec.trial = trial;

  Rng param_rng(mix_seed(spec.seed, static_cast<std::uint64_t>(trial), 1000));
  rec.t_param = param_rng.uniform01();
  rec.r_param = 1.0 + param_rng.uniform01();

  const CMatrix t = generate(spec, trial, 0);
  const CMatrix b = generate(spec, trial, 1);
  const CMatrix c = generate(spec, trial, 2);
  const CMatrix x = generate(spec, trial, 3);
  const CMatrix y = generate(spec, trial, 4);
  const CMatrix t_off = offdiag_block(x, y);

  rec.w_ref = cached_w(&cache, t, 1e-8 * scale_of(t));
  rec.we_ref = cached_we(&cache, b, c, 1e-5 * std::max(scale_of(b), scale_of(c)));
  rec.woff_ref = cached_w(&cache, t_off, 1e-8 * scale_of(t_off));

  BoundInputs in_t, in_bc, in_xy;
  in_t.T = t;
  in_t.t = rec.t_param;
  in_t.r = rec.r_param;
  in_bc.B = b;
  in_bc.C = c;
  in_bc.t = rec.t_param;
  in_bc.r = rec.r_param;
  in_xy.X = x;
  in_xy.Y = y;

  for (const BoundInfo& info : list_bounds()) {
    const BoundInputs* in = nullptr;
    switch (info.signature) {
      case BoundSignature::T:
      case BoundSignature::Tt:
      case BoundSignature::Tr:
        in = &in_t;
        break;
      case BoundSignature::BC:
      case BoundSignature::BCt:
      case BoundSignature::BCr:
        in = &in_bc;
        break;
      case BoundSignature::XY:
        in = &in_xy;
        break;
    }
    try {
      rec.bounds.push_back(evaluate(info.id, *in, &cache));
    } catch (const NotApplicable&) {
      // e.g. we_lower_normal on a non-normal ensemble
    }
  }

  auto ref_for = [&](BoundTarget target) -> const Enclosure& {
    switch (target) {
      case BoundTarget::W:
        return rec.w_ref;
      case BoundTarget::We:
        return rec.we_ref;
      default:
        return rec.woff_ref;
    }
  };

  auto flag = [&](bool violated, bool near_miss, std::string property, double magnitude) {
    if (violated)
      rec.violations.push_back({std::move(property), magnitude});
    else if (near_miss)
      rec.warnings.push_back({std::move(property), magnitude});
  };

  if (flags.soundness) {
    for (const BoundResult& row : rec.bounds) {
      const Enclosure& ref = ref_for(row.target);
      const double scale = std::max(1.0, ref.upper);
      const double unc = breakdown_get(row.breakdown, "w_uncertainty") + 1e-10 * scale;
      const double eps = std::max(1e-7 * scale, unc);
      const std::string name = std::string(to_string(row.id));
      if (row.kind == BoundKind::Lower || row.kind == BoundKind::TwoSided) {
        const double excess = row.value - ref.upper;
        flag(excess > eps, excess > unc, "soundness:" + name + ":lower", excess);
      }
      if (row.kind == BoundKind::Upper) {
        const double deficit = ref.lower - row.value;
        flag(deficit > eps, deficit > unc, "soundness:" + name + ":upper", deficit);
      }
      if (row.kind == BoundKind::TwoSided) {
        const double deficit = ref.lower - *row.upper_value;
        flag(deficit > eps, deficit > unc, "soundness:" + name + ":upper", deficit);
      }
    }
  }

  if (flags.refinements) {
    // (stronger id, weaker id): stronger lower bound dominates the baseline.
    static constexpr std::pair<BoundId, BoundId> orderings[] = {
        {BoundId::we_lower_th22, BoundId::we_lower_dragomir},
        {BoundId::w_lower_cor25, BoundId::w_lower_laa21_29},
        {BoundId::w_lower_cor27, BoundId::w_lower_psk1_23},
        {BoundId::w_lower_th214, BoundId::w_lower_hks},
        {BoundId::w_lower_th214, BoundId::w_lower_laa21_21},
        {BoundId::offdiag_lower_31i, BoundId::offdiag_lower_pko27},
        {BoundId::offdiag_lower_31ii, BoundId::offdiag_lower_pko212},
    };
    for (const auto& [strong_id, weak_id] : orderings) {
      const BoundResult* strong = find_bound(rec.bounds, strong_id);
      const BoundResult* weak = find_bound(rec.bounds, weak_id);
      if (!strong || !weak) continue;
      const double scale = std::max(1.0, ref_for(strong->target).upper);
      const double unc = breakdown_get(strong->breakdown, "w_uncertainty") +
                         breakdown_get(weak->breakdown, "w_uncertainty") + 1e-10 * scale;
      const double gap = weak->value - strong->value;
      flag(gap > std::max(1e-9 * scale, unc), gap > unc,
           "refinement:" + std::string(to_string(strong_id)) + ">=" +
               std::string(to_string(weak_id)),
           gap);
    }
    // Tight bound <= its closed-form relaxation.
    for (BoundId id : {BoundId::w_upper_aluthge_t, BoundId::w_upper_aluthge_half}) {
      const BoundResult* row = find_bound(rec.bounds, id);
      if (!row) continue;
      const double scale = std::max(1.0, ref_for(row->target).upper);
      const double unc = breakdown_get(row->breakdown, "w_uncertainty") + 1e-10 * scale;
      const double gap = row->value - breakdown_get(row->breakdown, "relaxation");
      flag(gap > std::max(1e-9 * scale, unc), gap > unc,
           "refinement:" + std::string(to_string(id)) + "<=relaxation", gap);
    }
    // Cor 3.13 chain: integral bound below its endpoint relaxation.
    if (const BoundResult* row = find_bound(rec.bounds, BoundId::w_upper_cor313)) {
      const double w2 = breakdown_get(row->breakdown, "w2_bound");
      const double relax = breakdown_get(row->breakdown, "relaxation_w2");
      const double scale = std::max(1.0, relax);
      const double gap = w2 - relax;
      flag(gap > 1e-8 * scale, gap > 1e-10 * scale, "refinement:cor313_chain", gap);
    }
  }

  if (flags.chain_xy) {
    Enclosure w_xy = cached_w(&cache, x * y, 1e-8 * scale_of(x * y));
    const double rhs = rec.woff_ref.upper * rec.woff_ref.upper;
    const double scale = std::max(1.0, rhs);
    const double gap = w_xy.lower - rhs;
    flag(gap > 1e-7 * scale, gap > 1e-12 * scale, "chain_xy", gap);
  }

  if (flags.th212) {
    const double r = rec.r_param;
    const CMatrix g1 = b.adjoint() * b + c.adjoint() * c;
    const CMatrix g2 = b * b.adjoint() + c * c.adjoint();
    const double gscale = std::max({1.0, spectral_norm(g1), spectral_norm(g2)});
    const CMatrix integral = segment_power_integral(g1, g2, r, 1e-11 * std::pow(gscale, r));
    const double mid = spectral_norm(integral);
    const ScalarFunctionSpec f = ScalarFunctionSpec::power(r);
    const double rhs = 0.5 * spectral_norm(psd_function(g1, f) + psd_function(g2, f));
    const double lhs = std::pow(rec.we_ref.lower * rec.we_ref.lower, r);
    const double scale = std::max(1.0, rhs);
    flag(lhs - mid > 1e-7 * scale, lhs - mid > 1e-12 * scale, "th212:first", lhs - mid);
    flag(mid - rhs > 1e-7 * scale, mid - rhs > 1e-10 * scale, "th212:second", mid - rhs);
  }

  if (flags.lemma_cauchy_schwarz) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(trial), 2000));
    const CVector lx = rng.unit_vector(t.rows());
    const CVector ly = rng.unit_vector(t.rows());
    const double alpha = rng.uniform01();
    const CMatrix abs_t = abs_operator(t);
    const CMatrix abs_tadj = abs_operator(t.adjoint());
    const CMatrix pa = psd_function(abs_t, ScalarFunctionSpec::power(2.0 * alpha));
    const CMatrix pb = psd_function(abs_tadj, ScalarFunctionSpec::power(2.0 * (1.0 - alpha)));
    const double lhs = std::norm(ly.dot(t * lx));
    const double rhs = (lx.dot(pa * lx)).real() * (ly.dot(pb * ly)).real();
    const double scale = std::max(1.0, spectral_norm(t));
    const double gap = lhs - rhs;
    flag(gap > 1e-10 * scale * scale, gap > 1e-13 * scale * scale, "lemma_cauchy_schwarz", gap);
  }

  if (flags.lemma_jensen) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(trial), 3000));
    const CVector lx = rng.unit_vector(t.rows());
    const CMatrix h = t.adjoint() * t;
    const ScalarFunctionSpec f = ScalarFunctionSpec::power(rec.r_param);
    const double lhs = f((lx.dot(h * lx)).real());
    const double rhs = (lx.dot(psd_function(h, f) * lx)).real();
    const double scale = std::pow(std::max(1.0, spectral_norm(h)), rec.r_param);
    const double gap = lhs - rhs;
    flag(gap > 1e-10 * scale, gap > 1e-13 * scale, "lemma_jensen", gap);
  }

  if (flags.hermite_hadamard) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(trial), 4000));
    const double a = 3.0 * rng.uniform01();
    const double bb = 3.0 * rng.uniform01();
    const double r = 1.0 + rng.uniform01();
    const ScalarFunctionSpec f = ScalarFunctionSpec::power(r);
    CMatrix ma(1, 1), mb(1, 1);
    ma(0, 0) = a;
    mb(0, 0) = bb;
    const double integral = segment_power_integral(ma, mb, r, 1e-12)(0, 0).real();
    const double left = f(0.5 * (a + bb));
    const double right = 0.5 * (f(a) + f(bb));
    flag(left - integral > 1e-10, left - integral > 1e-13, "hermite_hadamard:left",
         left - integral);
    flag(integral - right > 1e-10, integral - right > 1e-13, "hermite_hadamard:right",
         integral - right);
  }

  if (flags.qt_predicate) {
    if (const BoundResult* row = find_bound(rec.bounds, BoundId::w_upper_qt)) {
      const double rhs = breakdown_get(row->breakdown, "predicate_rhs");
      const double scale = std::max(1.0, rec.w_ref.upper);
      const double unc = breakdown_get(row->breakdown, "w_uncertainty") + 1e-10 * scale;
      const double gap = rec.w_ref.lower - rhs;
      flag(gap > std::max(1e-7 * scale, unc), gap > unc, "qt_predicate", gap);
    }
  }

  if (flags.equality_conditions) {
    auto consume = [&](const std::vector<EqualityCheck>& checks) {
      for (const EqualityCheck& ec : checks)
        flag(!ec.holds, false, "equality:" + ec.condition,
             ec.consequent_residual);
    };
    consume(check_equality_conditions(t, &cache));
    consume(check_equality_conditions(b, c, &cache));
  }

  return rec;
}

}  // namespace

std::string_view to_string(EnsembleKind k) { return kEnsembleNames[static_cast<int>(k)]; }

std::optional<EnsembleKind> parse_ensemble_kind(std::string_view name) {
  for (int i = 0; i < 8; ++i)
    if (kEnsembleNames[i] == name) return static_cast<EnsembleKind>(i);
  return std::nullopt;
}

void EnsembleSpec::validate() const {
  if (dim < 1) throw InvalidSpec("EnsembleSpec: dim must be >= 1");
  if (trials < 1) throw InvalidSpec("EnsembleSpec: trials must be >= 1");
  if (kind == EnsembleKind::RankDeficient && rank >= 0 && rank > dim)
    throw InvalidSpec("EnsembleSpec: rank must be <= dim");
  if (kind == EnsembleKind::Scaled && base == EnsembleKind::Scaled)
    throw InvalidSpec("EnsembleSpec: scaled ensembles cannot nest");
}

CMatrix generate(const EnsembleSpec& spec, int trial, int index) {
  spec.validate();
  if (trial < 0) throw InvalidSpec("generate: trial must be >= 0");
  Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(trial),
                   static_cast<std::uint64_t>(index)));
  return generate_kind(spec.kind, spec, rng);
}

std::vector<std::string> all_property_names() {
  return {"soundness",       "refinements", "chain_xy",
          "th212",           "lemma_cauchy_schwarz", "lemma_jensen",
          "hermite_hadamard", "qt_predicate", "equality_conditions"};
}

std::vector<EnsembleSpec> default_campaign(std::uint64_t seed, int trials) {
  const EnsembleKind kinds[] = {EnsembleKind::Ginibre, EnsembleKind::Normal,
                                EnsembleKind::NilpotentShift, EnsembleKind::RankDeficient,
                                EnsembleKind::Unitary};
  std::vector<EnsembleSpec> specs;
  std::uint64_t idx = 0;
  for (EnsembleKind kind : kinds)
    for (int dim : {2, 3, 5}) {
      EnsembleSpec s;
      s.kind = kind;
      s.dim = dim;
      s.trials = trials;
      s.seed = mix_seed(seed, 77, idx++);
      if (kind == EnsembleKind::RankDeficient) s.rank = dim / 2;
      specs.push_back(s);
    }
  return specs;
}

VerificationReport run_campaign(const std::vector<EnsembleSpec>& specs,
                                const std::vector<std::string>& properties, std::uint64_t seed,
                                int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const EnsembleSpec& s : specs) s.validate();
  const PropertyFlags flags = parse_properties(properties);

  VerificationReport report;
  report.config.specs = specs;
  report.config.properties = properties;
  report.config.seed = seed;

  if (flags.any()) {
    struct Task {
      const EnsembleSpec* spec;
      int trial;
    };
    std::vector<Task> tasks;
    for (const EnsembleSpec& s : specs)
      for (int k = 0; k < s.trials; ++k) tasks.push_back({&s, k});

    report.trials.resize(tasks.size());
    WCache shared_cache;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        try {
          report.trials[i] = run_trial(*tasks[i].spec, tasks[i].trial, flags, shared_cache);
        } catch (const std::exception& e) {
          TrialRecord rec;
          rec.ensemble = std::string(to_string(tasks[i].spec->kind));
          rec.dim = tasks[i].spec->dim;
          rec.trial = tasks[i].trial;
          rec.violations.push_back({std::string("trial_error:") + e.what(), 1.0});
          report.trials[i] = std::move(rec);
        }
      }
    };
    const int nthreads = std::max(1, threads);
    if (nthreads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(nthreads);
      for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
  }

  // Aggregation is single-threaded over the deterministic trial order.
  std::map<std::string, std::vector<double>> slack;
  for (const TrialRecord& rec : report.trials) {
    report.summary.violation_count += static_cast<long>(rec.violations.size());
    report.summary.warning_count += static_cast<long>(rec.warnings.size());
    for (const BoundResult& row : rec.bounds) {
      double ref_mid = 0.0;
      switch (row.target) {
        case BoundTarget::W: ref_mid = rec.w_ref.mid(); break;
        case BoundTarget::We: ref_mid = rec.we_ref.mid(); break;
        case BoundTarget::WOffdiag: ref_mid = rec.woff_ref.mid(); break;
      }
      double s = 0.0;
      switch (row.kind) {
        case BoundKind::Lower: s = ref_mid - row.value; break;
        case BoundKind::Upper: s = row.value - ref_mid; break;
        case BoundKind::TwoSided:
          s = std::min(ref_mid - row.value, *row.upper_value - ref_mid);
          break;
      }
      slack[std::string(to_string(row.id))].push_back(s);
    }
  }
  report.summary.trials = static_cast<long>(report.trials.size());
  for (auto& [name, values] : slack) {
    std::sort(values.begin(), values.end());
    SlackQuantiles q;
    q.count = static_cast<long>(values.size());
    q.min = values.front();
    q.q25 = quantile_sorted(values, 0.25);
    q.median = quantile_sorted(values, 0.5);
    q.q75 = quantile_sorted(values, 0.75);
    q.max = values.back();
    report.summary.per_bound_slack[name] = q;
  }
  report.summary.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

namespace {

struct EqualityTols {
  double premise;     // equality recognized below this residual
  double consequent;  // violation flagged above this residual
};

EqualityTols tols_for(double scale) {
  return {1e-8 * std::max(1.0, scale), 1e-6 * std::max(1.0, scale)};
}

EqualityCheck make_check(std::string name, bool biconditional, double premise_res,
                         double consequent_res, const EqualityTols& tols) {
  EqualityCheck ec;
  ec.condition = std::move(name);
  ec.biconditional = biconditional;
  ec.premise_residual = premise_res;
  ec.consequent_residual = consequent_res;
  ec.premise_holds = premise_res <= tols.premise;
  ec.consequent_holds = consequent_res <= tols.premise;
  ec.holds = !(ec.premise_holds && consequent_res > tols.consequent);
  if (biconditional && ec.consequent_holds && premise_res > tols.consequent) ec.holds = false;
  return ec;
}

}  // namespace

std::vector<EqualityCheck> check_equality_conditions(const CMatrix& t, WCache* cache) {
  const double norm_t = spectral_norm(t);
  auto [re, im] = cartesian(t);
  const double n_re = spectral_norm(re), n_im = spectral_norm(im);
  const double n_gram = spectral_norm(t.adjoint() * t + t * t.adjoint());
  const double np = spectral_norm(re + im), nm = spectral_norm(re - im);
  const double w = cached_w(cache, t, 1e-10 * scale_of(t)).mid();
  const EqualityTols tols = tols_for(std::max(1.0, norm_t));

  std::vector<EqualityCheck> out;

  // Cor 2.5 remark: the Gram-plus-Cartesian-spread lower bound is tight iff
  // ||T*T+TT*||/2 = ||Re||^2+||Im||^2 and w = max{||Re||, ||Im||}.
  {
    const double lhs = std::sqrt(
        std::max(0.25 * n_gram + 0.5 * std::abs(n_re * n_re - n_im * n_im), 0.0));
    const double c1 = std::abs(0.5 * n_gram - (n_re * n_re + n_im * n_im));
    const double c2 = std::abs(w - std::max(n_re, n_im));
    out.push_back(make_check("cor25_equality", true, std::abs(lhs - w), std::max(c1, c2), tols));
  }
  // Cor 2.7 remark.
  {
    const double lhs =
        std::sqrt(std::max(0.25 * n_gram + 0.25 * std::abs(np * np - nm * nm), 0.0));
    const double c1 = std::abs(n_gram - (np * np + nm * nm));
    const double c2 = std::abs(w - std::max(np, nm) * M_SQRT1_2);
    out.push_back(make_check("cor27_equality", true, std::abs(lhs - w), std::max(c1, c2), tols));
  }
  // Th 2.14 remark (ii): one-directional, consequent q1 = q2.
  {
    const double lhs = 0.5 * norm_t + 0.25 * std::abs(n_re - 0.5 * norm_t) +
                       0.25 * std::abs(n_im - 0.5 * norm_t);
    const double q1 = std::max(n_re, 0.5 * norm_t);
    const double q2 = std::max(n_im, 0.5 * norm_t);
    out.push_back(
        make_check("th214_equality_hks", false, std::abs(lhs - w), std::abs(q1 - q2), tols));
  }
  // Th 2.14 remark (iv): biconditional.
  {
    const double lhs = 0.5 * norm_t + 0.5 * std::abs(n_re - n_im);
    const double c1 = std::abs(norm_t - (n_re + n_im));
    const double c2 = std::abs(w - std::max(n_re, n_im));
    out.push_back(
        make_check("th214_equality_laa", true, std::abs(lhs - w), std::max(c1, c2), tols));
  }
  return out;
}

std::vector<EqualityCheck> check_equality_conditions(const CMatrix& b, const CMatrix& c,
                                                     WCache* cache) {
  require_same_dim(b, c, "check_equality_conditions");
  const double scale = std::max({1.0, spectral_norm(b), spectral_norm(c)});
  const EqualityTols tols = tols_for(scale);
  const double wb = cached_w(cache, b, 1e-10 * scale_of(b)).mid();
  const double wc = cached_w(cache, c, 1e-10 * scale_of(c)).mid();
  const CMatrix sum_sq = b * b + c * c;
  const double ws = cached_w(cache, sum_sq, 1e-10 * scale_of(sum_sq)).mid();
  const double we = cached_we(cache, b, c, 1e-7 * scale).mid();

  std::vector<EqualityCheck> out;
  // Th 2.2 remark (ii): one-directional; the normal B=C example shows the
  // converse can fail.
  {
    const double rhs = std::sqrt(std::max(0.5 * ws, 0.0));
    const double c1 = std::abs(wb - rhs);
    const double c2 = std::abs(wc - rhs);
    out.push_back(
        make_check("th22_equality_dragomir", false, std::abs(we - rhs), std::max(c1, c2), tols));
  }
  // Th 2.2 remark (iii): biconditional.
  {
    const double rhs =
        std::sqrt(std::max(0.5 * ws + 0.5 * std::abs(wb * wb - wc * wc), 0.0));
    const double c1 = std::abs(ws - (wb * wb + wc * wc));
    const double c2 = std::abs(we - std::max(wb, wc));
    out.push_back(
        make_check("th22_equality_spread", true, std::abs(we - rhs), std::max(c1, c2), tols));
  }
  return out;
}

namespace {

ordered_json spec_to_json(const EnsembleSpec& s) {
  ordered_json j;
  j["ensemble"] = std::string(to_string(s.kind));
  j["dim"] = s.dim;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  if (s.kind == EnsembleKind::RankDeficient) j["rank"] = s.rank >= 0 ? s.rank : s.dim / 2;
  if (s.kind == EnsembleKind::Scaled) {
    j["base"] = std::string(to_string(s.base));
    j["scalar_re"] = s.scalar.real();
    j["scalar_im"] = s.scalar.imag();
  }
  return j;
}

ordered_json enclosure_to_json(const Enclosure& e) {
  ordered_json j;
  j["lower"] = e.lower;
  j["upper"] = e.upper;
  return j;
}

std::string_view kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::Lower: return "lower";
    case BoundKind::Upper: return "upper";
    default: return "twosided";
  }
}

std::string_view target_name(BoundTarget t) {
  switch (t) {
    case BoundTarget::W: return "w";
    case BoundTarget::We: return "we";
    default: return "w_offdiag";
  }
}

}  // namespace

std::string report_to_json(const VerificationReport& report) {
  ordered_json j;
  j["schema"] = "opradius-report/1";
  ordered_json cfg;
  cfg["seed"] = report.config.seed;
  cfg["properties"] = report.config.properties;
  ordered_json specs = ordered_json::array();
  for (const EnsembleSpec& s : report.config.specs) specs.push_back(spec_to_json(s));
  cfg["specs"] = specs;
  j["config"] = cfg;

  ordered_json trials = ordered_json::array();
  for (const TrialRecord& rec : report.trials) {
    ordered_json tj;
    tj["ensemble"] = rec.ensemble;
    tj["dim"] = rec.dim;
    tj["trial"] = rec.trial;
    tj["t_param"] = rec.t_param;
    tj["r_param"] = rec.r_param;
    ordered_json refs;
    refs["w"] = enclosure_to_json(rec.w_ref);
    refs["we"] = enclosure_to_json(rec.we_ref);
    refs["w_offdiag"] = enclosure_to_json(rec.woff_ref);
    tj["refs"] = refs;
    ordered_json rows = ordered_json::array();
    for (const BoundResult& row : rec.bounds) {
      ordered_json rj;
      rj["id"] = std::string(to_string(row.id));
      rj["kind"] = std::string(kind_name(row.kind));
      rj["target"] = std::string(target_name(row.target));
      rj["value"] = row.value;
      if (row.upper_value) rj["upper_value"] = *row.upper_value;
      rj["digest"] = row.inputs_digest;
      ordered_json bj;
      for (const auto& [k, v] : row.breakdown) bj[k] = v;
      rj["breakdown"] = bj;
      rows.push_back(rj);
    }
    tj["bounds"] = rows;
    ordered_json viols = ordered_json::array();
    for (const Violation& v : rec.violations)
      viols.push_back({{"property", v.property}, {"magnitude", v.magnitude}});
    tj["violations"] = viols;
    ordered_json warns = ordered_json::array();
    for (const Violation& v : rec.warnings)
      warns.push_back({{"property", v.property}, {"magnitude", v.magnitude}});
    tj["warnings"] = warns;
    trials.push_back(tj);
  }
  j["trials"] = trials;

  ordered_json summary;
  summary["trials"] = report.summary.trials;
  summary["violations"] = report.summary.violation_count;
  summary["warnings"] = report.summary.warning_count;
  ordered_json per_bound;
  for (const auto& [name, q] : report.summary.per_bound_slack) {
    ordered_json qj;
    qj["min"] = q.min;
    qj["q25"] = q.q25;
    qj["median"] = q.median;
    qj["q75"] = q.q75;
    qj["max"] = q.max;
    qj["count"] = q.count;
    per_bound[name] = qj;
  }
  summary["per_bound_slack"] = per_bound;
  j["summary"] = summary;
  return j.dump();
}

std::string report_to_csv(const VerificationReport& report) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "ensemble,dim,trial,bound_id,kind,target,value,upper_value,w_uncertainty,"
        "ref_lower,ref_upper,slack\n";
  for (const TrialRecord& rec : report.trials) {
    for (const BoundResult& row : rec.bounds) {
      const Enclosure* ref = &rec.w_ref;
      if (row.target == BoundTarget::We) ref = &rec.we_ref;
      if (row.target == BoundTarget::WOffdiag) ref = &rec.woff_ref;
      double slack = 0.0;
      switch (row.kind) {
        case BoundKind::Lower: slack = ref->mid() - row.value; break;
        case BoundKind::Upper: slack = row.value - ref->mid(); break;
        case BoundKind::TwoSided:
          slack = std::min(ref->mid() - row.value, *row.upper_value - ref->mid());
          break;
      }
      os << rec.ensemble << ',' << rec.dim << ',' << rec.trial << ',' << to_string(row.id)
         << ',' << kind_name(row.kind) << ',' << target_name(row.target) << ',' << row.value
         << ',';
      if (row.upper_value) os << *row.upper_value;
      os << ',' << breakdown_get(row.breakdown, "w_uncertainty") << ',' << ref->lower << ','
         << ref->upper << ',' << slack << '\n';
    }
  }
  return os.str();
}

VerificationReport parse_report_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  VerificationReport report;
  report.config.seed = j.at("config").at("seed").get<std::uint64_t>();
  for (const auto& p : j.at("config").at("properties"))
    report.config.properties.push_back(p.get<std::string>());
  for (const auto& sj : j.at("config").at("specs")) {
    EnsembleSpec s;
    auto kind = parse_ensemble_kind(sj.at("ensemble").get<std::string>());
    if (!kind) throw ParseError("report JSON: unknown ensemble kind");
    s.kind = *kind;
    s.dim = sj.at("dim").get<int>();
    s.trials = sj.at("trials").get<int>();
    s.seed = sj.at("seed").get<std::uint64_t>();
    if (sj.contains("rank")) s.rank = sj.at("rank").get<int>();
    report.config.specs.push_back(s);
  }
  for (const auto& tj : j.at("trials")) {
    TrialRecord rec;
    rec.ensemble = tj.at("ensemble").get<std::string>();
    rec.dim = tj.at("dim").get<int>();
    rec.trial = tj.at("trial").get<int>();
    rec.t_param = tj.at("t_param").get<double>();
    rec.r_param = tj.at("r_param").get<double>();
    rec.w_ref.lower = tj.at("refs").at("w").at("lower").get<double>();
    rec.w_ref.upper = tj.at("refs").at("w").at("upper").get<double>();
    rec.we_ref.lower = tj.at("refs").at("we").at("lower").get<double>();
    rec.we_ref.upper = tj.at("refs").at("we").at("upper").get<double>();
    rec.woff_ref.lower = tj.at("refs").at("w_offdiag").at("lower").get<double>();
    rec.woff_ref.upper = tj.at("refs").at("w_offdiag").at("upper").get<double>();
    for (const auto& rj : tj.at("bounds")) {
      BoundResult row;
      auto id = parse_bound_id(rj.at("id").get<std::string>());
      if (!id) throw ParseError("report JSON: unknown bound id");
      const BoundInfo& info = bound_info(*id);
      row.id = *id;
      row.kind = info.kind;
      row.target = info.target;
      row.value = rj.at("value").get<double>();
      if (rj.contains("upper_value")) row.upper_value = rj.at("upper_value").get<double>();
      row.inputs_digest = rj.at("digest").get<std::string>();
      for (const auto& [k, v] : rj.at("breakdown").items())
        row.breakdown.emplace_back(k, v.get<double>());
      rec.bounds.push_back(std::move(row));
    }
    for (const auto& vj : tj.at("violations"))
      rec.violations.push_back(
          {vj.at("property").get<std::string>(), vj.at("magnitude").get<double>()});
    for (const auto& vj : tj.at("warnings"))
      rec.warnings.push_back(
          {vj.at("property").get<std::string>(), vj.at("magnitude").get<double>()});
    report.trials.push_back(std::move(rec));
  }
  const auto& sj = j.at("summary");
  report.summary.trials = sj.at("trials").get<long>();
  report.summary.violation_count = sj.at("violations").get<long>();
  report.summary.warning_count = sj.at("warnings").get<long>();
  for (const auto& [name, qj] : sj.at("per_bound_slack").items()) {
    SlackQuantiles q;
    q.min = qj.at("min").get<double>();
    q.q25 = qj.at("q25").get<double>();
    q.median = qj.at("median").get<double>();
    q.q75 = qj.at("q75").get<double>();
    q.max = qj.at("max").get<double>();
    q.count = qj.at("count").get<long>();
    report.summary.per_bound_slack[name] = q;
  }
  return report;
}

void emit_report(const VerificationReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOFailure("emit_report: cannot open " + path);
  out << (format == ReportFormat::Json ? report_to_json(report) : report_to_csv(report));
  if (!out) throw IOFailure("emit_report: write failed for " + path);
}

}  // namespace opradius
