#ifndef OPRADIUS_HARNESS_HPP
#define OPRADIUS_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "opradius/bounds.hpp"
#include "opradius/types.hpp"

// Random-matrix ensembles, the property-verification campaign, the
// equality-condition predicates and report emission.

namespace opradius {

enum class EnsembleKind {
  Ginibre,
  Hermitian,
  Normal,
  Unitary,
  NilpotentShift,
  RankDeficient,
  Diagonal,
  Scaled,
};

std::string_view to_string(EnsembleKind k);
std::optional<EnsembleKind> parse_ensemble_kind(std::string_view name);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::Ginibre;
  int dim = 2;
  std::uint64_t seed = 0;
  int trials = 1;
  int rank = -1;                             // RankDeficient; default floor(dim/2)
  EnsembleKind base = EnsembleKind::Ginibre; // Scaled
  Complex scalar = Complex(1.0, 0.0);        // Scaled

  void validate() const;  // throws InvalidSpec
};

/// The k-th matrix of trial `trial` under `spec`. Deterministic in
/// (spec.seed, trial, index); independent draws for index = 0,1,2,...
CMatrix generate(const EnsembleSpec& spec, int trial, int index = 0);

struct Violation {
  std::string property;
  double magnitude = 0.0;
};

struct TrialRecord {
  std::string ensemble;
  int dim = 0;
  int trial = 0;
  double t_param = 0.5;
  double r_param = 1.5;
  Enclosure w_ref;          // reference enclosure for w(T)
  Enclosure we_ref;         // for w_e(B,C)
  Enclosure woff_ref;       // for w(offdiag(X,Y))
  std::vector<BoundResult> bounds;
  std::vector<Violation> violations;
  std::vector<Violation> warnings;  // near-misses inside the uncertainty gate
};

struct SlackQuantiles {
  double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
  long count = 0;
};

struct ReportSummary {
  long trials = 0;
  long violation_count = 0;
  long warning_count = 0;
  std::map<std::string, SlackQuantiles> per_bound_slack;
  double wall_time_seconds = 0.0;  // never serialized; reports must be byte-stable
};

struct CampaignConfig {
  std::vector<EnsembleSpec> specs;
  std::vector<std::string> properties;  // empty = none, {"all"} = everything
  std::uint64_t seed = 0;
};

struct VerificationReport {
  CampaignConfig config;
  std::vector<TrialRecord> trials;
  ReportSummary summary;
};

/// Property groups the campaign can run.
std::vector<std::string> all_property_names();

/// Runs every selected property on every trial of every spec. Violations
/// are recorded, never thrown; trials are processed by `threads` workers
/// and the report is identical for any worker count.
VerificationReport run_campaign(const std::vector<EnsembleSpec>& specs,
                                const std::vector<std::string>& properties,
                                std::uint64_t seed, int threads = 1);

/// The default campaign of the verify CLI:
/// {ginibre, normal, nilpotent_shift, rank_deficient, unitary} x dims {2,3,5}
/// x 200 trials.
std::vector<EnsembleSpec> default_campaign(std::uint64_t seed, int trials = 200);

struct EqualityCheck {
  std::string condition;
  bool premise_holds = false;
  bool consequent_holds = false;
  bool biconditional = false;  // whether the source states the converse too
  bool holds = true;           // implication (and converse, if stated) not violated
  double premise_residual = 0.0;
  double consequent_residual = 0.0;
};

/// Equality-condition predicates for a single operator (the remarks tied to
/// the Cartesian-decomposition lower bounds).
std::vector<EqualityCheck> check_equality_conditions(const CMatrix& t, WCache* cache = nullptr);

/// Equality-condition predicates for a pair.
std::vector<EqualityCheck> check_equality_conditions(const CMatrix& b, const CMatrix& c,
                                                     WCache* cache = nullptr);

enum class ReportFormat { Json, Csv };

std::string report_to_json(const VerificationReport& report);
std::string report_to_csv(const VerificationReport& report);

/// Parses the fields needed for round-tripping (config + summary + per-trial
/// bound values).
VerificationReport parse_report_json(const std::string& text);

void emit_report(const VerificationReport& report, ReportFormat format, const std::string& path);

}  // namespace opradius

#endif
