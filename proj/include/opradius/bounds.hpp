#ifndef OPRADIUS_BOUNDS_HPP
#define OPRADIUS_BOUNDS_HPP

#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opradius/types.hpp"

// Registry of the numerical-radius / Euclidean-radius inequalities, each
// evaluated as a closed-form expression over matcore/transforms primitives.
// Every result carries a breakdown of the named intermediates so the values
// can be inspected term by term.

namespace opradius {

enum class BoundKind { Lower, Upper, TwoSided };
enum class BoundTarget { W, We, WOffdiag };

enum class BoundId {
  we_lower_21i,
  we_lower_21ii,
  we_lower_21iii,
  we_lower_21iv,
  we_lower_th22,
  we_lower_dragomir,
  we_lower_normal,
  w_lower_cor25,
  w_lower_cor27,
  we_upper_th28,
  we_upper_eq5,
  w_twosided_29i,
  w_twosided_29ii,
  we_upper_integral_r,
  w_upper_cor313,
  w_lower_th214,
  w_lower_laa21_29,
  w_lower_psk1_23,
  w_lower_hks,
  w_lower_laa21_21,
  w_sandwich_eqv,
  we_sandwich_eqn1,
  offdiag_lower_31i,
  offdiag_lower_31ii,
  offdiag_lower_31iii,
  offdiag_upper_31iv,
  offdiag_upper_31v,
  offdiag_upper_psk,
  offdiag_lower_pko27,
  offdiag_lower_pko212,
  w_upper_aluthge_t,
  w_upper_aluthge_half,
  w_upper_qt,
};

/// Input signature of a bound formula.
enum class BoundSignature { T, BC, XY, Tt, Tr, BCt, BCr };

struct BoundInfo {
  BoundId id;
  std::string_view name;
  BoundKind kind;
  BoundTarget target;
  BoundSignature signature;
  std::string_view anchor;  // human-readable formula reference
};

/// The complete registry, in a fixed order.
const std::vector<BoundInfo>& list_bounds();

const BoundInfo& bound_info(BoundId id);
std::string_view to_string(BoundId id);
std::optional<BoundId> parse_bound_id(std::string_view name);

struct BoundInputs {
  std::optional<CMatrix> T;
  std::optional<CMatrix> B, C;
  std::optional<CMatrix> X, Y;
  std::optional<double> t;  // [0,1]
  std::optional<double> r;  // [1,2]
};

/// Ordered name -> value map (insertion order preserved).
using Breakdown = std::vector<std::pair<std::string, double>>;

double breakdown_get(const Breakdown& b, std::string_view name);
bool breakdown_has(const Breakdown& b, std::string_view name);

struct BoundResult {
  BoundId id;
  BoundKind kind;
  BoundTarget target;
  double value = 0.0;                 // bound on the target radius itself
  std::optional<double> upper_value;  // second half of a two-sided bound
  Breakdown breakdown;
  std::string inputs_digest;
};

/// Memo for enclosures, keyed by input digest + tolerance. Thread-safe;
/// hits return exactly what a recomputation would, so sharing a cache
/// across trials never changes any value.
class WCache {
 public:
  std::optional<Enclosure> find(const std::string& key) const;
  void insert(const std::string& key, Enclosure e);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, Enclosure> entries_;
};

/// Evaluates one registry formula. Inner w(.) sub-evaluations use
/// numerical_radius at 1e-10*scale and take the midpoint; the accumulated
/// half-widths land in breakdown["w_uncertainty"].
BoundResult evaluate(BoundId id, const BoundInputs& in, WCache* cache = nullptr);

}  // namespace opradius

#endif
