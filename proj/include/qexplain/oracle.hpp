#ifndef QEXPLAIN_ORACLE_HPP
#define QEXPLAIN_ORACLE_HPP

// Reference semantics by exhaustive subset scans over D^n: minimal
// sufficient and necessary sets, necessity/sufficiency/responsibility
// degrees, actual causes with their minimal contingency sets, the
// hitting-set duality between MSS and MNS, and the cause/repair
// correspondence. Exponential in |D^n|; guarded by a configurable bound.

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qexplain/degree.hpp"
#include "qexplain/evaluate.hpp"
#include "qexplain/hitting_set.hpp"
#include "qexplain/parallel.hpp"
#include "qexplain/repair.hpp"

namespace qexplain {

struct OracleOptions {
  std::size_t max_endogenous = 20;
  unsigned jobs = 1;
  EnumerationOptions enumeration;
};

enum class ExplanationKind { SS, MSS, NS, MNS, witness, repair_removal };

inline const char* to_string(ExplanationKind k) {
  switch (k) {
    case ExplanationKind::SS: return "SS";
    case ExplanationKind::MSS: return "MSS";
    case ExplanationKind::NS: return "NS";
    case ExplanationKind::MNS: return "MNS";
    case ExplanationKind::witness: return "witness";
    case ExplanationKind::repair_removal: return "repair-removal";
  }
  return "?";
}

struct ExplanationSet {
  TidSet tuples;
  ExplanationKind kind = ExplanationKind::MSS;

  friend bool operator==(const ExplanationSet&, const ExplanationSet&) = default;
};

namespace detail {

inline bool all_endogenous(const Instance& instance, const TidSet& tids) {
  for (const auto& t : tids)
    if (!instance.at(t).endogenous()) return false;
  return true;
}

// S ∪ D^x ⊨ Q
inline bool sufficient_with_exogenous(const Query& q, const Instance& instance, const TidSet& s) {
  TupleMask m = instance.mask_of(s);
  for (std::size_t i : instance.exogenous_indices()) m.set(i);
  return evaluate(q, instance, m);
}

// D ∖ N ⊭ Q
inline bool falsifies(const Query& q, const Instance& instance, const TidSet& n) {
  TupleMask m = instance.full_mask();
  for (const auto& t : n) m.reset(instance.require_index(t));
  return !evaluate(q, instance, m);
}

} // namespace detail

/// Checks the defining conditions of `set.kind` directly from the
/// definitions (no enumeration). Used to validate every set the library
/// hands out.
inline bool verify_explanation(const ExplanationSet& set, const Instance& instance, const Query& query) {
  const TidSet& s = set.tuples;
  for (const auto& t : s)
    if (!instance.contains(t)) return false;
  auto drop = [&](const TupleId& t) {
    TidSet r = s;
    r.erase(t);
    return r;
  };
  switch (set.kind) {
    case ExplanationKind::SS:
    case ExplanationKind::MSS: {
      if (!detail::all_endogenous(instance, s) || !detail::sufficient_with_exogenous(query, instance, s)) return false;
      if (set.kind == ExplanationKind::SS) return true;
      for (const auto& t : s)
        if (detail::sufficient_with_exogenous(query, instance, drop(t))) return false;
      return true;
    }
    case ExplanationKind::NS:
    case ExplanationKind::MNS: {
      if (!detail::all_endogenous(instance, s) || !detail::falsifies(query, instance, s)) return false;
      if (set.kind == ExplanationKind::NS) return true;
      for (const auto& t : s)
        if (detail::falsifies(query, instance, drop(t))) return false;
      return true;
    }
    case ExplanationKind::witness: {
      if (!evaluate_on(query, instance, s)) return false;
      for (const auto& t : s)
        if (evaluate_on(query, instance, drop(t))) return false;
      return true;
    }
    case ExplanationKind::repair_removal: {
      if (!detail::falsifies(query, instance, s)) return false;
      for (const auto& t : s)
        if (detail::falsifies(query, instance, drop(t))) return false;
      return true;
    }
  }
  return false;
}

namespace detail {

/// Ascending-cardinality scan over subsets of D^n encoded as bit masks.
class SubsetScanner {
public:
  SubsetScanner(const Query& query, const Instance& instance, const OracleOptions& options)
      : query_(query), instance_(instance), options_(options), endo_(instance.endogenous_indices()),
        exo_(instance.exogenous_indices()) {
    if (endo_.size() > options.max_endogenous)
      throw BoundExceeded(std::to_string(endo_.size()) + " endogenous tuples exceed the oracle bound of " +
                          std::to_string(options.max_endogenous));
    if (endo_.size() > 62) throw BoundExceeded("the oracle supports at most 62 endogenous tuples");
    if (!evaluate(query, instance)) throw QueryNotSatisfied();
  }

  std::size_t width() const { return endo_.size(); }
  const std::vector<std::size_t>& endogenous() const { return endo_; }

  // S ∪ D^x ⊨ Q, for S encoded over D^n.
  bool sufficient(std::uint64_t bits) const {
    TupleMask m(instance_.size(), false);
    for (std::size_t i : exo_) m.set(i);
    for (std::size_t j = 0; j < endo_.size(); ++j)
      if (bits >> j & 1) m.set(endo_[j]);
    return evaluate(query_, instance_, m);
  }

  // D ∖ N ⊭ Q
  bool necessary(std::uint64_t bits) const { return !holds_without(bits); }

  // D ∖ X ⊨ Q
  bool holds_without(std::uint64_t bits) const {
    TupleMask m = instance_.full_mask();
    for (std::size_t j = 0; j < endo_.size(); ++j)
      if (bits >> j & 1) m.reset(endo_[j]);
    return evaluate(query_, instance_, m);
  }

  TidSet decode(std::uint64_t bits) const {
    TidSet out;
    for (std::size_t j = 0; j < endo_.size(); ++j)
      if (bits >> j & 1) out.insert(instance_.tuple(endo_[j]).tid);
    return out;
  }

  /// Minimal masks (within `universe`) satisfying an upward-closed
  /// predicate. Scans by cardinality; supersets of found sets are skipped,
  /// so everything reported is minimal.
  template <typename Pred>
  std::vector<std::uint64_t> minimal_upward(std::uint64_t universe, Pred&& pred) const {
    std::vector<std::uint64_t> found;
    const int n = std::popcount(universe);
    for (int size = 0; size <= n; ++size) {
      std::vector<std::uint64_t> level;
      for_each_subset_of_size(universe, size, [&](std::uint64_t s) {
        for (auto f : found)
          if ((f & s) == f) return;
        level.push_back(s);
      });
      std::vector<char> ok(level.size(), 0);
      parallel_for(level.size(), options_.jobs, [&](std::size_t i) { ok[i] = pred(level[i]) ? 1 : 0; });
      for (std::size_t i = 0; i < level.size(); ++i)
        if (ok[i]) found.push_back(level[i]);
    }
    return found;
  }

  /// Enumerates subsets of `universe` with exactly `size` elements, in
  /// increasing order of their encoding.
  template <typename Fn>
  static void for_each_subset_of_size(std::uint64_t universe, int size, Fn&& fn) {
    std::vector<int> positions;
    for (int j = 0; j < 64; ++j)
      if (universe >> j & 1) positions.push_back(j);
    const int n = static_cast<int>(positions.size());
    if (size > n) return;
    if (size == 0) {
      fn(std::uint64_t{0});
      return;
    }
    // Gosper's hack over compact indices, then scatter.
    std::uint64_t c = (std::uint64_t{1} << size) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n;
    while (c < limit) {
      std::uint64_t s = 0;
      for (int j = 0; j < n; ++j)
        if (c >> j & 1) s |= std::uint64_t{1} << positions[j];
      fn(s);
      const std::uint64_t u = c & (~c + 1);
      const std::uint64_t v = c + u;
      c = v + (((v ^ c) / u) >> 2);
    }
  }

  std::uint64_t full() const { return endo_.empty() ? 0 : (~std::uint64_t{0} >> (64 - endo_.size())); }

private:
  const Query& query_;
  const Instance& instance_;
  const OracleOptions& options_;
  std::vector<std::size_t> endo_;
  std::vector<std::size_t> exo_;
};

inline std::vector<ExplanationSet> to_explanations(const SubsetScanner& scan, const std::vector<std::uint64_t>& masks,
                                                   ExplanationKind kind) {
  TidFamily fam;
  for (auto m : masks) fam.push_back(scan.decode(m));
  std::vector<ExplanationSet> out;
  for (auto& s : normalized(std::move(fam))) out.push_back(ExplanationSet{std::move(s), kind});
  return out;
}

} // namespace detail

/// MSS(D, Q): subset-minimal S ⊆ D^n with S ∪ D^x ⊨ Q.
inline std::vector<ExplanationSet> enumerate_mss(const Instance& instance, const Query& query,
                                                 const OracleOptions& options = {}) {
  detail::SubsetScanner scan(query, instance, options);
  auto masks = scan.minimal_upward(scan.full(), [&](std::uint64_t s) { return scan.sufficient(s); });
  return detail::to_explanations(scan, masks, ExplanationKind::MSS);
}

/// MNS(D, Q): subset-minimal N ⊆ D^n with D ∖ N ⊭ Q. Empty when the
/// exogenous tuples alone satisfy the query.
inline std::vector<ExplanationSet> enumerate_mns(const Instance& instance, const Query& query,
                                                 const OracleOptions& options = {}) {
  detail::SubsetScanner scan(query, instance, options);
  auto masks = scan.minimal_upward(scan.full(), [&](std::uint64_t n) { return scan.necessary(n); });
  return detail::to_explanations(scan, masks, ExplanationKind::MNS);
}

inline TidFamily tuples_of(const std::vector<ExplanationSet>& sets) {
  TidFamily out;
  for (const auto& s : sets) out.push_back(s.tuples);
  return out;
}

/// Cont(D, Q, t) for every actual cause t. Tuples that are not actual causes
/// are absent from the map.
struct ContingencyReport {
  std::map<TupleId, TidFamily> minimal_contingencies;

  TidSet causes() const {
    TidSet out;
    for (const auto& [t, _] : minimal_contingencies) out.insert(t);
    return out;
  }

  bool is_cause(const TupleId& t) const { return minimal_contingencies.count(t) != 0; }

  /// ρ(t) = 1 / (|Γ_min| + 1), or 0 when t is not an actual cause.
  Degree responsibility(const TupleId& t) const {
    auto it = minimal_contingencies.find(t);
    if (it == minimal_contingencies.end() || it->second.empty()) return Degree::zero();
    std::size_t best = it->second.front().size();
    for (const auto& g : it->second) best = std::min(best, g.size());
    return Degree::inverse_of(best + 1);
  }
};

/// Brute force over Γ ⊆ D^n ∖ {t}: Γ is a contingency for t when D ∖ Γ ⊨ Q
/// and D ∖ (Γ ∪ {t}) ⊭ Q. Only subset-minimal Γ are kept.
inline ContingencyReport actual_causes(const Instance& instance, const Query& query,
                                       const OracleOptions& options = {}) {
  detail::SubsetScanner scan(query, instance, options);
  const std::size_t n = scan.width();
  std::vector<TidFamily> per_tuple(n);
  parallel_for(n, options.jobs, [&](std::size_t j) {
    const std::uint64_t self = std::uint64_t{1} << j;
    const std::uint64_t others = scan.full() & ~self;
    std::vector<std::uint64_t> found;
    std::vector<std::uint64_t> dead;  // D ∖ Γ already false: every superset is too
    for (int size = 0; size <= std::popcount(others); ++size) {
      detail::SubsetScanner::for_each_subset_of_size(others, size, [&](std::uint64_t g) {
        for (auto f : found)
          if ((f & g) == f) return;
        for (auto d : dead)
          if ((d & g) == d) return;
        if (!scan.holds_without(g)) {
          dead.push_back(g);
          return;
        }
        if (!scan.holds_without(g | self)) found.push_back(g);
      });
    }
    for (auto g : found) per_tuple[j].push_back(scan.decode(g));
  });
  ContingencyReport report;
  for (std::size_t j = 0; j < n; ++j)
    if (!per_tuple[j].empty())
      report.minimal_contingencies[instance.tuple(scan.endogenous()[j]).tid] = normalized(std::move(per_tuple[j]));
  return report;
}

struct TupleDegrees {
  TupleId tid;
  bool endogenous = true;
  Degree eta;    // necessity
  Degree sigma;  // sufficiency
  Degree rho;    // causal responsibility
  bool strong_necessary = false;
  bool strong_sufficient = false;
};

struct DegreeReport {
  std::vector<TupleDegrees> tuples;  // every tuple of the instance, tid order

  const TupleDegrees& at(const TupleId& tid) const {
    for (const auto& d : tuples)
      if (d.tid == tid) return d;
    throw UnknownTuple(tid.str());
  }
};

namespace detail {

inline Degree min_containing(const TidFamily& family, const TupleId& t) {
  std::size_t best = 0;
  for (const auto& s : family)
    if (s.count(t) && (best == 0 || s.size() < best)) best = s.size();
  return Degree::inverse_of(best);
}

inline bool in_every(const TidFamily& family, const TupleId& t) {
  return !family.empty() &&
         std::all_of(family.begin(), family.end(), [&](const TidSet& s) { return s.count(t) != 0; });
}

} // namespace detail

/// η and σ minimize over the minimal sets containing t; ρ comes from the
/// contingency-set scan. Throws InternalError if η ≠ ρ or η > 0 ⇎ σ > 0.
inline DegreeReport degrees(const Instance& instance, const Query& query, const OracleOptions& options = {}) {
  const TidFamily mss = tuples_of(enumerate_mss(instance, query, options));
  const TidFamily mns = tuples_of(enumerate_mns(instance, query, options));
  const ContingencyReport causes = actual_causes(instance, query, options);
  DegreeReport report;
  for (const auto& t : instance.tuples()) {
    TupleDegrees d;
    d.tid = t.tid;
    d.endogenous = t.endogenous();
    d.eta = detail::min_containing(mns, t.tid);
    d.sigma = detail::min_containing(mss, t.tid);
    d.rho = causes.responsibility(t.tid);
    d.strong_necessary = detail::in_every(mns, t.tid);
    d.strong_sufficient = detail::in_every(mss, t.tid);
    if (d.eta != d.rho)
      throw InternalError("necessity degree " + d.eta.to_string() + " differs from responsibility " +
                          d.rho.to_string() + " for " + t.tid.str());
    if (d.eta.is_zero() != d.sigma.is_zero())
      throw InternalError("tuple " + t.tid.str() + " is in some MNS xor in some MSS");
    report.tuples.push_back(d);
  }
  return report;
}

/// Outcome of a structural check, with the first counterexample on failure.
struct CheckResult {
  bool holds = true;
  std::string reason;
  std::optional<TidSet> violating;
  TidFamily left;   // MSS, or cause-side removals
  TidFamily right;  // MNS, or repair-side removals
};

/// Every MSS is a minimal hitting set of MNS, and every MNS is a minimal
/// hitting set of MSS.
inline CheckResult check_duality(const Instance& instance, const Query& query, const OracleOptions& options = {}) {
  CheckResult r;
  r.left = tuples_of(enumerate_mss(instance, query, options));
  r.right = tuples_of(enumerate_mns(instance, query, options));
  for (const auto& s : r.left) {
    if (!is_minimal_hitting_set(s, r.right)) {
      r.holds = false;
      r.reason = "MSS " + to_string(s) + " is not a minimal hitting set of the MNS family";
      r.violating = s;
      return r;
    }
  }
  for (const auto& n : r.right) {
    if (!is_minimal_hitting_set(n, r.left)) {
      r.holds = false;
      r.reason = "MNS " + to_string(n) + " is not a minimal hitting set of the MSS family";
      r.violating = n;
      return r;
    }
  }
  return r;
}

/// Cause/repair correspondence for a conjunctive query:
///  (a) t is an actual cause with subset-minimal contingency Γ iff
///      D ∖ (Γ ∪ {t}) is an S-repair;
///  (b) with minimum-cardinality Γ (maximum responsibility) iff it is a
///      C-repair.
/// Repairs may only delete endogenous tuples here. When no such repair
/// exists the correspondence is vacuous and holds iff there are no causes.
inline CheckResult cause_repair_correspondence(const Instance& instance, const Query& query,
                                               const OracleOptions& options = {}) {
  const DenialConstraint dc = denial_constraint_of(query);
  const ContingencyReport causes = actual_causes(instance, query, options);

  CheckResult r;
  for (const auto& [t, conts] : causes.minimal_contingencies) {
    for (const auto& g : conts) {
      TidSet removal = g;
      removal.insert(t);
      r.left.push_back(std::move(removal));
    }
  }
  r.left = normalized(std::move(r.left));

  RepairOptions ropts;
  ropts.endogenous_only = true;
  ropts.enumeration = options.enumeration;
  std::vector<Repair> repairs;
  try {
    repairs = enumerate_s_repairs(instance, dc, ropts);
  } catch (const NoRepair& e) {
    r.holds = r.left.empty();
    r.reason = std::string("vacuous: ") + e.what();
    return r;
  }
  for (const auto& rep : repairs) r.right.push_back(rep.removed);
  r.right = normalized(std::move(r.right));

  if (r.left != r.right) {
    r.holds = false;
    for (const auto& s : r.left)
      if (std::find(r.right.begin(), r.right.end(), s) == r.right.end()) r.violating = s;
    for (const auto& s : r.right)
      if (!r.violating && std::find(r.left.begin(), r.left.end(), s) == r.left.end()) r.violating = s;
    r.reason = "(a) fails: cause removals and S-repair removals differ";
    return r;
  }

  TidFamily min_cause;
  if (!r.left.empty()) {
    std::size_t best = r.left.front().size();
    for (const auto& s : r.left) best = std::min(best, s.size());
    for (const auto& s : r.left)
      if (s.size() == best) min_cause.push_back(s);
  }
  TidFamily c_removals;
  for (const auto& rep : repairs)
    if (rep.cardinality_minimal) c_removals.push_back(rep.removed);
  if (normalized(min_cause) != normalized(c_removals)) {
    r.holds = false;
    r.reason = "(b) fails: maximum-responsibility removals and C-repair removals differ";
    return r;
  }
  return r;
}

} // namespace qexplain

#endif // QEXPLAIN_ORACLE_HPP
