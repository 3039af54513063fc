#ifndef QEXPLAIN_REPAIR_HPP
#define QEXPLAIN_REPAIR_HPP

// S-repairs and C-repairs of an instance with respect to the denial
// constraint of a Boolean conjunctive query, and the repair core as the
// intersection of all S-repairs.
//
// A subinstance is consistent iff it contains no witness of the query, so
// the removal sets of the S-repairs are exactly the minimal hitting sets of
// the minimal-witness family (the conflict hypergraph).

#include <algorithm>
#include <string>
#include <vector>

#include "qexplain/evaluate.hpp"
#include "qexplain/hitting_set.hpp"

namespace qexplain {

struct RepairOptions {
  /// Only endogenous tuples may be deleted (preferred-repair semantics).
  /// Raises NoRepair when some conflict consists of exogenous tuples only.
  bool endogenous_only = false;
  std::size_t max_witnesses = 100000;
  EnumerationOptions enumeration;
};

struct Repair {
  TidSet kept;
  TidSet removed;
  bool cardinality_minimal = false;

  friend bool operator==(const Repair&, const Repair&) = default;
};

enum class CoreMethod { naive_intersection, lemma1 };

inline const char* to_string(CoreMethod m) { return m == CoreMethod::lemma1 ? "lemma1" : "naive-intersection"; }

struct CoreResult {
  TidSet tuples;
  CoreMethod method = CoreMethod::naive_intersection;
};

/// The hyperedges whose hitting sets are the removal sets: the minimal
/// witnesses, cut down to their endogenous part in endogenous-only mode.
inline TidFamily conflict_hypergraph(const Instance& instance, const DenialConstraint& dc,
                                     const RepairOptions& options = {}) {
  auto witnesses = witness_family(Query{dc.body}, instance, options.enumeration);
  if (witnesses.size() > options.max_witnesses)
    throw BoundExceeded(std::to_string(witnesses.size()) + " witnesses exceed the bound of " +
                        std::to_string(options.max_witnesses));
  if (!options.endogenous_only) return witnesses;
  const TidSet endo = instance.endogenous_part();
  TidFamily edges;
  for (const auto& w : witnesses) {
    TidSet e = set_intersection(w, endo);
    if (e.empty()) throw NoRepair("conflict " + to_string(w) + " has no endogenous tuple to delete");
    edges.push_back(std::move(e));
  }
  return minimal_members(std::move(edges));
}

/// All S-repairs, sorted by (|removed|, removed tids).
inline std::vector<Repair> enumerate_s_repairs(const Instance& instance, const DenialConstraint& dc,
                                               const RepairOptions& options = {}) {
  const TidFamily edges = conflict_hypergraph(instance, dc, options);
  const TidFamily removals = minimal_hitting_sets(edges);
  const TidSet all = instance.all_tids();
  std::size_t min_size = removals.empty() ? 0 : removals.front().size();
  for (const auto& r : removals) min_size = std::min(min_size, r.size());
  std::vector<Repair> out;
  for (const auto& r : removals) out.push_back(Repair{set_difference(all, r), r, r.size() == min_size});
  return out;
}

inline std::vector<Repair> enumerate_c_repairs(const Instance& instance, const DenialConstraint& dc,
                                               const RepairOptions& options = {}) {
  auto all = enumerate_s_repairs(instance, dc, options);
  std::vector<Repair> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), [](const Repair& r) { return r.cardinality_minimal; });
  return out;
}

/// Core as the literal intersection of the kept sets of every S-repair.
inline CoreResult core_naive(const Instance& instance, const DenialConstraint& dc, const RepairOptions& options = {}) {
  auto repairs = enumerate_s_repairs(instance, dc, options);
  TidSet core = instance.all_tids();
  for (const auto& r : repairs) core = set_intersection(core, r.kept);
  return CoreResult{core, CoreMethod::naive_intersection};
}

/// Consistent with the DC, and re-adding any removed tuple violates it.
inline bool is_valid_repair(const Instance& instance, const DenialConstraint& dc, const Repair& repair) {
  TupleMask mask = instance.mask_of(repair.kept);
  if (!dc.satisfied_by(instance, &mask)) return false;
  for (const auto& tid : repair.removed) {
    const std::size_t idx = instance.require_index(tid);
    mask.set(idx);
    const bool still_consistent = dc.satisfied_by(instance, &mask);
    mask.reset(idx);
    if (still_consistent) return false;
  }
  return true;
}

} // namespace qexplain

#endif // QEXPLAIN_REPAIR_HPP
