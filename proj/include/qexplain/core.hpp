#ifndef QEXPLAIN_CORE_HPP
#define QEXPLAIN_CORE_HPP

// Polynomial-time repair core and minimal sufficient sets for Boolean
// conjunctive queries.
//
// The core is computed from the participating sets R_i (the tuples of P_i
// that some homomorphism maps atom i to) as ⋂_i (D ∖ R_i), in O(|D|^k).
// For self-join-free queries every homomorphism image is a minimal witness,
// and that formula is exact. Under self-joins an image can strictly contain
// a smaller witness, and a tuple that occurs only in such images lies in
// every repair. E.g. for P(x,y) ∧ P(y,y) over {P(a,b), P(b,b)}, P(a,b) is
// in R_1 but the only repair deletes P(b,b) alone. There the participating
// sets only count homomorphisms whose image is minimal. Checking that
// costs 2^k small evaluations per image, so the bound stays O(|D|^k).
//
// Predicates whose whole extension is exogenous are never deleted; their
// atom positions are skipped. Predicates mixing both kinds are rejected.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qexplain/evaluate.hpp"
#include "qexplain/oracle.hpp"
#include "qexplain/repair.hpp"

namespace qexplain {

/// R_i per atom position i.
struct ParticipatingSets {
  std::vector<TidSet> per_atom;

  TidSet all() const {
    TidSet out;
    for (const auto& r : per_atom) out.insert(r.begin(), r.end());
    return out;
  }
};

enum class Participation {
  any_homomorphism,    // t ∈ R_i iff some homomorphism maps atom i to t
  minimal_image_only,  // ... and its endogenous image is a minimal sufficient set
};

namespace detail {

inline bool all_exogenous_predicate(const Instance& instance, const std::string& pred) {
  auto ext = instance.extension(pred);
  return !ext.empty() && std::all_of(ext.begin(), ext.end(), [&](std::size_t i) { return instance.tuple(i).exogenous(); });
}

/// Throws UnsupportedPartition when a query predicate has both endogenous
/// and exogenous tuples.
inline void require_pure_partition(const Instance& instance, const BooleanCQ& q) {
  for (const auto& pred : q.predicates()) {
    bool endo = false;
    bool exo = false;
    for (std::size_t i : instance.extension(pred)) (instance.tuple(i).endogenous() ? endo : exo) = true;
    if (endo && exo)
      throw UnsupportedPartition("predicate " + pred +
                                 " mixes endogenous and exogenous tuples; use the naive core or the oracle");
  }
}

// (E ∖ {e}) ∪ D^x ⊭ Q for every e ∈ E, with E given as tuple indices.
inline bool minimal_sufficient(const BooleanCQ& q, const Instance& instance, const std::vector<std::size_t>& endo_image,
                               const TupleMask& exo_mask) {
  TupleMask m = exo_mask;
  for (std::size_t i : endo_image) m.set(i);
  const Query query{q};
  for (std::size_t e : endo_image) {
    m.reset(e);
    const bool still = evaluate(query, instance, m);
    m.set(e);
    if (still) return false;
  }
  return true;
}

} // namespace detail

/// The participating sets of every atom position, over the whole instance.
/// With `minimal_image_only`, a pinned homomorphism only counts when its
/// image restricted to D^n is a minimal sufficient set.
inline ParticipatingSets participating_sets(const Instance& instance, const BooleanCQ& q,
                                            Participation mode = Participation::any_homomorphism) {
  ParticipatingSets out;
  out.per_atom.resize(q.size());
  TupleMask exo_mask(instance.size(), false);
  for (std::size_t i : instance.exogenous_indices()) exo_mask.set(i);

  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t idx : instance.extension(q.atom(i).predicate)) {
      bool participates = false;
      detail::HomomorphismSearch search(q, instance, nullptr);
      search.run(
          [&](std::span<const std::size_t> image) {
            if (mode == Participation::minimal_image_only) {
              std::vector<std::size_t> endo;
              for (std::size_t j : image)
                if (instance.tuple(j).endogenous() && std::find(endo.begin(), endo.end(), j) == endo.end())
                  endo.push_back(j);
              if (!detail::minimal_sufficient(q, instance, endo, exo_mask)) return true;
            }
            participates = true;
            return false;
          },
          std::make_pair(i, idx));
      if (participates) out.per_atom[i].insert(instance.tuple(idx).tid);
    }
  }
  return out;
}

inline ParticipatingSets participating_sets(const Instance& instance, const Query& query,
                                            Participation mode = Participation::any_homomorphism) {
  return participating_sets(instance, require_cq(query, "participating_sets"), mode);
}

/// Core = ⋂ (D ∖ R_i) over atom positions whose predicate is not entirely
/// exogenous. Agrees with core_naive (endogenous-only repairs when the
/// instance has exogenous tuples).
inline CoreResult core_fast(const Instance& instance, const Query& query) {
  const BooleanCQ& q = require_cq(query, "core_fast");
  check_against_schema(q, instance.schema());
  detail::require_pure_partition(instance, q);
  const auto sets = participating_sets(
      instance, q, q.self_join_free() ? Participation::any_homomorphism : Participation::minimal_image_only);
  TidSet core = instance.all_tids();
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (detail::all_exogenous_predicate(instance, q.atom(i).predicate)) continue;
    core = set_difference(core, sets.per_atom[i]);
  }
  return CoreResult{core, CoreMethod::lemma1};
}

/// (kept ∖ Core) ∪ {t} for t deleted by `repair`; always satisfies the
/// query together with D^x, though not necessarily minimally.
inline ExplanationSet sufficient_set_from(const Instance& instance, const Query& query, const Repair& repair,
                                          const TupleId& t) {
  if (!repair.removed.count(t))
    throw PreconditionViolated("tuple " + t.str() + " is not deleted by the repair, so no sufficient set follows");
  const TidSet core = core_fast(instance, query).tuples;
  TidSet s = set_difference(repair.kept, core);
  s.insert(t);
  ExplanationSet out{s, ExplanationKind::SS};
  if (!verify_explanation(out, instance, query))
    throw InternalError("constructed set " + to_string(s) + " is not sufficient");
  return out;
}

/// Partial binding of atom positions during the chase.
struct ChaseState {
  TupleId seed;
  std::size_t seed_atom = 0;
  std::vector<std::optional<TupleId>> bound;  // per atom position
  std::size_t frontier = 0;                   // next position in binding order
};

struct ChaseOutcome {
  ExplanationSet mss;
  ChaseState state;  // the completed binding the MSS was read off
  TidSet raw;        // endogenous tuples of that binding before the minimality sweep
};

namespace detail {

class Chase {
public:
  Chase(const Instance& instance, const BooleanCQ& q, const TidSet& pool, const TupleId& seed)
      : instance_(instance), q_(q), pool_(pool), seed_(seed), bound_(q.size()) {}

  std::optional<ChaseOutcome> run() {
    const Tuple& t = instance_.at(seed_);
    for (std::size_t pos = 0; pos < q_.size(); ++pos) {
      if (q_.atom(pos).predicate != t.predicate || !match_atom(q_, pos, t)) continue;
      seed_atom_ = pos;
      order_.clear();
      for (std::size_t j = 0; j < q_.size(); ++j)
        if (j != pos) order_.push_back(j);
      std::fill(bound_.begin(), bound_.end(), std::nullopt);
      bound_[pos] = instance_.require_index(seed_);
      if (auto found = extend(0)) return found;
    }
    return std::nullopt;
  }

private:
  std::optional<ChaseOutcome> extend(std::size_t depth) {
    if (depth == order_.size()) return finish();
    const std::size_t atom = order_[depth];
    const bool exogenous_position = all_exogenous_predicate(instance_, q_.atom(atom).predicate);
    for (std::size_t idx : instance_.extension(q_.atom(atom).predicate)) {
      const Tuple& cand = instance_.tuple(idx);
      if (!exogenous_position && !pool_.count(cand.tid)) continue;
      if (!match_atom(q_, atom, cand)) continue;
      bool compatible = true;
      for (std::size_t other = 0; other < q_.size() && compatible; ++other)
        if (bound_[other]) compatible = join_compatible(q_, atom, cand, other, instance_.tuple(*bound_[other]));
      if (!compatible) continue;
      bound_[atom] = idx;
      if (auto found = extend(depth + 1)) return found;
      bound_[atom] = std::nullopt;
    }
    return std::nullopt;
  }

  // Reads the endogenous tuples off a full binding, drops the ones not
  // needed (never the seed), and accepts only if the seed is needed too.
  std::optional<ChaseOutcome> finish() {
    TidSet raw;
    for (const auto& b : bound_)
      if (instance_.tuple(*b).endogenous()) raw.insert(instance_.tuple(*b).tid);
    TidSet s = raw;
    for (const auto& e : raw) {
      if (e == seed_) continue;
      TidSet trial = s;
      trial.erase(e);
      if (detail::sufficient_with_exogenous(Query{q_}, instance_, trial)) s = std::move(trial);
    }
    TidSet without_seed = s;
    without_seed.erase(seed_);
    if (detail::sufficient_with_exogenous(Query{q_}, instance_, without_seed)) return std::nullopt;

    ChaseOutcome out;
    out.mss = ExplanationSet{s, ExplanationKind::MSS};
    out.raw = raw;
    out.state.seed = seed_;
    out.state.seed_atom = seed_atom_;
    out.state.frontier = q_.size();
    for (const auto& b : bound_) out.state.bound.push_back(instance_.tuple(*b).tid);
    return out;
  }

  const Instance& instance_;
  const BooleanCQ& q_;
  const TidSet& pool_;
  TupleId seed_;
  std::size_t seed_atom_ = 0;
  std::vector<std::size_t> order_;
  std::vector<std::optional<std::size_t>> bound_;
};

} // namespace detail

/// Builds an MSS containing t by binding the remaining atom positions to
/// join-compatible tuples outside the core (or, given a repair deleting t,
/// outside the core and inside the repair). Atom positions and candidates
/// are tried in index / tid order with backtracking; the seed goes to the
/// lowest position it matches, later positions only if that one dead-ends.
inline ChaseOutcome chase_mss(const Instance& instance, const Query& query, const TupleId& t,
                              const std::optional<Repair>& repair = std::nullopt) {
  const BooleanCQ& q = require_cq(query, "chase_mss");
  check_against_schema(q, instance.schema());
  detail::require_pure_partition(instance, q);
  const Tuple& seed = instance.at(t);
  if (!seed.endogenous()) throw PreconditionViolated("seed " + t.str() + " is exogenous; MSSs hold endogenous tuples");
  const TidSet core = core_fast(instance, query).tuples;
  if (core.count(t)) throw PreconditionViolated("seed " + t.str() + " is in the repair core and occurs in no witness");

  TidSet pool;
  if (repair) {
    if (!repair->removed.count(t)) throw PreconditionViolated("seed " + t.str() + " is not deleted by the given repair");
    pool = set_difference(repair->kept, core);
  } else {
    pool = set_difference(instance.all_tids(), core);
  }
  pool.insert(t);

  auto found = detail::Chase(instance, q, pool, t).run();
  if (!found) throw InternalError("chase from " + t.str() + " found no minimal sufficient set");
  if (!verify_explanation(found->mss, instance, query))
    throw InternalError("chase result " + to_string(found->mss.tuples) + " failed verification");
  return *found;
}

struct MinMssResult {
  std::optional<ExplanationSet> mss;  // absent when t occurs in no MSS
  Degree sigma;
};

/// Minimum-size MSS (containing t when given) for self-join-free queries,
/// where every chase result has one tuple per endogenous atom and hence
/// minimum size.
inline MinMssResult min_mss_sjf(const Instance& instance, const Query& query,
                                const std::optional<TupleId>& t = std::nullopt) {
  const BooleanCQ& q = require_cq(query, "min_mss_sjf");
  if (!q.self_join_free())
    throw CallerMustUseOracle("the query has self-joins; minimum MSS needs the brute-force oracle");
  check_against_schema(q, instance.schema());
  detail::require_pure_partition(instance, q);
  if (!evaluate(query, instance)) throw QueryNotSatisfied();

  const TidSet core = core_fast(instance, query).tuples;
  std::optional<TupleId> seed = t;
  if (seed) {
    if (!instance.at(*seed).endogenous() || core.count(*seed)) return MinMssResult{std::nullopt, Degree::zero()};
  } else {
    for (const auto& tup : instance.tuples()) {
      if (tup.endogenous() && !core.count(tup.tid)) {
        seed = tup.tid;
        break;
      }
    }
    // Every witness is exogenous: the empty set is the only MSS.
    if (!seed) return MinMssResult{ExplanationSet{{}, ExplanationKind::MSS}, Degree::zero()};
  }
  auto outcome = chase_mss(instance, query, *seed);
  return MinMssResult{outcome.mss, Degree::inverse_of(outcome.mss.tuples.size())};
}

} // namespace qexplain

#endif // QEXPLAIN_CORE_HPP
