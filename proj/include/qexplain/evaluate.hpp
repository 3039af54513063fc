#ifndef QEXPLAIN_EVALUATE_HPP
#define QEXPLAIN_EVALUATE_HPP

// Query evaluation over instances and masked subinstances, homomorphism
// and witness enumeration, denial constraints, and subtuple restriction.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qexplain/instance.hpp"
#include "qexplain/query.hpp"
#include "qexplain/set_family.hpp"

namespace qexplain {

struct EnumerationOptions {
  /// Upper bound on simple paths enumerated for reachability witnesses.
  std::size_t max_paths = 100000;
};

/// A subset-minimal subinstance satisfying the query. `assignment` is the
/// first homomorphism found for it (empty for reachability).
struct Witness {
  std::map<std::string, std::string> assignment;
  TidSet tuples;

  friend bool operator==(const Witness&, const Witness&) = default;
};

namespace detail {

/// Backtracking homomorphism search for one conjunctive query. Atoms are
/// bound in textual order and candidates tried in tid order. A mask
/// restricts the usable tuples; an optional pin fixes one atom to a tuple.
class HomomorphismSearch {
public:
  HomomorphismSearch(const BooleanCQ& query, const Instance& instance, const TupleMask* mask)
      : query_(query), instance_(instance), mask_(mask), binding_(query.variables().size(), nullptr),
        image_(query.size(), 0) {
    check_against_schema(query, instance.schema());
  }

  /// Calls `visit(image)` for each homomorphism, where image[i] is the tuple
  /// index assigned to atom i. Stops when `visit` returns false. Returns
  /// false iff stopped early.
  template <typename Visit>
  bool run(Visit&& visit, std::optional<std::pair<std::size_t, std::size_t>> pin = std::nullopt) {
    order_.clear();
    const std::size_t mark = trail_.size();
    if (pin) {
      if (pin->first >= query_.size()) throw PreconditionViolated("atom position out of range");
      if (mask_ && !mask_->test(pin->second)) return true;
      if (instance_.tuple(pin->second).predicate != query_.atom(pin->first).predicate) return true;
      if (!bind(pin->first, pin->second)) {
        unbind(mark);
        return true;
      }
      image_[pin->first] = pin->second;
    }
    for (std::size_t i = 0; i < query_.size(); ++i)
      if (!pin || i != pin->first) order_.push_back(i);
    bool complete = descend(0, visit);
    unbind(mark);
    return complete;
  }

  const std::vector<const std::string*>& binding() const { return binding_; }

private:
  template <typename Visit>
  bool descend(std::size_t depth, Visit& visit) {
    if (depth == order_.size()) return visit(std::span<const std::size_t>(image_));
    const std::size_t atom = order_[depth];
    for (std::size_t idx : instance_.extension(query_.atom(atom).predicate)) {
      if (mask_ && !mask_->test(idx)) continue;
      const std::size_t mark = trail_.size();
      if (bind(atom, idx)) {
        image_[atom] = idx;
        bool go_on = descend(depth + 1, visit);
        unbind(mark);
        if (!go_on) return false;
      } else {
        unbind(mark);
      }
    }
    return true;
  }

  bool bind(std::size_t atom, std::size_t idx) {
    const Tuple& t = instance_.tuple(idx);
    const QueryAtom& a = query_.atom(atom);
    for (std::size_t p = 0; p < a.args.size(); ++p) {
      const int var = query_.slot(atom, p);
      if (var < 0) {
        if (std::get<Constant>(a.args[p]).value != t.values[p]) return false;
      } else if (binding_[var]) {
        if (*binding_[var] != t.values[p]) return false;
      } else {
        binding_[var] = &t.values[p];
        trail_.push_back(static_cast<std::size_t>(var));
      }
    }
    return true;
  }

  void unbind(std::size_t mark) {
    while (trail_.size() > mark) {
      binding_[trail_.back()] = nullptr;
      trail_.pop_back();
    }
  }

  const BooleanCQ& query_;
  const Instance& instance_;
  const TupleMask* mask_;
  std::vector<const std::string*> binding_;
  std::vector<std::size_t> image_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> trail_;
};

inline bool reachable(const ReachabilityQuery& q, const Instance& instance, const TupleMask* mask) {
  check_against_schema(q, instance.schema());
  std::map<std::string, std::vector<std::string>> succ;
  for (std::size_t idx : instance.extension(q.edge_predicate)) {
    if (mask && !mask->test(idx)) continue;
    const auto& v = instance.tuple(idx).values;
    succ[v[0]].push_back(v[1]);
  }
  // At least one edge is required, so the source is not trivially reached.
  std::set<std::string> seen;
  std::deque<std::string> todo;
  for (const auto& n : succ[q.source])
    if (seen.insert(n).second) todo.push_back(n);
  while (!todo.empty()) {
    auto node = std::move(todo.front());
    todo.pop_front();
    if (node == q.target) return true;
    for (const auto& n : succ[node])
      if (seen.insert(n).second) todo.push_back(n);
  }
  return false;
}

} // namespace detail

/// Calls `visit(image)` for every homomorphism of the query body into the
/// (masked) instance; image[i] is the tuple index bound to atom i.
template <typename Visit>
void for_each_homomorphism(const BooleanCQ& query, const Instance& instance, const TupleMask* mask, Visit&& visit) {
  detail::HomomorphismSearch(query, instance, mask).run(visit);
}

inline bool evaluate(const Query& query, const Instance& instance, const TupleMask* mask = nullptr) {
  if (const auto* cq = std::get_if<BooleanCQ>(&query)) {
    bool found = false;
    detail::HomomorphismSearch(*cq, instance, mask).run([&](std::span<const std::size_t>) {
      found = true;
      return false;
    });
    return found;
  }
  return detail::reachable(std::get<ReachabilityQuery>(query), instance, mask);
}

inline bool evaluate(const Query& query, const Instance& instance, const TupleMask& mask) {
  return evaluate(query, instance, &mask);
}

/// True when the query holds on the subinstance made of `tids`.
inline bool evaluate_on(const Query& query, const Instance& instance, const TidSet& tids) {
  return evaluate(query, instance, instance.mask_of(tids));
}

namespace detail {

inline std::vector<Witness> cq_witnesses(const BooleanCQ& q, const Instance& instance) {
  std::map<TidSet, std::map<std::string, std::string>> images;
  HomomorphismSearch search(q, instance, nullptr);
  search.run([&](std::span<const std::size_t> image) {
    TidSet tids = instance.tids_of_indices(image);
    if (images.count(tids) == 0) {
      std::map<std::string, std::string> assignment;
      for (std::size_t v = 0; v < q.variables().size(); ++v) assignment[q.variables()[v]] = *search.binding()[v];
      images.emplace(std::move(tids), std::move(assignment));
    }
    return true;
  });
  TidFamily all;
  for (const auto& [tids, _] : images) all.push_back(tids);
  std::vector<Witness> out;
  for (auto& tids : minimal_members(std::move(all))) out.push_back(Witness{images.at(tids), tids});
  return out;
}

inline std::vector<Witness> path_witnesses(const ReachabilityQuery& q, const Instance& instance,
                                           const EnumerationOptions& options) {
  check_against_schema(q, instance.schema());
  std::map<std::string, std::vector<std::size_t>> out_edges;
  for (std::size_t idx : instance.extension(q.edge_predicate)) out_edges[instance.tuple(idx).values[0]].push_back(idx);

  std::vector<Witness> found;
  std::set<std::string> visited{q.source};
  std::vector<std::size_t> path;
  std::function<void(const std::string&)> walk = [&](const std::string& node) {
    for (std::size_t idx : out_edges[node]) {
      const std::string& next = instance.tuple(idx).values[1];
      path.push_back(idx);
      if (next == q.target) {
        if (found.size() >= options.max_paths)
          throw BoundExceeded("more than " + std::to_string(options.max_paths) + " simple paths");
        found.push_back(Witness{{}, instance.tids_of_indices(path)});
      } else if (!visited.count(next)) {
        visited.insert(next);
        walk(next);
        visited.erase(next);
      }
      path.pop_back();
    }
  };
  walk(q.source);
  return found;
}

} // namespace detail

/// All subset-minimal witnesses, sorted by (size, tids). For reachability
/// these are the edge sets of the simple source-to-target paths.
inline std::vector<Witness> enumerate_witnesses(const Query& query, const Instance& instance,
                                                const EnumerationOptions& options = {}) {
  std::vector<Witness> out;
  if (const auto* cq = std::get_if<BooleanCQ>(&query))
    out = detail::cq_witnesses(*cq, instance);
  else
    out = detail::path_witnesses(std::get<ReachabilityQuery>(query), instance, options);
  std::sort(out.begin(), out.end(), [](const Witness& a, const Witness& b) { return family_less(a.tuples, b.tuples); });
  return out;
}

inline TidFamily witness_family(const Query& query, const Instance& instance, const EnumerationOptions& options = {}) {
  TidFamily out;
  for (auto& w : enumerate_witnesses(query, instance, options)) out.push_back(std::move(w.tuples));
  return out;
}

/// ¬∃x̄ (P_1(s̄_1) ∧ ... ∧ P_k(s̄_k)): satisfied exactly when the query is
/// false.
struct DenialConstraint {
  BooleanCQ body;

  bool satisfied_by(const Instance& instance, const TupleMask* mask = nullptr) const {
    return !evaluate(Query{body}, instance, mask);
  }

  std::string to_string() const {
    std::string out = "¬";
    for (const auto& v : body.variables()) out += "∃" + v;
    out += body.variables().empty() ? "(" : " (";
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i) out += " ∧ ";
      out += qexplain::to_string(body.atom(i));
    }
    return out + ")";
  }

  friend bool operator==(const DenialConstraint&, const DenialConstraint&) = default;
};

inline DenialConstraint denial_constraint_of(const Query& query) {
  return DenialConstraint{require_cq(query, "denial_constraint_of")};
}

/// Variable -> value pairs, in order of first occurrence in the source atom.
using PartialAssignment = std::vector<std::pair<std::string, std::string>>;

/// The assignment a tuple induces on an atom, or nullopt when the tuple does
/// not match (wrong predicate, constant clash, repeated-variable clash).
inline std::optional<std::map<std::string, std::string>> match_atom(const BooleanCQ& query, std::size_t atom,
                                                                     const Tuple& tuple) {
  if (atom >= query.size()) throw PreconditionViolated("atom position out of range");
  const QueryAtom& a = query.atom(atom);
  if (a.predicate != tuple.predicate || a.args.size() != tuple.values.size()) return std::nullopt;
  std::map<std::string, std::string> out;
  for (std::size_t p = 0; p < a.args.size(); ++p) {
    if (const auto* c = std::get_if<Constant>(&a.args[p])) {
      if (c->value != tuple.values[p]) return std::nullopt;
      continue;
    }
    const auto& name = std::get<Variable>(a.args[p]).name;
    auto [it, fresh] = out.emplace(name, tuple.values[p]);
    if (!fresh && it->second != tuple.values[p]) return std::nullopt;
  }
  return out;
}

/// s|_t: the values of `s` (bound at atom `atom_s`) at the variables it
/// shares with atom `atom_t`. For S(x,y,z) ∧ T(x,z,u,v) and s = S(0,1,2),
/// s|_t = (x:0, z:2).
inline PartialAssignment subtuple_restriction(const BooleanCQ& query, std::size_t atom_s, const Tuple& s,
                                              std::size_t atom_t) {
  if (atom_s >= query.size() || atom_t >= query.size()) throw PreconditionViolated("atom position out of range");
  if (atom_s == atom_t) throw PreconditionViolated("subtuple restriction needs two distinct atom positions");
  const QueryAtom& a = query.atom(atom_s);
  if (s.values.size() != a.args.size()) throw PreconditionViolated("tuple arity does not match atom");
  std::set<std::string> other;
  for (const auto& term : query.atom(atom_t).args)
    if (const auto* v = std::get_if<Variable>(&term)) other.insert(v->name);
  PartialAssignment out;
  std::set<std::string> seen;
  for (std::size_t p = 0; p < a.args.size(); ++p) {
    const auto* v = std::get_if<Variable>(&a.args[p]);
    if (v && other.count(v->name) && seen.insert(v->name).second) out.emplace_back(v->name, s.values[p]);
  }
  return out;
}

/// s|_t = t|_s, compared variable by variable.
inline bool join_compatible(const BooleanCQ& query, std::size_t atom_s, const Tuple& s, std::size_t atom_t,
                            const Tuple& t) {
  auto lhs = subtuple_restriction(query, atom_s, s, atom_t);
  auto rhs = subtuple_restriction(query, atom_t, t, atom_s);
  std::map<std::string, std::string> l(lhs.begin(), lhs.end());
  std::map<std::string, std::string> r(rhs.begin(), rhs.end());
  return l == r;
}

} // namespace qexplain

#endif // QEXPLAIN_EVALUATE_HPP
