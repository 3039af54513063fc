#ifndef QEXPLAIN_LINEAGE_HPP
#define QEXPLAIN_LINEAGE_HPP

// Monotone DNF lineage of a Boolean conjunctive query: one conjunct per
// minimal witness, one propositional variable per tuple (named by tid).

#include <string>
#include <vector>

#include <json.hpp>

#include "qexplain/evaluate.hpp"

namespace qexplain {

/// Disjunction of conjunctions of positive tuple variables. No clauses is
/// the constant false; an empty clause makes the formula constant true.
struct LineageFormula {
  TidFamily clauses;

  bool is_false() const { return clauses.empty(); }
  bool is_true() const {
    return std::any_of(clauses.begin(), clauses.end(), [](const TidSet& c) { return c.empty(); });
  }

  /// Truth value under the valuation making exactly `true_vars` true.
  bool evaluate(const TidSet& true_vars) const {
    return std::any_of(clauses.begin(), clauses.end(), [&](const TidSet& c) { return is_subset(c, true_vars); });
  }

  TidSet variables() const {
    TidSet out;
    for (const auto& c : clauses) out.insert(c.begin(), c.end());
    return out;
  }

  std::size_t width() const {
    std::size_t w = 0;
    for (const auto& c : clauses) w = std::max(w, c.size());
    return w;
  }

  std::string to_string() const {
    if (is_false()) return "false";
    std::string out;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      if (i) out += " ∨ ";
      if (clauses[i].empty()) {
        out += "true";
        continue;
      }
      out += "(";
      bool first = true;
      for (const auto& t : clauses[i]) {
        if (!first) out += " ∧ ";
        first = false;
        out += "X[" + t.str() + "]";
      }
      out += ")";
    }
    return out;
  }

  friend bool operator==(const LineageFormula&, const LineageFormula&) = default;
};

inline LineageFormula lineage_of(const Instance& instance, const Query& query) {
  const BooleanCQ& q = require_cq(query, "lineage_of");
  return LineageFormula{witness_family(Query{q}, instance)};
}

/// Fixes every exogenous variable to true and drops it from its clauses.
/// With `absorb`, clauses that end up containing another one are removed,
/// leaving an antichain.
inline LineageFormula eliminate_exogenous(const LineageFormula& formula, const Instance& instance, bool absorb = true) {
  TidFamily reduced;
  for (const auto& c : formula.clauses) {
    TidSet kept;
    for (const auto& t : c)
      if (instance.at(t).endogenous()) kept.insert(t);
    reduced.push_back(std::move(kept));
  }
  if (absorb) return LineageFormula{minimal_members(std::move(reduced))};
  // Without absorption only exact duplicates go.
  TidFamily out;
  for (auto& c : reduced)
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  return LineageFormula{std::move(out)};
}

/// Subset-minimal sets of variables that make the formula true. For a
/// monotone DNF these are the inclusion-minimal clauses.
inline TidFamily minimal_models(const LineageFormula& formula) { return minimal_members(formula.clauses); }

inline nlohmann::json lineage_to_json(const LineageFormula& formula) {
  nlohmann::json clauses = nlohmann::json::array();
  for (const auto& c : formula.clauses) {
    nlohmann::json clause = nlohmann::json::array();
    for (const auto& t : c) clause.push_back(t.str());
    clauses.push_back(std::move(clause));
  }
  return nlohmann::json{{"clauses", std::move(clauses)}};
}

inline LineageFormula lineage_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("clauses") || !doc["clauses"].is_array())
    throw ParseError("lineage document needs a \"clauses\" array");
  LineageFormula out;
  for (const auto& clause : doc["clauses"]) {
    if (!clause.is_array()) throw ParseError("each clause must be an array of tuple ids");
    TidSet c;
    for (const auto& v : clause) {
      if (!v.is_string()) throw ParseError("tuple ids in clauses must be strings");
      c.insert(TupleId(v.get<std::string>()));
    }
    out.clauses.push_back(std::move(c));
  }
  return out;
}

} // namespace qexplain

#endif // QEXPLAIN_LINEAGE_HPP
