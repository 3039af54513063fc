#ifndef QEXPLAIN_QUERY_HPP
#define QEXPLAIN_QUERY_HPP

// Boolean monotone queries: conjunctive queries and the reachability
// built-in, plus the text parser.
//
// Grammar:
//   query := head ":-" atom ("," atom)* "."?
//   head  := ident | ident "(" ")"
//   atom  := ident "(" term ("," term)* ")"
//   term  := ident | number | quoted
// Lowercase identifiers are variables unless they occur in the instance's
// active domain (when one is supplied); quoted tokens and tokens starting
// with a digit or an uppercase letter are constants. The body
// `path(E, src, dst)` alone denotes reachability from src to dst along the
// binary predicate E.

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qexplain/error.hpp"
#include "qexplain/instance.hpp"

namespace qexplain {

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Constant {
  std::string value;
  friend bool operator==(const Constant&, const Constant&) = default;
};

using Term = std::variant<Variable, Constant>;

struct QueryAtom {
  std::string predicate;
  std::vector<Term> args;

  friend bool operator==(const QueryAtom&, const QueryAtom&) = default;
};

namespace detail {

inline bool is_plain_identifier(const std::string& s) {
  if (s.empty() || !(std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline bool is_bare_constant(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return !is_plain_identifier(s);
}

inline std::string render_constant(const std::string& v) {
  if (is_bare_constant(v)) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string render_term(const Term& term) {
  if (const auto* v = std::get_if<Variable>(&term)) return v->name;
  return render_constant(std::get<Constant>(term).value);
}

} // namespace detail

inline std::string to_string(const QueryAtom& atom) {
  std::string out = atom.predicate + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ",";
    out += detail::render_term(atom.args[i]);
  }
  return out + ")";
}

/// A Boolean conjunctive query ∃x̄ (P_1(s̄_1) ∧ ... ∧ P_k(s̄_k)).
///
/// Variables get dense ids in order of first occurrence; `slot(i, p)` is the
/// variable id at argument p of atom i, or -1 for a constant.
class BooleanCQ {
public:
  BooleanCQ() = default;

  explicit BooleanCQ(std::vector<QueryAtom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw ParseError("a conjunctive query needs at least one atom");
    std::map<std::string, int> ids;
    slots_.resize(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      for (const auto& term : atoms_[i].args) {
        if (const auto* v = std::get_if<Variable>(&term)) {
          auto [it, fresh] = ids.emplace(v->name, static_cast<int>(variables_.size()));
          if (fresh) variables_.push_back(v->name);
          slots_[i].push_back(it->second);
        } else {
          slots_[i].push_back(-1);
        }
      }
    }
    std::set<std::string> preds;
    for (const auto& a : atoms_) self_join_free_ = preds.insert(a.predicate).second && self_join_free_;
  }

  const std::vector<QueryAtom>& atoms() const noexcept { return atoms_; }
  const QueryAtom& atom(std::size_t i) const { return atoms_.at(i); }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool self_join_free() const noexcept { return self_join_free_; }
  const std::vector<std::string>& variables() const noexcept { return variables_; }
  int slot(std::size_t atom, std::size_t pos) const { return slots_.at(atom).at(pos); }

  std::set<std::string> predicates() const {
    std::set<std::string> out;
    for (const auto& a : atoms_) out.insert(a.predicate);
    return out;
  }

  friend bool operator==(const BooleanCQ& a, const BooleanCQ& b) { return a.atoms_ == b.atoms_; }

private:
  std::vector<QueryAtom> atoms_;
  std::vector<std::string> variables_;
  std::vector<std::vector<int>> slots_;
  bool self_join_free_ = true;
};

struct ReachabilityQuery {
  std::string edge_predicate;
  std::string source;
  std::string target;

  friend bool operator==(const ReachabilityQuery&, const ReachabilityQuery&) = default;
};

using Query = std::variant<BooleanCQ, ReachabilityQuery>;

inline std::string to_string(const BooleanCQ& q) {
  std::string out = "q :- ";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) out += ", ";
    out += to_string(q.atom(i));
  }
  return out + ".";
}

inline std::string to_string(const ReachabilityQuery& q) {
  return "q :- path(" + q.edge_predicate + ", " + detail::render_constant(q.source) + ", " +
         detail::render_constant(q.target) + ").";
}

inline std::string to_string(const Query& q) {
  return std::visit([](const auto& v) { return to_string(v); }, q);
}

inline const BooleanCQ& require_cq(const Query& q, const char* operation) {
  if (const auto* cq = std::get_if<BooleanCQ>(&q)) return *cq;
  throw UnsupportedQuery(std::string(operation) + " is defined for conjunctive queries only, not reachability");
}

/// Throws UnknownPredicate / ParseError when the query does not fit the
/// schema.
inline void check_against_schema(const BooleanCQ& cq, const Schema& schema) {
  for (const auto& a : cq.atoms()) {
    auto it = schema.find(a.predicate);
    if (it == schema.end()) throw UnknownPredicate(a.predicate);
    if (it->second != a.args.size())
      throw ParseError("arity mismatch: " + to_string(a) + " but " + a.predicate + " has arity " +
                       std::to_string(it->second));
  }
}

inline void check_against_schema(const ReachabilityQuery& r, const Schema& schema) {
  auto it = schema.find(r.edge_predicate);
  if (it == schema.end()) throw UnknownPredicate(r.edge_predicate);
  if (it->second != 2)
    throw ParseError("path/3 needs a binary edge predicate, " + r.edge_predicate + " has arity " +
                     std::to_string(it->second));
}

inline void check_against_schema(const Query& query, const Schema& schema) {
  std::visit([&](const auto& q) { check_against_schema(q, schema); }, query);
}

namespace detail {

class QueryParser {
public:
  QueryParser(const std::string& text, const std::set<std::string>* domain) : text_(text), domain_(domain) {}

  Query parse() {
    expect_identifier("query head");
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      skip_ws();
      if (peek() != ')') throw error("free variables in the head; only Boolean queries are supported");
      ++pos_;
    }
    skip_ws();
    if (text_.compare(pos_, 2, ":-") != 0) throw error("expected ':-'");
    pos_ += 2;

    std::vector<RawAtom> body;
    do {
      body.push_back(parse_atom());
      skip_ws();
    } while (consume(','));
    skip_ws();
    consume('.');
    skip_ws();
    if (pos_ != text_.size()) throw error("unexpected trailing input");

    for (const auto& a : body) {
      if (a.predicate == "path" && a.args.size() == 3) {
        if (body.size() != 1) throw error("path/3 must be the only atom of the body");
        if (a.args[0].quoted || !is_identifier_token(a.args[0].text))
          throw error("first argument of path/3 must be a predicate name");
        return ReachabilityQuery{a.args[0].text, a.args[1].text, a.args[2].text};
      }
    }

    std::vector<QueryAtom> atoms;
    for (const auto& a : body) {
      QueryAtom atom{a.predicate, {}};
      for (const auto& tok : a.args) atom.args.push_back(classify(tok));
      atoms.push_back(std::move(atom));
    }
    return BooleanCQ(std::move(atoms));
  }

private:
  struct RawToken {
    std::string text;
    bool quoted = false;
  };
  struct RawAtom {
    std::string predicate;
    std::vector<RawToken> args;
  };

  static bool is_identifier_token(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
  }

  Term classify(const RawToken& tok) const {
    if (tok.quoted) return Constant{tok.text};
    if (is_plain_identifier(tok.text) && !(domain_ && domain_->count(tok.text))) return Variable{tok.text};
    return Constant{tok.text};
  }

  RawAtom parse_atom() {
    skip_ws();
    RawAtom atom;
    atom.predicate = expect_identifier("predicate name");
    skip_ws();
    if (!consume('(')) throw error("expected '(' after " + atom.predicate);
    skip_ws();
    if (peek() == ')') throw error("atom " + atom.predicate + " has no arguments");
    do {
      skip_ws();
      atom.args.push_back(parse_term());
      skip_ws();
    } while (consume(','));
    if (!consume(')')) throw error("expected ')' in atom " + atom.predicate);
    return atom;
  }

  RawToken parse_term() {
    char c = peek();
    if (c == '"' || c == '\'') {
      const char quote = c;
      ++pos_;
      std::string value;
      while (pos_ < text_.size() && text_[pos_] != quote) {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        value += text_[pos_++];
      }
      if (pos_ >= text_.size()) throw error("unterminated quoted constant");
      ++pos_;
      return {value, true};
    }
    std::string tok;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      tok += text_[pos_++];
    if (tok.empty()) throw error("expected a term");
    return {tok, false};
  }

  std::string expect_identifier(const std::string& what) {
    skip_ws();
    std::string tok;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      tok += text_[pos_++];
    if (!is_identifier_token(tok)) throw error("expected " + what);
    return tok;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  ParseError error(const std::string& msg) const {
    return ParseError(msg + " at offset " + std::to_string(pos_) + " in '" + text_ + "'");
  }

  const std::string& text_;
  const std::set<std::string>* domain_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Parses without an instance: every lowercase identifier is a variable.
inline Query parse_query(const std::string& text) { return detail::QueryParser(text, nullptr).parse(); }

/// Parses against an instance: lowercase identifiers from the active domain
/// are constants, and predicates/arities are checked against the schema.
inline Query parse_query(const std::string& text, const Instance& instance) {
  const auto domain = instance.active_domain();
  Query q = detail::QueryParser(text, &domain).parse();
  check_against_schema(q, instance.schema());
  return q;
}

} // namespace qexplain

#endif // QEXPLAIN_QUERY_HPP
