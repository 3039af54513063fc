#ifndef QEXPLAIN_ERROR_HPP
#define QEXPLAIN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qexplain {

/// Base class of every error raised by the library. `code()` is a stable
/// machine-readable name used in structured CLI error payloads.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

// Malformed instance document or CSV, duplicate tid, arity mismatch.
class InstanceError : public Error {
public:
  explicit InstanceError(const std::string& message) : Error("InstanceError", message) {}
};

// Query text does not follow the grammar, or disagrees with the schema.
class ParseError : public Error {
public:
  explicit ParseError(const std::string& message) : Error("ParseError", message) {}
};

class UnknownTuple : public Error {
public:
  explicit UnknownTuple(const std::string& tid) : Error("UnknownTuple", "unknown tuple id '" + tid + "'") {}
};

class UnknownPredicate : public Error {
public:
  explicit UnknownPredicate(const std::string& pred)
      : Error("UnknownPredicate", "predicate '" + pred + "' is not in the schema") {}
};

class QueryNotSatisfied : public Error {
public:
  QueryNotSatisfied() : Error("QueryNotSatisfied", "the query is false on the instance") {}
};

/// An enumeration would exceed a configured limit (endogenous tuples for
/// the brute-force oracle, simple paths, witnesses).
class BoundExceeded : public Error {
public:
  explicit BoundExceeded(const std::string& message) : Error("BoundExceeded", message) {}
};

class UnsupportedQuery : public Error {
public:
  explicit UnsupportedQuery(const std::string& message) : Error("UnsupportedQuery", message) {}
};

/// A predicate mixes endogenous and exogenous tuples; the polynomial fast
/// path only handles predicates that are entirely one or the other.
class UnsupportedPartition : public Error {
public:
  explicit UnsupportedPartition(const std::string& message) : Error("UnsupportedPartition", message) {}
};

/// A self-join query was handed to an operation that is only exact for
/// self-join-free queries.
class CallerMustUseOracle : public Error {
public:
  explicit CallerMustUseOracle(const std::string& message) : Error("CallerMustUseOracle", message) {}
};

class NoRepair : public Error {
public:
  explicit NoRepair(const std::string& message) : Error("NoRepair", message) {}
};

class PreconditionViolated : public Error {
public:
  explicit PreconditionViolated(const std::string& message) : Error("PreconditionViolated", message) {}
};

// Something the theory says cannot happen did happen.
class InternalError : public Error {
public:
  explicit InternalError(const std::string& message) : Error("InternalError", message) {}
};

} // namespace qexplain

#endif // QEXPLAIN_ERROR_HPP
