#ifndef QEXPLAIN_INSTANCE_HPP
#define QEXPLAIN_INSTANCE_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qexplain/error.hpp"

namespace qexplain {

/// Opaque tuple identifier, unique within an Instance ("t1", "S(b)", ...).
/// Ordering is plain lexicographic on the token; every set-valued result of
/// the library is sorted by it.
class TupleId {
public:
  TupleId() = default;
  explicit TupleId(std::string value) : value_(std::move(value)) {}
  TupleId(const char* value) : value_(value) {}

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const TupleId&, const TupleId&) = default;
  friend bool operator==(const TupleId&, const TupleId&) = default;
  friend std::ostream& operator<<(std::ostream& os, const TupleId& id) { return os << id.value_; }

private:
  std::string value_;
};

using TidSet = std::set<TupleId>;

enum class Provenance { endogenous, exogenous };

struct Tuple {
  TupleId tid;
  std::string predicate;
  std::vector<std::string> values;
  Provenance provenance = Provenance::endogenous;

  bool endogenous() const noexcept { return provenance == Provenance::endogenous; }
  bool exogenous() const noexcept { return provenance == Provenance::exogenous; }

  /// Ground-atom rendering, e.g. `R(c,b)`.
  std::string atom() const {
    std::string out = predicate + "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += ',';
      out += values[i];
    }
    return out + ")";
  }

  friend bool operator==(const Tuple&, const Tuple&) = default;
};

/// predicate name -> arity
using Schema = std::map<std::string, std::size_t>;

/// Characteristic vector over the tuple positions of one Instance. Used to
/// evaluate queries on subinstances without materializing them.
class TupleMask {
public:
  TupleMask() = default;
  TupleMask(std::size_t size, bool value) : bits_(size, value ? 1 : 0) {}

  std::size_t size() const noexcept { return bits_.size(); }
  bool test(std::size_t i) const noexcept { return bits_[i] != 0; }
  void set(std::size_t i, bool value = true) noexcept { bits_[i] = value ? 1 : 0; }
  void reset(std::size_t i) noexcept { bits_[i] = 0; }
  std::size_t count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), char{1}));
  }

  friend bool operator==(const TupleMask&, const TupleMask&) = default;

private:
  std::vector<char> bits_;
};

/// An immutable finite relational instance D = D^n ∪ D^x.
///
/// Tuples are stored sorted by tid; a tuple's position in `tuples()` is its
/// index, which is what TupleMask and the index-based helpers refer to.
/// Construction enforces: every predicate is declared, value lists match the
/// declared arity, tids are unique and no predicate holds the same value
/// list twice (set semantics).
class Instance {
public:
  Instance() = default;

  Instance(Schema schema, std::vector<Tuple> tuples) : schema_(std::move(schema)), tuples_(std::move(tuples)) {
    std::sort(tuples_.begin(), tuples_.end(), [](const Tuple& a, const Tuple& b) { return a.tid < b.tid; });
    std::set<std::pair<std::string, std::vector<std::string>>> seen;
    for (std::size_t i = 0; i < tuples_.size(); ++i) {
      const Tuple& t = tuples_[i];
      if (t.tid.str().empty()) throw InstanceError("empty tuple id");
      if (i > 0 && tuples_[i - 1].tid == t.tid) throw InstanceError("duplicate tuple id '" + t.tid.str() + "'");
      auto arity = schema_.find(t.predicate);
      if (arity == schema_.end())
        throw InstanceError("tuple '" + t.tid.str() + "' uses undeclared predicate '" + t.predicate + "'");
      if (arity->second != t.values.size())
        throw InstanceError("arity mismatch for tuple '" + t.tid.str() + "': predicate " + t.predicate + " has arity " +
                            std::to_string(arity->second) + ", got " + std::to_string(t.values.size()) + " values");
      if (!seen.emplace(t.predicate, t.values).second)
        throw InstanceError("duplicate tuple " + t.atom() + " (tid '" + t.tid.str() + "')");
      index_.emplace(t.tid, i);
      extensions_[t.predicate].push_back(i);
    }
  }

  const Schema& schema() const noexcept { return schema_; }
  std::span<const Tuple> tuples() const noexcept { return tuples_; }
  std::size_t size() const noexcept { return tuples_.size(); }
  bool empty() const noexcept { return tuples_.empty(); }
  const Tuple& tuple(std::size_t index) const { return tuples_.at(index); }

  std::optional<std::size_t> index_of(const TupleId& tid) const {
    auto it = index_.find(tid);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_index(const TupleId& tid) const {
    auto idx = index_of(tid);
    if (!idx) throw UnknownTuple(tid.str());
    return *idx;
  }

  const Tuple& at(const TupleId& tid) const { return tuples_[require_index(tid)]; }
  bool contains(const TupleId& tid) const { return index_.count(tid) != 0; }

  bool has_predicate(std::string_view pred) const { return schema_.find(std::string(pred)) != schema_.end(); }

  /// Indices of the tuples of `pred` (P^D), in tid order. Empty for
  /// predicates declared but without tuples.
  std::span<const std::size_t> extension(const std::string& pred) const {
    auto it = extensions_.find(pred);
    if (it == extensions_.end()) return {};
    return it->second;
  }

  TidSet endogenous_part() const { return collect(Provenance::endogenous); }
  TidSet exogenous_part() const { return collect(Provenance::exogenous); }

  std::vector<std::size_t> endogenous_indices() const { return indices(Provenance::endogenous); }
  std::vector<std::size_t> exogenous_indices() const { return indices(Provenance::exogenous); }

  TidSet all_tids() const {
    TidSet out;
    for (const auto& t : tuples_) out.insert(t.tid);
    return out;
  }

  std::set<std::string> active_domain() const {
    std::set<std::string> dom;
    for (const auto& t : tuples_) dom.insert(t.values.begin(), t.values.end());
    return dom;
  }

  TupleMask full_mask() const { return TupleMask(size(), true); }

  TupleMask mask_of(const TidSet& tids) const {
    TupleMask m(size(), false);
    for (const auto& tid : tids) m.set(require_index(tid));
    return m;
  }

  TidSet tids_of(const TupleMask& mask) const {
    TidSet out;
    for (std::size_t i = 0; i < tuples_.size(); ++i)
      if (mask.test(i)) out.insert(tuples_[i].tid);
    return out;
  }

  template <typename Indices>
  TidSet tids_of_indices(const Indices& idx) const {
    TidSet out;
    for (std::size_t i : idx) out.insert(tuples_.at(i).tid);
    return out;
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.schema_ == b.schema_ && a.tuples_ == b.tuples_;
  }

private:
  TidSet collect(Provenance p) const {
    TidSet out;
    for (const auto& t : tuples_)
      if (t.provenance == p) out.insert(t.tid);
    return out;
  }

  std::vector<std::size_t> indices(Provenance p) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tuples_.size(); ++i)
      if (tuples_[i].provenance == p) out.push_back(i);
    return out;
  }

  Schema schema_;
  std::vector<Tuple> tuples_;
  std::map<TupleId, std::size_t> index_;
  std::map<std::string, std::vector<std::size_t>> extensions_;
};

/// Subinstance with exactly the kept tuples; schema and provenance are
/// preserved. Throws UnknownTuple for tids not in the instance.
inline Instance restrict(const Instance& instance, const TidSet& keep) {
  std::vector<Tuple> kept;
  kept.reserve(keep.size());
  for (const auto& tid : keep) kept.push_back(instance.at(tid));
  return Instance(instance.schema(), std::move(kept));
}

inline TidSet endogenous_part(const Instance& instance) { return instance.endogenous_part(); }
inline TidSet exogenous_part(const Instance& instance) { return instance.exogenous_part(); }

} // namespace qexplain

#endif // QEXPLAIN_INSTANCE_HPP
