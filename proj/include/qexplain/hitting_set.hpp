#ifndef QEXPLAIN_HITTING_SET_HPP
#define QEXPLAIN_HITTING_SET_HPP

// Minimal hitting sets (minimal transversals) of a finite hypergraph.
//
// Enumeration follows the MMCS scheme: branch on the elements of an
// uncovered edge with the fewest candidates, keep for every chosen element a
// count of its critical edges (edges hit only by it), and prune as soon as
// some chosen element loses all of them. Elements already branched on are
// removed from the candidate pool of later siblings, so each minimal hitting
// set is produced exactly once.

#include <algorithm>
#include <cstddef>
#include <map>
#include <vector>

#include "qexplain/set_family.hpp"

namespace qexplain {

class HittingSetEnumerator {
public:
  /// `edges` are sets of element ids in [0, universe).
  HittingSetEnumerator(std::size_t universe, std::vector<std::vector<std::size_t>> edges)
      : edges_(std::move(edges)), incident_(universe), cover_(edges_.size(), 0), critical_(universe, 0),
        chosen_(universe, 0), candidate_(universe, 1) {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      auto& edge = edges_[e];
      std::sort(edge.begin(), edge.end());
      edge.erase(std::unique(edge.begin(), edge.end()), edge.end());
      for (std::size_t v : edge) incident_.at(v).push_back(e);
    }
    uncovered_ = edges_.size();
  }

  /// All minimal hitting sets, each as a sorted element list. An empty edge
  /// cannot be hit, so the result is then empty; no edges yields {∅}.
  std::vector<std::vector<std::size_t>> run() {
    results_.clear();
    for (const auto& edge : edges_)
      if (edge.empty()) return results_;
    search();
    return results_;
  }

private:
  void search() {
    if (uncovered_ == 0) {
      auto s = current_;
      std::sort(s.begin(), s.end());
      results_.push_back(std::move(s));
      return;
    }
    // Uncovered edge with the fewest candidate elements.
    std::size_t best = edges_.size();
    std::size_t best_count = static_cast<std::size_t>(-1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (cover_[e] != 0) continue;
      std::size_t c = 0;
      for (std::size_t v : edges_[e]) c += candidate_[v];
      if (c < best_count) {
        best_count = c;
        best = e;
      }
    }
    if (best_count == 0) return;

    std::vector<std::size_t> branch;
    for (std::size_t v : edges_[best])
      if (candidate_[v]) branch.push_back(v);
    for (std::size_t v : branch) candidate_[v] = 0;
    for (std::size_t v : branch) {
      std::vector<std::size_t> lost;
      add(v, lost);
      bool ok = critical_[v] > 0;
      for (std::size_t s : lost) ok = ok && critical_[s] > 0;
      if (ok) search();
      remove(v);
      candidate_[v] = 1;
    }
    // Siblings re-enabled above; restore the pool exactly as it was.
    for (std::size_t v : branch) candidate_[v] = 1;
  }

  // Adds v to the current set. `lost` receives the chosen elements whose
  // critical count dropped.
  void add(std::size_t v, std::vector<std::size_t>& lost) {
    for (std::size_t e : incident_[v]) {
      if (cover_[e] == 0) {
        ++critical_[v];
        --uncovered_;
      } else if (cover_[e] == 1) {
        std::size_t owner = owner_of(e);
        --critical_[owner];
        lost.push_back(owner);
      }
      ++cover_[e];
    }
    chosen_[v] = 1;
    current_.push_back(v);
  }

  void remove(std::size_t v) {
    current_.pop_back();
    chosen_[v] = 0;
    for (std::size_t e : incident_[v]) {
      --cover_[e];
      if (cover_[e] == 0) {
        --critical_[v];
        ++uncovered_;
      } else if (cover_[e] == 1) {
        ++critical_[owner_of(e)];
      }
    }
  }

  std::size_t owner_of(std::size_t e) const {
    for (std::size_t u : edges_[e])
      if (chosen_[u]) return u;
    return 0;
  }

  std::vector<std::vector<std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<std::size_t> cover_;
  std::vector<std::size_t> critical_;
  std::vector<char> chosen_;
  std::vector<char> candidate_;
  std::vector<std::size_t> current_;
  std::size_t uncovered_ = 0;
  std::vector<std::vector<std::size_t>> results_;
};

/// Minimal hitting sets of a family of tid sets, normalized.
inline TidFamily minimal_hitting_sets(const TidFamily& family) {
  std::map<TupleId, std::size_t> ids;
  std::vector<TupleId> names;
  for (const auto& s : family)
    for (const auto& t : s)
      if (ids.emplace(t, names.size()).second) names.push_back(t);
  std::vector<std::vector<std::size_t>> edges;
  for (const auto& s : family) {
    std::vector<std::size_t> edge;
    for (const auto& t : s) edge.push_back(ids.at(t));
    edges.push_back(std::move(edge));
  }
  TidFamily out;
  for (const auto& hs : HittingSetEnumerator(names.size(), std::move(edges)).run()) {
    TidSet s;
    for (std::size_t v : hs) s.insert(names[v]);
    out.push_back(std::move(s));
  }
  return normalized(std::move(out));
}

inline bool is_hitting_set(const TidSet& candidate, const TidFamily& family) {
  return std::all_of(family.begin(), family.end(), [&](const TidSet& s) { return intersects(candidate, s); });
}

/// Hits every member, and every element has a private member (one hit by
/// that element alone).
inline bool is_minimal_hitting_set(const TidSet& candidate, const TidFamily& family) {
  if (!is_hitting_set(candidate, family)) return false;
  for (const auto& e : candidate) {
    bool has_private = std::any_of(family.begin(), family.end(), [&](const TidSet& s) {
      if (!s.count(e)) return false;
      for (const auto& other : candidate)
        if (other != e && s.count(other)) return false;
      return true;
    });
    if (!has_private) return false;
  }
  return true;
}

} // namespace qexplain

#endif // QEXPLAIN_HITTING_SET_HPP
