#ifndef QEXPLAIN_SET_FAMILY_HPP
#define QEXPLAIN_SET_FAMILY_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "qexplain/instance.hpp"

namespace qexplain {

using TidFamily = std::vector<TidSet>;

/// Canonical order of set families: by cardinality, then lexicographically
/// by the sorted tids.
inline bool family_less(const TidSet& a, const TidSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline TidFamily normalized(TidFamily family) {
  std::sort(family.begin(), family.end(), family_less);
  family.erase(std::unique(family.begin(), family.end()), family.end());
  return family;
}

inline bool is_subset(const TidSet& a, const TidSet& b) {
  return a.size() <= b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool intersects(const TidSet& a, const TidSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j)
      ++i;
    else
      ++j;
  }
  return false;
}

/// Keeps the inclusion-minimal members (the antichain of minimal sets),
/// normalized.
inline TidFamily minimal_members(TidFamily family) {
  family = normalized(std::move(family));
  TidFamily out;
  for (const auto& s : family) {
    bool dominated = std::any_of(out.begin(), out.end(), [&](const TidSet& m) { return is_subset(m, s); });
    if (!dominated) out.push_back(s);
  }
  return out;
}

inline TidSet set_union(const TidSet& a, const TidSet& b) {
  TidSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline TidSet set_difference(const TidSet& a, const TidSet& b) {
  TidSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline TidSet set_intersection(const TidSet& a, const TidSet& b) {
  TidSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline std::string to_string(const TidSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& t : s) {
    if (!first) out += ", ";
    out += t.str();
    first = false;
  }
  return out + "}";
}

inline std::string to_string(const TidFamily& f) {
  std::string out = "{";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ", ";
    out += to_string(f[i]);
  }
  return out + "}";
}

} // namespace qexplain

#endif // QEXPLAIN_SET_FAMILY_HPP
