#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>

#include "qexplain/qexplain.hpp"

#ifndef QEXPLAIN_DATA_DIR
#error "QEXPLAIN_DATA_DIR must point at the data/ directory"
#endif

namespace fixtures {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(QEXPLAIN_DATA_DIR) / name;
}

inline qexplain::Instance load(const std::string& name) { return qexplain::load_instance(data_path(name)); }

inline qexplain::TidSet ids(std::initializer_list<const char*> tids) {
  qexplain::TidSet out;
  for (const char* t : tids) out.insert(qexplain::TupleId(t));
  return out;
}

inline const char* const srs_query = "q :- S(x), R(x,y), S(y).";
inline const char* const rt_query = "q :- R(x,y), T(y).";
inline const char* const self_join_query = "q :- R(x,y), R(y,z), S(x,y).";
inline const char* const graph_query = "q :- path(E, a, b).";
inline const char* const st_query = "q :- path(E, s, t).";

} // namespace fixtures
