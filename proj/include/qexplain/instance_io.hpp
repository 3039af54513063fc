#ifndef QEXPLAIN_INSTANCE_IO_HPP
#define QEXPLAIN_INSTANCE_IO_HPP

// Loaders and serializers for the two instance file formats.
//
// JSON document:
//   {"schema": {"R": 2, "S": 1},
//    "tuples": [{"tid": "t1", "pred": "R", "vals": ["c", "b"], "endo": true}, ...]}
//
// CSV: one file per predicate with header `tid,endo,c1,...,ck`, plus a
// manifest {"schema": {...}, "relations": {"R": "R.csv", ...}} whose paths
// are relative to the manifest.
//
// A missing tid becomes "<pred>_<ordinal>" (1-based position among that
// predicate's tuples in input order); a missing endo flag means endogenous.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qexplain/instance.hpp"

namespace qexplain {

namespace detail {

inline Schema parse_schema(const nlohmann::json& doc) {
  if (!doc.contains("schema") || !doc["schema"].is_object()) throw InstanceError("missing \"schema\" object");
  Schema schema;
  for (const auto& [name, arity] : doc["schema"].items()) {
    if (name.empty()) throw InstanceError("empty predicate name in schema");
    if (!arity.is_number_integer() || arity.get<long long>() < 0)
      throw InstanceError("arity of '" + name + "' must be a non-negative integer");
    schema[name] = arity.get<std::size_t>();
  }
  return schema;
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::string auto_tid(const std::string& pred, std::size_t ordinal) {
  return pred + "_" + std::to_string(ordinal);
}

inline bool parse_flag(std::string text, const std::string& where) {
  for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (text.empty() || text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InstanceError("bad endo flag '" + text + "' " + where);
}

/// RFC-4180-style field splitting: commas, double-quoted fields, "" escapes.
inline std::vector<std::string> split_csv_line(const std::string& line, const std::string& where) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw InstanceError("unterminated quote " + where);
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

} // namespace detail

inline Instance instance_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InstanceError("instance document must be a JSON object");
  Schema schema = detail::parse_schema(doc);
  if (!doc.contains("tuples") || !doc["tuples"].is_array()) throw InstanceError("missing \"tuples\" array");

  std::map<std::string, std::size_t> ordinals;
  std::vector<Tuple> tuples;
  for (const auto& entry : doc["tuples"]) {
    if (!entry.is_object()) throw InstanceError("tuple entries must be objects");
    if (!entry.contains("pred") || !entry["pred"].is_string()) throw InstanceError("tuple without \"pred\"");
    Tuple t;
    t.predicate = entry["pred"].get<std::string>();
    std::size_t ordinal = ++ordinals[t.predicate];
    if (entry.contains("tid")) {
      if (!entry["tid"].is_string()) throw InstanceError("\"tid\" must be a string");
      t.tid = TupleId(entry["tid"].get<std::string>());
    } else {
      t.tid = TupleId(detail::auto_tid(t.predicate, ordinal));
    }
    if (!entry.contains("vals") || !entry["vals"].is_array())
      throw InstanceError("tuple '" + t.tid.str() + "' without \"vals\" array");
    for (const auto& v : entry["vals"]) {
      if (!v.is_string()) throw InstanceError("tuple '" + t.tid.str() + "': constants must be JSON strings");
      t.values.push_back(v.get<std::string>());
    }
    if (entry.contains("endo")) {
      if (!entry["endo"].is_boolean()) throw InstanceError("tuple '" + t.tid.str() + "': \"endo\" must be a boolean");
      t.provenance = entry["endo"].get<bool>() ? Provenance::endogenous : Provenance::exogenous;
    }
    tuples.push_back(std::move(t));
  }
  return Instance(std::move(schema), std::move(tuples));
}

inline Instance instance_from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError(std::string("malformed JSON: ") + e.what());
  }
  return instance_from_json(doc);
}

/// Canonical form: tuples in tid order, every field explicit.
inline nlohmann::json instance_to_json(const Instance& instance) {
  nlohmann::json doc;
  doc["schema"] = nlohmann::json::object();
  for (const auto& [name, arity] : instance.schema()) doc["schema"][name] = arity;
  doc["tuples"] = nlohmann::json::array();
  for (const auto& t : instance.tuples()) {
    doc["tuples"].push_back({{"tid", t.tid.str()}, {"pred", t.predicate}, {"vals", t.values}, {"endo", t.endogenous()}});
  }
  return doc;
}

/// Parses one relation file. `text` is the CSV content, `pred` the relation
/// it holds.
inline std::vector<Tuple> tuples_from_csv(const std::string& text, const std::string& pred, std::size_t arity) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<Tuple> out;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "(" + pred + " line " + std::to_string(line_no) + ")";
    if (detail::trim(line).empty() || detail::trim(line) == "\r") continue;
    auto fields = detail::split_csv_line(line, where);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 2 || fields[0] != "tid" || fields[1] != "endo")
        throw InstanceError("CSV header must start with tid,endo " + where);
      if (fields.size() - 2 != arity)
        throw InstanceError("CSV header declares " + std::to_string(fields.size() - 2) + " columns but " + pred +
                            " has arity " + std::to_string(arity));
      continue;
    }
    if (fields.size() != arity + 2)
      throw InstanceError("expected " + std::to_string(arity + 2) + " fields, got " + std::to_string(fields.size()) +
                          " " + where);
    Tuple t;
    t.predicate = pred;
    t.tid = TupleId(fields[0].empty() ? detail::auto_tid(pred, out.size() + 1) : fields[0]);
    t.provenance = detail::parse_flag(fields[1], where) ? Provenance::endogenous : Provenance::exogenous;
    t.values.assign(fields.begin() + 2, fields.end());
    out.push_back(std::move(t));
  }
  if (!header_seen) throw InstanceError("CSV file for " + pred + " has no header");
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Loads a CSV manifest and its relation files. Predicates declared in the
/// schema but absent from "relations" are empty.
inline Instance load_instance_csv(const std::filesystem::path& manifest_path) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError(std::string("malformed manifest: ") + e.what());
  }
  Schema schema = detail::parse_schema(manifest);
  if (!manifest.contains("relations") || !manifest["relations"].is_object())
    throw InstanceError("manifest without \"relations\" object");
  std::vector<Tuple> tuples;
  for (const auto& [pred, file] : manifest["relations"].items()) {
    auto arity = schema.find(pred);
    if (arity == schema.end()) throw InstanceError("relation file for undeclared predicate '" + pred + "'");
    if (!file.is_string()) throw InstanceError("relation path for '" + pred + "' must be a string");
    auto path = manifest_path.parent_path() / file.get<std::string>();
    auto rel = tuples_from_csv(read_text_file(path), pred, arity->second);
    tuples.insert(tuples.end(), rel.begin(), rel.end());
  }
  return Instance(std::move(schema), std::move(tuples));
}

/// Loads either format: a JSON document with a "relations" member is a CSV
/// manifest, anything else an instance document.
inline Instance load_instance(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError("malformed JSON in '" + path.string() + "': " + e.what());
  }
  if (doc.is_object() && doc.contains("relations")) return load_instance_csv(path);
  return instance_from_json(doc);
}

} // namespace qexplain

#endif // QEXPLAIN_INSTANCE_IO_HPP
