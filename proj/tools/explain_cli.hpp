#pragma once

// The `explain` command line. Kept in a header so the tests can drive
// run() in-process with string streams.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qexplain/qexplain.hpp"

namespace explain_cli {

namespace qx = qexplain;
using json = nlohmann::json;

struct Settings {
  std::string instance_path;
  std::string query_text;
  std::string query_file;
  std::string format = "json";
  std::optional<std::size_t> max_endo;
  std::size_t max_paths = 100000;
  unsigned jobs = 1;
  bool timing = false;

  bool oracle = false;
  bool chase = false;
  bool minimum = false;
  std::string tuple;
  std::optional<std::size_t> repair_index;
  bool cardinality = false;
  bool endogenous_only = false;
  std::string core_method = "lemma1";
  bool eliminate_exogenous = false;
  bool no_absorb = false;
};

inline std::string fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

inline json set_json(const qx::TidSet& s) {
  json out = json::array();
  for (const auto& t : s) out.push_back(t.str());
  return out;
}

inline json family_json(const qx::TidFamily& f) {
  json out = json::array();
  for (const auto& s : qx::normalized(f)) out.push_back(set_json(s));
  return out;
}

inline std::string set_text(const qx::TidSet& s) { return qx::to_string(s); }

/// Plain aligned text table.
struct Table {
  std::string title;
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;

  void render(std::ostream& out) const {
    std::vector<std::size_t> width(headers.size(), 0);
    auto cells = [](const std::string& s) {
      // Display width: count code points, not bytes.
      std::size_t n = 0;
      for (unsigned char c : s) n += (c & 0xC0) != 0x80;
      return n;
    };
    for (std::size_t c = 0; c < headers.size(); ++c) width[c] = cells(headers[c]);
    for (const auto& r : rows)
      for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], cells(r[c]));
    auto line = [&](const std::vector<std::string>& r) {
      std::string s;
      for (std::size_t c = 0; c < headers.size(); ++c) {
        const std::string v = c < r.size() ? r[c] : "";
        s += (c ? " | " : "") + v;
        if (c + 1 < headers.size()) s += std::string(width[c] - cells(v), ' ');
      }
      out << s << '\n';
    };
    if (!title.empty()) out << title << '\n';
    line(headers);
    std::string rule;
    for (std::size_t c = 0; c < headers.size(); ++c) rule += (c ? "-+-" : "") + std::string(width[c], '-');
    out << rule << '\n';
    for (const auto& r : rows) line(r);
  }
};

struct Outcome {
  json result;
  std::vector<Table> tables;
};

struct Context {
  const Settings& settings;
  qx::Instance instance;
  qx::Query query;
  qx::OracleOptions oracle;
};

inline Table family_table(const std::string& title, const qx::TidFamily& family) {
  Table t{title, {"#", "size", "tuples"}, {}};
  std::size_t i = 0;
  for (const auto& s : qx::normalized(family)) t.rows.push_back({std::to_string(++i), std::to_string(s.size()), set_text(s)});
  return t;
}

inline Outcome cmd_eval(Context& c) {
  const bool holds = qx::evaluate(c.query, c.instance);
  return {{{"holds", holds}}, {Table{"", {"query", "holds"}, {{qx::to_string(c.query), holds ? "true" : "false"}}}}};
}

inline Outcome cmd_witnesses(Context& c) {
  qx::EnumerationOptions e;
  e.max_paths = c.settings.max_paths;
  auto ws = qx::enumerate_witnesses(c.query, c.instance, e);
  json arr = json::array();
  Table t{"", {"#", "tuples", "assignment"}, {}};
  std::size_t i = 0;
  for (const auto& w : ws) {
    json a = json::object();
    std::string at;
    for (const auto& [var, val] : w.assignment) {
      a[var] = val;
      at += (at.empty() ? "" : ", ") + var + "=" + val;
    }
    arr.push_back({{"tuples", set_json(w.tuples)}, {"assignment", a}});
    t.rows.push_back({std::to_string(++i), set_text(w.tuples), at});
  }
  return {{{"witnesses", arr}}, {t}};
}

inline qx::TidFamily minimum_only(const qx::TidFamily& f) {
  if (f.empty()) return f;
  std::size_t best = f.front().size();
  for (const auto& s : f) best = std::min(best, s.size());
  qx::TidFamily out;
  for (const auto& s : f)
    if (s.size() == best) out.push_back(s);
  return out;
}

inline Outcome cmd_mss(Context& c) {
  const Settings& s = c.settings;
  if (!s.chase) {
    auto fam = qx::tuples_of(qx::enumerate_mss(c.instance, c.query, c.oracle));
    if (s.minimum) fam = minimum_only(fam);
    return {{{"method", "oracle"}, {"minimum_only", s.minimum}, {"sets", family_json(fam)}},
            {family_table(s.minimum ? "minimum sufficient sets" : "minimal sufficient sets", fam)}};
  }
  if (s.minimum) {
    std::optional<qx::TupleId> t;
    if (!s.tuple.empty()) t = qx::TupleId(s.tuple);
    auto r = qx::min_mss_sjf(c.instance, c.query, t);
    json res{{"method", "min-sjf"},
             {"tuple", t ? json(t->str()) : json(nullptr)},
             {"set", r.mss ? set_json(r.mss->tuples) : json(nullptr)},
             {"sigma", r.sigma.to_string()}};
    Table tab{"", {"tuple", "set", "sigma"}, {{t ? t->str() : "-", r.mss ? set_text(r.mss->tuples) : "-", r.sigma.to_string()}}};
    return {res, {tab}};
  }

  std::optional<qx::Repair> repair;
  if (s.repair_index) {
    qx::RepairOptions ro;
    ro.enumeration.max_paths = s.max_paths;
    auto reps = qx::enumerate_s_repairs(c.instance, qx::denial_constraint_of(c.query), ro);
    if (*s.repair_index >= reps.size())
      throw qx::PreconditionViolated("repair index " + std::to_string(*s.repair_index) + " out of range (" +
                                     std::to_string(reps.size()) + " S-repairs)");
    repair = reps[*s.repair_index];
  }
  qx::TupleId seed;
  if (!s.tuple.empty()) {
    seed = qx::TupleId(s.tuple);
  } else {
    // Any tuple outside the core (or deleted by the chosen repair) will do.
    const qx::TidSet core = qx::core_fast(c.instance, c.query).tuples;
    for (const auto& t : c.instance.tuples()) {
      if (!t.endogenous() || core.count(t.tid) || (repair && !repair->removed.count(t.tid))) continue;
      seed = t.tid;
      break;
    }
    if (seed.str().empty()) throw qx::PreconditionViolated("no endogenous tuple outside the core to start from");
  }
  auto outcome = qx::chase_mss(c.instance, c.query, seed, repair);
  json binding = json::array();
  Table bt{"binding", {"atom", "tuple"}, {}};
  const auto& cq = std::get<qx::BooleanCQ>(c.query);
  for (std::size_t i = 0; i < outcome.state.bound.size(); ++i) {
    binding.push_back(outcome.state.bound[i]->str());
    bt.rows.push_back({qx::to_string(cq.atom(i)), outcome.state.bound[i]->str()});
  }
  json res{{"method", "chase"},
           {"seed", seed.str()},
           {"seed_atom", outcome.state.seed_atom},
           {"binding", binding},
           {"raw", set_json(outcome.raw)},
           {"set", set_json(outcome.mss.tuples)},
           {"size", outcome.mss.tuples.size()}};
  if (repair) res["repair_removed"] = set_json(repair->removed);
  Table rt{"", {"seed", "set", "size"}, {{seed.str(), set_text(outcome.mss.tuples), std::to_string(outcome.mss.tuples.size())}}};
  return {res, {rt, bt}};
}

inline Outcome cmd_mns(Context& c) {
  auto fam = qx::tuples_of(qx::enumerate_mns(c.instance, c.query, c.oracle));
  if (c.settings.minimum) fam = minimum_only(fam);
  return {{{"minimum_only", c.settings.minimum}, {"sets", family_json(fam)}},
          {family_table(c.settings.minimum ? "minimum necessary sets" : "minimal necessary sets", fam)}};
}

inline Outcome cmd_degrees(Context& c) {
  auto report = qx::degrees(c.instance, c.query, c.oracle);
  json arr = json::array();
  Table t{"", {"tid", "atom", "endo", "eta", "sigma", "rho", "strong-nec", "strong-suf"}, {}};
  for (const auto& d : report.tuples) {
    arr.push_back({{"tid", d.tid.str()},
                   {"endogenous", d.endogenous},
                   {"eta", d.eta.to_string()},
                   {"sigma", d.sigma.to_string()},
                   {"rho", d.rho.to_string()},
                   {"strong_necessary", d.strong_necessary},
                   {"strong_sufficient", d.strong_sufficient}});
    t.rows.push_back({d.tid.str(), c.instance.at(d.tid).atom(), d.endogenous ? "n" : "x", d.eta.to_string(),
                      d.sigma.to_string(), d.rho.to_string(), d.strong_necessary ? "yes" : "no",
                      d.strong_sufficient ? "yes" : "no"});
  }
  return {{{"tuples", arr}}, {t}};
}

inline Outcome cmd_causes(Context& c) {
  auto report = qx::actual_causes(c.instance, c.query, c.oracle);
  json arr = json::array();
  Table t{"", {"tid", "responsibility", "minimal contingency sets"}, {}};
  for (const auto& [tid, conts] : report.minimal_contingencies) {
    arr.push_back({{"tid", tid.str()},
                   {"responsibility", report.responsibility(tid).to_string()},
                   {"minimal_contingencies", family_json(conts)}});
    t.rows.push_back({tid.str(), report.responsibility(tid).to_string(), qx::to_string(conts)});
  }
  return {{{"causes", arr}}, {t}};
}

inline Outcome cmd_repairs(Context& c) {
  qx::RepairOptions ro;
  ro.endogenous_only = c.settings.endogenous_only;
  ro.enumeration.max_paths = c.settings.max_paths;
  const auto dc = qx::denial_constraint_of(c.query);
  auto reps = c.settings.cardinality ? qx::enumerate_c_repairs(c.instance, dc, ro)
                                     : qx::enumerate_s_repairs(c.instance, dc, ro);
  json arr = json::array();
  Table t{"", {"#", "removed", "kept", "minimum"}, {}};
  std::size_t i = 0;
  for (const auto& r : reps) {
    arr.push_back({{"removed", set_json(r.removed)}, {"kept", set_json(r.kept)}, {"cardinality_minimal", r.cardinality_minimal}});
    t.rows.push_back({std::to_string(i++), set_text(r.removed), set_text(r.kept), r.cardinality_minimal ? "yes" : "no"});
  }
  return {{{"constraint", dc.to_string()},
           {"semantics", c.settings.cardinality ? "C" : "S"},
           {"endogenous_only", c.settings.endogenous_only},
           {"repairs", arr}},
          {t}};
}

inline Outcome cmd_core(Context& c) {
  const std::string& m = c.settings.core_method;
  json res{{"method", m}};
  Table t{"", {"method", "core"}, {}};
  std::optional<qx::TidSet> fast;
  std::optional<qx::TidSet> naive;
  if (m == "lemma1" || m == "both") {
    fast = qx::core_fast(c.instance, c.query).tuples;
    const auto& cq = std::get<qx::BooleanCQ>(c.query);
    auto ps = qx::participating_sets(c.instance, cq,
                                     cq.self_join_free() ? qx::Participation::any_homomorphism
                                                         : qx::Participation::minimal_image_only);
    json parts = json::array();
    for (const auto& r : ps.per_atom) parts.push_back(set_json(r));
    res["participating"] = parts;
    res["lemma1"] = set_json(*fast);
    t.rows.push_back({"lemma1", set_text(*fast)});
  }
  if (m == "naive" || m == "both") {
    qx::RepairOptions ro;
    ro.endogenous_only = !c.instance.exogenous_part().empty();
    naive = qx::core_naive(c.instance, qx::denial_constraint_of(c.query), ro).tuples;
    res["naive"] = set_json(*naive);
    t.rows.push_back({"naive", set_text(*naive)});
  }
  res["core"] = set_json(fast ? *fast : *naive);
  if (fast && naive) res["agree"] = *fast == *naive;
  return {res, {t}};
}

inline Outcome cmd_lineage(Context& c) {
  auto f = qx::lineage_of(c.instance, c.query);
  if (c.settings.eliminate_exogenous) f = qx::eliminate_exogenous(f, c.instance, !c.settings.no_absorb);
  json res = qx::lineage_to_json(f);
  res["formula"] = f.to_string();
  res["eliminated_exogenous"] = c.settings.eliminate_exogenous;
  res["minimal_models"] = family_json(qx::minimal_models(f));
  Table t{"", {"#", "clause"}, {}};
  for (std::size_t i = 0; i < f.clauses.size(); ++i) t.rows.push_back({std::to_string(i + 1), set_text(f.clauses[i])});
  return {res, {t, Table{"", {"formula"}, {{f.to_string()}}}}};
}

inline Outcome check_outcome(const qx::CheckResult& r, const char* left, const char* right) {
  json res{{"holds", r.holds}, {"reason", r.reason}, {left, family_json(r.left)}, {right, family_json(r.right)}};
  res["violating"] = r.violating ? set_json(*r.violating) : json(nullptr);
  Table t{"", {"holds", "reason"}, {{r.holds ? "true" : "false", r.reason.empty() ? "-" : r.reason}}};
  return {res, {t, family_table(left, r.left), family_table(right, r.right)}};
}

inline Outcome cmd_check_duality(Context& c) {
  return check_outcome(qx::check_duality(c.instance, c.query, c.oracle), "mss", "mns");
}

inline Outcome cmd_check_correspondence(Context& c) {
  return check_outcome(qx::cause_repair_correspondence(c.instance, c.query, c.oracle), "cause_removals",
                       "repair_removals");
}

inline std::optional<std::size_t> env_max_endo() {
  const char* v = std::getenv("EXPLAIN_MAX_ENDO");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const unsigned long long n = std::strtoull(v, &end, 10);
  if (*end != '\0' || v[0] == '-') throw CLI::ValidationError("EXPLAIN_MAX_ENDO", "must be a non-negative integer");
  return static_cast<std::size_t>(n);
}

inline void emit_error(const Settings& s, std::ostream& out, std::ostream& err, const std::string& code,
                       const std::string& message) {
  err << "explain: " << code << ": " << message << '\n';
  if (s.format == "table")
    out << "error (" << code << "): " << message << '\n';
  else
    out << json{{"error", {{"code", code}, {"message", message}}}}.dump(2) << '\n';
}

/// Exit codes: 0 success, 1 input or semantic error (structured payload on
/// `out`), 2 usage error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Explanations for Boolean query answers: sufficient/necessary sets, causes, repairs, lineage"};
  app.name("explain");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("-i,--instance", s.instance_path, "Instance: JSON document or CSV manifest")->required();
  auto* qopt = app.add_option("-q,--query", s.query_text, "Query text, e.g. 'q :- S(x), R(x,y), S(y).'");
  auto* qfile = app.add_option("--query-file", s.query_file, "File holding the query text");
  qopt->excludes(qfile);
  app.add_option("--format", s.format, "Output format")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--max-endo", s.max_endo, "Oracle bound on endogenous tuples (default 20, or EXPLAIN_MAX_ENDO)");
  app.add_option("--max-paths", s.max_paths, "Bound on enumerated simple paths")->capture_default_str();
  app.add_option("--jobs", s.jobs, "Worker threads for oracle scans")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--timing", s.timing, "Add wall-clock timing to the report (breaks byte-identical output)");

  auto* eval = app.add_subcommand("eval", "Evaluate the query");
  auto* witnesses = app.add_subcommand("witnesses", "Minimal witnesses");
  auto* mss = app.add_subcommand("mss", "Minimal sufficient sets");
  auto* o = mss->add_flag("--oracle", s.oracle, "Exhaustive enumeration (default)");
  auto* ch = mss->add_flag("--chase", s.chase, "Polynomial chase from one tuple");
  o->excludes(ch);
  mss->add_option("--tuple", s.tuple, "Seed tuple id for --chase / --min");
  mss->add_flag("--min", s.minimum, "Minimum cardinality only (with --chase: self-join-free fast path)");
  mss->add_option("--repair", s.repair_index, "With --chase: restrict to the S-repair with this index")->needs(ch);
  auto* mns = app.add_subcommand("mns", "Minimal necessary sets");
  mns->add_flag("--min", s.minimum, "Minimum cardinality only");
  auto* degrees = app.add_subcommand("degrees", "Necessity, sufficiency and responsibility degrees");
  auto* causes = app.add_subcommand("causes", "Actual causes with minimal contingency sets");
  auto* repairs = app.add_subcommand("repairs", "Repairs w.r.t. the denial constraint of the query");
  repairs->add_flag("--cardinality", s.cardinality, "C-repairs only");
  repairs->add_flag("--endogenous-only", s.endogenous_only, "Only endogenous tuples may be deleted");
  auto* core = app.add_subcommand("core", "Repair core");
  core->add_option("--method", s.core_method, "lemma1 (participating sets), naive (repair intersection), both")
      ->check(CLI::IsMember({"lemma1", "naive", "both"}))
      ->capture_default_str();
  auto* lineage = app.add_subcommand("lineage", "Monotone DNF lineage");
  lineage->add_flag("--eliminate-exogenous", s.eliminate_exogenous, "Fix exogenous variables to true");
  lineage->add_flag("--no-absorb", s.no_absorb, "Keep clauses that contain other clauses");
  auto* duality = app.add_subcommand("check-duality", "MSS/MNS mutual hitting-set check");
  auto* corr = app.add_subcommand("check-correspondence", "Cause/repair correspondence check");

  try {
    app.parse(argc, argv);
    if (s.query_text.empty() && s.query_file.empty()) throw CLI::RequiredError("--query or --query-file");
    if (!s.max_endo) s.max_endo = env_max_endo();
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    std::string qtext = s.query_text;
    if (!s.query_file.empty()) qtext = qx::read_text_file(s.query_file);
    Context ctx{s, qx::load_instance(s.instance_path), qx::Query{qx::ReachabilityQuery{}}, {}};
    ctx.query = qx::parse_query(qtext, ctx.instance);
    ctx.oracle.max_endogenous = s.max_endo.value_or(20);
    ctx.oracle.jobs = s.jobs;
    ctx.oracle.enumeration.max_paths = s.max_paths;

    std::string name;
    Outcome result;
    auto* sub = app.get_subcommands().front();
    name = sub->get_name();
    if (sub == eval) result = cmd_eval(ctx);
    else if (sub == witnesses) result = cmd_witnesses(ctx);
    else if (sub == mss) result = cmd_mss(ctx);
    else if (sub == mns) result = cmd_mns(ctx);
    else if (sub == degrees) result = cmd_degrees(ctx);
    else if (sub == causes) result = cmd_causes(ctx);
    else if (sub == repairs) result = cmd_repairs(ctx);
    else if (sub == core) result = cmd_core(ctx);
    else if (sub == lineage) result = cmd_lineage(ctx);
    else if (sub == duality) result = cmd_check_duality(ctx);
    else if (sub == corr) result = cmd_check_correspondence(ctx);

    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    const std::string qcanon = qx::to_string(ctx.query);
    if (s.format == "table") {
      out << "command: " << name << '\n' << "query:   " << qcanon << '\n';
      out << "instance: " << ctx.instance.size() << " tuples (" << ctx.instance.exogenous_part().size()
          << " exogenous)\n";
      for (const auto& t : result.tables) {
        out << '\n';
        t.render(out);
      }
      if (s.timing) out << "\ntiming: " << ms << " ms\n";
    } else {
      json report{{"command", name},
                  {"inputs",
                   {{"instance",
                     {{"digest", fnv1a64(qx::instance_to_json(ctx.instance).dump())},
                      {"tuples", ctx.instance.size()},
                      {"exogenous", ctx.instance.exogenous_part().size()}}},
                    {"query", {{"text", qcanon}, {"digest", fnv1a64(qcanon)}}}}},
                  {"result", result.result}};
      if (s.timing) report["timing_ms"] = ms;
      out << report.dump(2) << '\n';
    }
    return 0;
  } catch (const qx::Error& e) {
    emit_error(s, out, err, e.code(), e.what());
  } catch (const std::exception& e) {
    emit_error(s, out, err, "internal", e.what());
  }
  return 1;
}

} // namespace explain_cli
