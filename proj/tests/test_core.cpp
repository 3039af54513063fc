#include <random>

#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "fixtures.hpp"
#include "random_instances.hpp"

using namespace qexplain;
using fixtures::ids;

namespace {

Tuple endo(const char* tid, const char* pred, std::vector<std::string> vals) {
  return Tuple{TupleId(tid), pred, std::move(vals), Provenance::endogenous};
}

} // namespace

TEST(Participating, SrsPrime) {
  auto d = fixtures::load("srs_prime.json");
  auto q = parse_query(fixtures::srs_query, d);
  auto ps = participating_sets(d, q);
  ASSERT_EQ(ps.per_atom.size(), 3u);
  EXPECT_EQ(ps.per_atom[0], ids({"S(b)", "S(c)"}));
  EXPECT_EQ(ps.per_atom[1], ids({"R(c,b)", "R(b,b)"}));
  EXPECT_EQ(ps.per_atom[2], ids({"S(b)"}));
}

TEST(CoreFast, SrsPrime) {
  auto d = fixtures::load("srs_prime.json");
  auto q = parse_query(fixtures::srs_query, d);
  auto core = core_fast(d, q);
  EXPECT_EQ(core.method, CoreMethod::lemma1);
  EXPECT_EQ(core.tuples, ids({"R(a,d)", "R(e,f)", "S(a)"}));
  EXPECT_EQ(core.tuples, core_naive(d, denial_constraint_of(q)).tuples);
}

TEST(CoreFast, FalseQueryKeepsEverything) {
  auto d = fixtures::load("srs_prime.json");
  auto q = parse_query("q :- S(x), R(x,x), S(\"f\").", d);
  EXPECT_EQ(core_fast(d, q).tuples, d.all_tids());
}

TEST(CoreFast, SelfJoinInstance) {
  auto d = fixtures::load("self_join.json");
  auto q = parse_query(fixtures::self_join_query, d);
  EXPECT_EQ(core_fast(d, q).tuples, ids({"S(b,c)"}));
  EXPECT_EQ(core_naive(d, denial_constraint_of(q)).tuples, ids({"S(b,c)"}));
}

// P(x,y) ∧ P(y,y) over {P(a,b), P(b,b)}: P(a,b) sits in a homomorphism
// image, but that image contains the witness {P(b,b)}, and the only repair
// deletes P(b,b). Plain participating sets would put P(a,b) outside the core.
TEST(CoreFast, SelfJoinNeedsMinimalImages) {
  Instance d({{"P", 2}}, {endo("p1", "P", {"a", "b"}), endo("p2", "P", {"b", "b"})});
  auto q = parse_query("q :- P(x,y), P(y,y).");
  auto raw = participating_sets(d, q, Participation::any_homomorphism);
  EXPECT_EQ(raw.all(), ids({"p1", "p2"}));
  auto minimal = participating_sets(d, q, Participation::minimal_image_only);
  EXPECT_EQ(minimal.all(), ids({"p2"}));
  EXPECT_EQ(core_naive(d, denial_constraint_of(q)).tuples, ids({"p1"}));
  EXPECT_EQ(core_fast(d, q).tuples, ids({"p1"}));
}

TEST(CoreFast, ExogenousPredicatesAreSkipped) {
  auto d = fixtures::load("srs_prime_exo_r.json");
  auto q = parse_query(fixtures::srs_query, d);
  RepairOptions ro;
  ro.endogenous_only = true;
  EXPECT_EQ(core_fast(d, q).tuples, set_difference(d.all_tids(), ids({"S(b)"})));
  EXPECT_EQ(core_fast(d, q).tuples, core_naive(d, denial_constraint_of(q), ro).tuples);
}

TEST(CoreFast, RejectsMixedPredicatesAndReachability) {
  Instance d({{"R", 2}, {"T", 1}}, {endo("r1", "R", {"a", "b"}), Tuple{"r2", "R", {"b", "b"}, Provenance::exogenous},
                                    endo("t1", "T", {"b"})});
  auto q = parse_query(fixtures::rt_query);
  EXPECT_THROW(core_fast(d, q), UnsupportedPartition);
  EXPECT_THROW(chase_mss(d, q, "r1"), UnsupportedPartition);
  auto g = fixtures::load("graph.json");
  EXPECT_THROW(core_fast(g, parse_query(fixtures::graph_query, g)), UnsupportedQuery);
  EXPECT_THROW(chase_mss(g, parse_query(fixtures::graph_query, g), "t1"), UnsupportedQuery);
  EXPECT_THROW(min_mss_sjf(g, parse_query(fixtures::graph_query, g)), UnsupportedQuery);
}

TEST(SufficientSet, FromRepairDeletingSb) {
  auto d = fixtures::load("srs_prime.json");
  auto q = parse_query(fixtures::srs_query, d);
  auto core = core_fast(d, q).tuples;
  Repair star{set_difference(d.all_tids(), ids({"S(b)"})), ids({"S(b)"}), true};
  EXPECT_EQ(set_difference(star.kept, core), ids({"R(c,b)", "R(b,b)", "S(c)"}));
  EXPECT_FALSE(evaluate_on(q, d, ids({"R(c,b)", "R(b,b)", "S(c)"})));
  auto ss = sufficient_set_from(d, q, star, "S(b)");
  EXPECT_EQ(ss.kind, ExplanationKind::SS);
  EXPECT_EQ(ss.tuples, ids({"S(b)", "R(c,b)", "R(b,b)", "S(c)"}));
  for (const char* t : {"S(a)", "R(a,d)", "R(e,f)"}) {
    TidSet s = ids({"R(c,b)", "R(b,b)", "S(c)"});
    s.insert(t);
    EXPECT_FALSE(evaluate_on(q, d, s)) << t;
  }
  EXPECT_THROW(sufficient_set_from(d, q, star, "S(c)"), PreconditionViolated);
}

TEST(SufficientSet, EveryRepairAndRemovedTuple) {
  std::mt19937 rng(31);
  for (int i = 0; i < 80; ++i) {
    auto c = gen::random_true_case(rng, 9, gen::Exogenous::none);
    for (const auto& rep : enumerate_s_repairs(c.instance, denial_constraint_of(c.query)))
      for (const auto& t : rep.removed)
        EXPECT_TRUE(bf::sufficient(c.query, c.instance, sufficient_set_from(c.instance, c.query, rep, t).tuples));
  }
}

TEST(Chase, FromSbOnSrsPrime) {
  auto d = fixtures::load("srs_prime.json");
  auto q = parse_query(fixtures::srs_query, d);
  auto out = chase_mss(d, q, "S(b)");
  EXPECT_EQ(out.mss.tuples, ids({"S(b)", "R(b,b)"}));
  EXPECT_EQ(out.mss.kind, ExplanationKind::MSS);
  EXPECT_EQ(out.state.seed_atom, 0u);
  ASSERT_EQ(out.state.bound.size(), 3u);
  EXPECT_EQ(*out.state.bound[1], TupleId("R(b,b)"));
  EXPECT_EQ(*out.state.bound[2], TupleId("S(b)"));
  Repair star{set_difference(d.all_tids(), ids({"S(b)"})), ids({"S(b)"}), true};
  EXPECT_EQ(chase_mss(d, q, "S(b)", star).mss.tuples, ids({"S(b)", "R(b,b)"}));
  auto m = min_mss_sjf(fixtures::load("rt.json"), parse_query(fixtures::rt_query), TupleId("T(a3)"));
  EXPECT_EQ(m.sigma, Degree::inverse_of(2));
}

TEST(Chase, Preconditions) {
  auto d = fixtures::load("srs_prime.json");
  auto q = parse_query(fixtures::srs_query, d);
  EXPECT_THROW(chase_mss(d, q, "S(a)"), PreconditionViolated);  // in the core
  EXPECT_THROW(chase_mss(d, q, "nope"), UnknownTuple);
  Repair star{set_difference(d.all_tids(), ids({"S(b)"})), ids({"S(b)"}), true};
  EXPECT_THROW(chase_mss(d, q, "S(c)", star), PreconditionViolated);  // kept by the repair
  auto exo = fixtures::load("srs_prime_exo_r.json");
  EXPECT_THROW(chase_mss(exo, q, "R(b,b)"), PreconditionViolated);
  EXPECT_EQ(chase_mss(exo, q, "S(b)").mss.tuples, ids({"S(b)"}));
}

TEST(Chase, SelfJoinFromRaa) {
  auto d = fixtures::load("self_join.json");
  auto q = parse_query(fixtures::self_join_query, d);
  auto out = chase_mss(d, q, "R(a,a)");
  EXPECT_TRUE(out.mss.tuples.count("R(a,a)"));
  EXPECT_TRUE(bf::is_mss(q, d, out.mss.tuples));
  EXPECT_EQ(out.mss.tuples, ids({"R(a,a)", "S(a,a)"}));

  // Pool restricted by the repair that keeps R(a,b), R(b,b), R(b,c), S(a,a), S(b,c).
  Repair rep{ids({"R(a,b)", "R(b,b)", "R(b,c)", "S(a,a)", "S(b,c)"}), ids({"R(a,a)", "S(a,b)"}), false};
  ASSERT_TRUE(is_valid_repair(d, denial_constraint_of(q), rep));
  auto pooled = chase_mss(d, q, "R(a,a)", rep);
  EXPECT_TRUE(bf::is_mss(q, d, pooled.mss.tuples));
  EXPECT_TRUE(pooled.mss.tuples.count("R(a,a)"));
  EXPECT_THROW(min_mss_sjf(d, q, TupleId("R(a,a)")), CallerMustUseOracle);
}

TEST(Chase, FallsBackToALaterSeedPosition) {
  Instance d({{"R", 2}, {"T", 1}}, {endo("r1", "R", {"a", "b"}), endo("r2", "R", {"b", "c"}), endo("t", "T", {"c"})});
  auto q = parse_query("q :- R(x,y), R(y,z), T(z).");
  auto out = chase_mss(d, q, "r2");
  EXPECT_EQ(out.state.seed_atom, 1u);
  EXPECT_EQ(out.mss.tuples, ids({"r1", "r2", "t"}));
}

TEST(Chase, SweepDropsRedundantTuples) {
  // S(a) is outside the core through R(c,a) but redundant next to R(a,b), S(b).
  Instance d({{"R", 2}, {"S", 1}}, {endo("R(a,b)", "R", {"a", "b"}), endo("R(c,a)", "R", {"c", "a"}),
                                    endo("S(a)", "S", {"a"}), endo("S(b)", "S", {"b"})});
  auto q = parse_query("q :- R(x,y), S(y), S(z).");
  auto out = chase_mss(d, q, "R(a,b)");
  EXPECT_EQ(out.raw, ids({"R(a,b)", "S(a)", "S(b)"}));
  EXPECT_EQ(out.mss.tuples, ids({"R(a,b)", "S(b)"}));
}

TEST(MinMss, SelfJoinFree) {
  auto d = fixtures::load("rt.json");
  auto q = parse_query(fixtures::rt_query, d);
  auto any = min_mss_sjf(d, q);
  ASSERT_TRUE(any.mss);
  EXPECT_EQ(any.mss->tuples.size(), 2u);
  EXPECT_EQ(any.sigma, Degree::inverse_of(2));
  auto none = min_mss_sjf(d, q, TupleId("T(a1)"));
  EXPECT_FALSE(none.mss);
  EXPECT_TRUE(none.sigma.is_zero());
  EXPECT_THROW(min_mss_sjf(fixtures::load("empty.json"), parse_query(fixtures::rt_query)), UnknownPredicate);
  Instance rt_empty(d.schema(), {});
  EXPECT_THROW(min_mss_sjf(rt_empty, q), QueryNotSatisfied);
}

TEST(MinMss, ExogenousOnlyWitnessGivesEmptySet) {
  Instance d({{"R", 2}, {"T", 1}}, {Tuple{"r", "R", {"a", "b"}, Provenance::exogenous},
                                    Tuple{"t", "T", {"b"}, Provenance::exogenous}});
  auto m = min_mss_sjf(d, parse_query(fixtures::rt_query));
  ASSERT_TRUE(m.mss);
  EXPECT_TRUE(m.mss->tuples.empty());
  EXPECT_TRUE(m.sigma.is_zero());
}

TEST(CoreFast, AgreesWithBruteForceCore) {
  std::mt19937 rng(3);
  for (int i = 0; i < 150; ++i) {
    const bool exo = i % 2;
    auto c = gen::random_true_case(rng, 10, exo ? gen::Exogenous::per_predicate : gen::Exogenous::none);
    if (exo && bf::s_repair_removals(c.query, c.instance, true).empty()) continue;  // exogenous-only conflict
    EXPECT_EQ(core_fast(c.instance, c.query).tuples, bf::core(c.query, c.instance, exo)) << to_string(c.query);
  }
}
