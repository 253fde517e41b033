#include <gtest/gtest.h>

#include "test_support.hpp"
#include "workbench/hopfcohomology.hpp"
#include "workbench/scenarios.hpp"

using namespace wb;

namespace {

// dim over F_2 of F_2[h1, a3, a4^2]/(a3 h1) in bidegree (s, t), |h1| = (1, 2), |a3| = (0, 6), |a4^2| = (0, 16).
std::size_t b1_oracle(int s, int t) {
  std::size_t n = 0;
  for (int i = 0; 6 * i <= t; ++i)
    for (int j = 0; 16 * j <= t; ++j)
      if (2 * s + 6 * i + 16 * j == t && (s == 0 || i == 0)) ++n;
  return n;
}

std::size_t dim_at(const ExtTable& t, int s, int deg) { return t.at(s, {deg}).dim_mod(2); }

}  // namespace

TEST(Algebroid, BundledAlgebroidsValidate) {
  for (const char* f : {"weierstrass.json", "b1.json", "a_doubleprime.json", "weierstrass_odd_stable.json",
                        "weierstrass_2local_cubic.json"}) {
    const ValidationReport r = validate(load_algebroid(f), 12);
    EXPECT_TRUE(r.ok()) << f << ": " << (r.ok() ? "" : r.failures.front());
    EXPECT_GT(r.checks, 0u) << f;
  }
}

TEST(Algebroid, BrokenCoproductFailsValidation) {
  HopfAlgebroid h = load_algebroid("b1.json");
  h.set_delta("s", {{"s", "1"}});
  EXPECT_FALSE(validate(h, 8).ok());
}

TEST(Algebroid, MalformedJsonIsAConfigError) {
  EXPECT_THROW(HopfAlgebroid::from_json("{\"base\": 3}"), ConfigError);
  EXPECT_THROW(HopfAlgebroid::from_json("not json"), ConfigError);
}

TEST(Cobar, B1MatchesPolynomialOracle) {
  CobarWindow w;
  w.s_max = 3;
  w.hi = {20};
  const ExtTable t = cobar_ext(load_algebroid("b1.json"), w);
  for (int s = 0; s <= 3; ++s)
    for (int deg = 0; deg <= 20; ++deg) EXPECT_EQ(dim_at(t, s, deg), b1_oracle(s, deg)) << "(" << s << "," << deg << ")";
}

TEST(Cobar, WeierstrassExtZeroIsModularForms) {
  CobarWindow w;
  w.s_max = 1;
  w.hi = {20};
  const ExtTable t = cobar_ext(load_algebroid("weierstrass.json"), w);
  const RingPresentation mf = load_ring("mf.json");
  for (int deg = 0; deg <= 20; ++deg)
    EXPECT_TRUE(t.at(0, {deg}).same_group(graded_piece(mf, {deg}))) << "t = " << deg << ": " << t.at(0, {deg}).str();
}

TEST(Cobar, TwoLocalNamedCells) {
  CobarWindow w;
  w.s_max = 2;
  w.hi = {10};
  const ExtTable t = cobar_ext(load_algebroid("a_doubleprime.json"), w);
  // Ext^{s,t} sits in stem t - s.
  EXPECT_TRUE(t.at(1, {2}).same_group({0, {2}, {}}));  // h1
  EXPECT_TRUE(t.at(0, {4}).same_group({1, {}, {}}));   // b2
  EXPECT_TRUE(t.at(0, {6}).same_group({1, {}, {}}));   // b3
  EXPECT_TRUE(t.at(1, {6}).same_group({0, {2}, {}}));  // b2 h1
  EXPECT_TRUE(t.at(2, {4}).same_group({0, {2}, {}}));  // h1^2
}

TEST(Cobar, CsvHeader) {
  CobarWindow w;
  w.s_max = 1;
  w.hi = {6};
  const std::string csv = cobar_ext(load_algebroid("b1.json"), w).csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "s,t,rank,torsion,labels");
}

TEST(Cobar, CobarRankCountsTuples) {
  const HopfAlgebroid h = load_algebroid("b1.json");
  // C^1 in degree 2 is spanned by [s]; C^2 in degree 4 by [s|s].
  EXPECT_EQ(cobar_rank(h, 1, {2}), 1u);
  EXPECT_EQ(cobar_rank(h, 2, {4}), 1u);
  EXPECT_EQ(cobar_rank(h, 0, {0}), 1u);
}

TEST(InvariantIdeals, TwoAndA1) {
  const HopfAlgebroid h = load_algebroid("a_doubleprime.json");
  EXPECT_TRUE(invariant_ideal_check(h, {"2", "a1"}));
  EXPECT_FALSE(invariant_ideal_check(h, {"a1"}));
  EXPECT_THROW(mod_invariant_ideal(h, {"a1"}), NotInvariant);
  const HopfAlgebroid q = mod_invariant_ideal(h, {"2", "a1"});
  EXPECT_TRUE(validate(q, 10).ok());
}

TEST(ChangeOfCover, WitnessBasesVerifyOrFail) {
  const HopfAlgebroid odd = load_algebroid("weierstrass_odd_stable.json");
  CoverReduction good{{"x"}, {"1"}, 12};
  EXPECT_FALSE(check_witness(odd, good).has_value());
  CoverReduction bad{{"x"}, {"r^*"}, 12};
  EXPECT_TRUE(check_witness(odd, bad).has_value());
  EXPECT_THROW(change_of_cover(odd, bad), WitnessFails);
}

TEST(ChangeOfCover, ShippedReductionsPreserveExt) {
  const auto results = run_reductions();
  ASSERT_EQ(results.size(), 3u);
  for (const auto& r : results) {
    EXPECT_FALSE(r.witness_failure.has_value()) << r.name;
    EXPECT_TRUE(r.diffs.empty()) << r.name << ": " << (r.diffs.empty() ? "" : r.diffs.front());
    EXPECT_FALSE(r.ext_before.cells.empty()) << r.name;
  }
}

TEST(BaseChange, PrimitivePolynomialGeneratorTensorsExt) {
  const HopfAlgebroid h = load_algebroid("b1.json");
  ComoduleAlgebra m;
  m.name = "B1[u]";
  m.gens.push_back({"u", {4}, false});
  m.coaction["u"] = "u";
  const HopfAlgebroid hm = base_change_comodule(h, m);
  CobarWindow w;
  w.s_max = 2;
  w.hi = {16};
  const ExtTable base = cobar_ext(h, w), ext = cobar_ext(hm, w);
  for (int s = 0; s <= 2; ++s)
    for (int deg = 0; deg <= 16; ++deg) {
      std::size_t want = 0;
      for (int k = 0; 4 * k <= deg; ++k) want += dim_at(base, s, deg - 4 * k);
      EXPECT_EQ(dim_at(ext, s, deg), want) << "(" << s << "," << deg << ")";
    }
}

TEST(CobarProperty, ExtIsStableUnderWindowGrowth) {
  // Cells inside a smaller window do not depend on the window.
  wbtest::Gen g(41);
  const HopfAlgebroid h = load_algebroid("a_doubleprime.json");
  CobarWindow big;
  big.s_max = 3;
  big.hi = {14};
  const ExtTable all = cobar_ext(h, big);
  for (int it = 0; it < 3; ++it) {
    CobarWindow w;
    w.s_max = static_cast<int>(g.range(1, 3));
    w.hi = {static_cast<int>(g.range(4, 14))};
    EXPECT_TRUE(compare_ext(cobar_ext(h, w), all).empty()) << wbtest::seed_note();
  }
}
