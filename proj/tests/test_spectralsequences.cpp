#include <gtest/gtest.h>

#include "test_support.hpp"
#include "workbench/charts.hpp"
#include "workbench/parallel.hpp"
#include "workbench/scenarios.hpp"
#include "workbench/spectralsequences.hpp"

using namespace wb;

namespace {

GroupDescriptor group(std::size_t free, std::vector<mpz_class> torsion = {}) { return {free, std::move(torsion), {}}; }

GroupDescriptor einf_at(const RunReport& r, const MultiDegree& d) {
  auto it = r.einf.find(d);
  return it == r.einf.end() ? GroupDescriptor{} : it->second;
}

// E1 = Z[x, e]/(e^2) with |x| = (2, 0), |e| = (1, 1) and d1(x) = e.
PageSpec polynomial_with_exterior() {
  PageSpec s;
  s.ring.name = "Z[x,e]/(e^2)";
  s.ring.add_generator("x", {2, 0});
  s.ring.add_generator("e", {1, 1});
  s.ring.add_relation("e^2");
  s.page = 1;
  s.grading.base = {-1, 0};
  s.grading.step = {0, 1};
  return s;
}

SSWindow window(MultiDegree hi, int max_page = 6) { return {MultiDegree(hi.size(), 0), std::move(hi), max_page}; }

}  // namespace

TEST(SpectralSequence, LeibnizGivesCyclicTorsion) {
  // d(x^k) = k x^(k-1) e, so E2 has Z/k at x^(k-1) e.
  const RunReport r = run(polynomial_with_exterior(), {{1, "x", "e", ""}}, window({14, 1}));
  EXPECT_TRUE(einf_at(r, {0, 0}).same_group(group(1)));
  for (int k = 1; k <= 7; ++k) {
    EXPECT_TRUE(einf_at(r, {2 * k, 0}).is_zero()) << k;
    const GroupDescriptor want = k == 1 ? group(0) : quotient_group(1, {SparseRow{{0, mpz_class(k)}}}, Coefficients::integers());
    EXPECT_TRUE(einf_at(r, {2 * k - 1, 1}).same_group(want)) << "k = " << k << ": " << einf_at(r, {2 * k - 1, 1}).str();
  }
}

TEST(SpectralSequence, NoRulesMeansCollapse) {
  const PageSpec s = polynomial_with_exterior();
  const RunReport r = run(s, {}, window({12, 1}));
  ASSERT_EQ(r.pages.size(), 1u);
  for (const auto& [d, g] : r.einf) EXPECT_TRUE(g.same_group(graded_piece(s.ring, d))) << degree_str(d);
}

TEST(SpectralSequence, RuleDegreeIsChecked) {
  EXPECT_THROW(run(polynomial_with_exterior(), {{1, "x", "x", ""}}, window({8, 1})), InconsistentRule);
  EXPECT_THROW(run(polynomial_with_exterior(), {{1, "x", "q", ""}}, window({8, 1})), InconsistentRule);
}

TEST(SpectralSequence, RuleSourceMustSurvive) {
  PageSpec s = polynomial_with_exterior();
  s.ring.add_generator("g", {1, 2});
  EXPECT_THROW(run(s, {{1, "x", "e", ""}, {2, "x", "g", ""}}, window({8, 2})), InconsistentRule);
}

TEST(SpectralSequence, RelationsContradictingLeibnizAreRejected) {
  // x^2 = 0 forces d(x^2) = 2 x e to vanish, which it does not.
  PageSpec s = polynomial_with_exterior();
  s.ring.add_relation("x^2");
  EXPECT_THROW(run(s, {{1, "x", "e", ""}}, window({8, 1})), InconsistentRule);
}

TEST(SpectralSequence, StableAahssEInfinity) {
  const RunReport r = run_scenario(load_ss_scenario("aahss.json"));
  EXPECT_TRUE(einf_at(r, {0, 0, 0}).same_group(group(1)));
  EXPECT_TRUE(einf_at(r, {2, 0, 1}).is_zero());  // z supports d1
  EXPECT_TRUE(einf_at(r, {1, 1, 0}).is_zero());  // tau is hit
  EXPECT_TRUE(einf_at(r, {3, 1, 0}).is_zero());  // alpha is hit by d2(z^2)
  EXPECT_TRUE(einf_at(r, {8, 0, 0}).same_group(group(1)));
}

TEST(SpectralSequence, StableE2IsTheCuspCurve) {
  // d1(z) = tau on Z[1/2][z, tau]/(tau^2, z tau): E2 = Z[1/2][x, y]/(x^3 - y^2), x = z^2, y = z^3.
  PageSpec s;
  s.ring.coeffs = Coefficients::inverting({2});
  s.ring.add_generator("z", {2, 0});
  s.ring.add_generator("tau", {1, 1});
  s.ring.add_relation("tau^2");
  s.ring.add_relation("z*tau");
  s.grading.base = {-1, 1};
  s.grading.step = {0, 0};
  const RunReport r = run(s, {{1, "z", "tau", ""}}, window({40, 1}, 2));
  RingPresentation cusp;
  cusp.coeffs = Coefficients::inverting({2});
  cusp.add_generator("x", {4, 0});
  cusp.add_generator("y", {6, 0});
  cusp.add_relation("x^3 - y^2");
  const RunReport e2 = page_report(r, 2);
  for (int n = 0; n <= 40; ++n)
    for (int t = 0; t <= 1; ++t)
      EXPECT_TRUE(einf_at(e2, {n, t}).same_group(graded_piece(cusp, {n, t}))) << n << "," << t;
}

TEST(SpectralSequence, DescentForTmfAtThree) {
  const RunReport r = run_scenario(load_ss_scenario("descent_tmf_p3.json"));
  const GroupDescriptor z3 = group(0, {3});
  EXPECT_TRUE(einf_at(r, {3, 1}).same_group(z3));   // alpha
  EXPECT_TRUE(einf_at(r, {10, 2}).same_group(z3));  // beta
  EXPECT_TRUE(einf_at(r, {13, 3}).same_group(z3));  // alpha beta
  EXPECT_TRUE(einf_at(r, {24, 0}).same_group(group(2)));
  EXPECT_TRUE(einf_at(r, {27, 1}).same_group(z3));  // alpha Delta
  EXPECT_TRUE(einf_at(r, {48, 0}).same_group(group(3)));
  EXPECT_TRUE(einf_at(r, {23, 5}).is_zero());
  ASSERT_FALSE(einf_at(r, {24, 0}).labels.empty());
  EXPECT_EQ(einf_at(r, {24, 0}).labels[0], "3*Delta");
}

TEST(SpectralSequence, TwoLocalDescentMatchesTheSubring) {
  const SSScenario s = load_ss_scenario("descent_p2.json");
  const RunReport r = run_scenario(s, "n16");
  PieceEngine eng(s.spec.ring);
  const SubringSpec sub = scenario_subring(s);
  const auto diff = compare_assoc_graded(r, {0, 1}, [&](const MultiDegree& d) { return subring_piece(eng, sub, d); },
                                         {0, 0}, {16, 3});
  EXPECT_TRUE(diff.empty()) << diff_string(diff);
  EXPECT_TRUE(einf_at(r, {3, 3}).is_zero());          // h1^3 dies
  EXPECT_TRUE(einf_at(r, {4, 0}).same_group(group(1)));  // generated by 2 b2
}

TEST(SpectralSequence, UnstableCollapsesToStableAtTheTopFiltration) {
  const RunReport u = run_scenario(load_ss_scenario("uaahss_p3.json"), "n14");
  const RunReport s = run_scenario(load_ss_scenario("aahss.json"));
  const auto diff = collapse_check(u, restrict_window(s, {0, 0, 0}, {15, 6, 7}), 2, 7, 2);
  EXPECT_TRUE(diff.empty()) << diff_string(diff);
}

TEST(SpectralSequence, HiddenExtensionsMustBeHomogeneous) {
  const SSScenario sc = load_ss_scenario("uaahss_p3.json");
  const RunReport r = run_scenario(sc, "n14");
  EXPECT_THROW(register_hidden_extension(r, sc.spec, "z*tau = alpha"), DegreeMismatch);
  EXPECT_THROW(register_hidden_extension(r, sc.spec, "z*tau"), ParseError);
  EXPECT_EQ(register_hidden_extension(r, sc.spec, "0 = 0").extensions.size(), r.extensions.size());
}

TEST(SpectralSequence, BocksteinTowersAtBottomCell) {
  const SSScenario sc = load_ss_scenario("bockstein.json");
  const RunReport r = run_scenario(sc);
  const auto table = tower_table(r, {0, 1}, 2);
  // t - s = 0, s = 0: the unit carries an infinite v0-tower, giving Z
  ASSERT_TRUE(table.count({0, 0}));
  EXPECT_TRUE(table.at({0, 0}).same_group(group(1)));
  // h1 carries a bar of length one: Z/2
  ASSERT_TRUE(table.count({1, 2}));
  EXPECT_TRUE(table.at({1, 2}).same_group(group(0, {2})));
}

TEST(SpectralSequence, RulesJsonRoundTrip) {
  const std::vector<DifferentialRule> rules{{3, "b2", "h1^3", "eta4"}, {5, "Delta", "beta^2*alpha", ""}};
  const auto back = rules_from_json(rules_to_json(rules));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].page, 3);
  EXPECT_EQ(back[1].target, "beta^2*alpha");
  EXPECT_EQ(back[0].citation, "eta4");
  EXPECT_THROW(rules_from_json("{\"rules\": [{\"page\": 1}]}"), ConfigError);
  EXPECT_THROW(rules_from_json("[1,"), ConfigError);
}

TEST(SpectralSequence, ScenarioSchemaErrors) {
  EXPECT_THROW(parse_ss_scenario("{}", "inline"), ConfigError);
  EXPECT_THROW(parse_ss_scenario(R"({"e1": "mf.json", "grading": {"base": [1, 2], "step": [0, 0]}, "windows": {}})",
                                 "inline"),
               ConfigError);
  const SSScenario s = load_ss_scenario("aahss.json");
  EXPECT_THROW(run_scenario(s, "no-such-window"), ConfigError);
}

TEST(SpectralSequenceProperty, RanksNeverGrowAcrossPages) {
  for (const char* f : {"aahss.json", "uaahss_p3.json", "descent_p2.json", "descent_tmf_p3.json", "bockstein.json"}) {
    const SSScenario s = load_ss_scenario(f);
    const std::string w = s.windows.count("n14") ? "n14" : s.windows.count("n16") ? "n16" : "";
    const RunReport r = run_scenario(s, w);
    for (std::size_t i = 1; i < r.groups.size(); ++i)
      for (const auto& [d, g] : r.groups[i]) {
        auto it = r.groups[i - 1].find(d);
        ASSERT_NE(it, r.groups[i - 1].end()) << f << " page " << r.pages[i] << " " << degree_str(d);
        EXPECT_LE(g.free_rank, it->second.free_rank) << f << " " << degree_str(d);
      }
  }
}

TEST(SpectralSequenceProperty, RandomLeibnizRunsAreDeterministicAcrossThreads) {
  wbtest::Gen g(51);
  for (int it = 0; it < 4; ++it) {
    PageSpec s = polynomial_with_exterior();
    const long c = g.range(1, 6);
    const std::string target = std::to_string(c) + "*e";
    set_thread_override(1);
    const std::string one = run(s, {{1, "x", target, ""}}, window({16, 1})).json();
    set_thread_override(4);
    const std::string four = run(s, {{1, "x", target, ""}}, window({16, 1})).json();
    set_thread_override(0);
    EXPECT_EQ(one, four) << wbtest::seed_note();
  }
}

TEST(Charts, EmptyRunHasAxesOnly) {
  const ChartData c = chart_from_report_json("{}");
  EXPECT_TRUE(c.glyphs.empty());
  const std::string svg = render_svg(c);
  EXPECT_NE(svg.find("<line"), std::string::npos);
  EXPECT_EQ(svg.find("<circle"), std::string::npos);
  EXPECT_EQ(svg.find("<rect x="), std::string::npos);
}

TEST(Charts, ReportChartPlacesGlyphsInAdamsCoordinates) {
  const RunReport r = run(polynomial_with_exterior(), {{1, "x", "e", ""}}, window({8, 1}));
  const ChartData c = chart_from_report(r);
  bool found = false;
  for (const auto& g : c.glyphs)
    if (g.x == 3 && g.y == 1 && g.kind == ChartGlyph::Torsion) found = true;
  EXPECT_TRUE(found);
  EXPECT_THROW(chart_from_report_json("[1,"), ConfigError);
}
