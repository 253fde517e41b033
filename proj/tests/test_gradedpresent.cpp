#include <gtest/gtest.h>

#include "test_support.hpp"
#include "workbench/gradedpresent.hpp"
#include "workbench/scenarios.hpp"

using namespace wb;

namespace {

// Number of monomials of degree n in generators of the given positive degrees.
std::size_t partition_count(const std::vector<int>& degs, int n) {
  std::vector<std::size_t> ways(static_cast<std::size_t>(n) + 1, 0);
  ways[0] = 1;
  for (int d : degs)
    for (int k = d; k <= n; ++k) ways[static_cast<std::size_t>(k)] += ways[static_cast<std::size_t>(k - d)];
  return ways[static_cast<std::size_t>(n)];
}

GroupDescriptor group(std::size_t free, std::vector<mpz_class> torsion = {}) { return {free, std::move(torsion), {}}; }

}  // namespace

TEST(Presentation, ModularFormsAtTwentyFour) {
  const RingPresentation mf = load_ring("mf.json");
  const GroupDescriptor g = graded_piece(mf, {24});
  EXPECT_TRUE(g.same_group(group(2)));
  EXPECT_TRUE(graded_piece(mf, {4}).is_zero());
  EXPECT_TRUE(graded_piece(mf, {0}).same_group(group(1)));
}

TEST(Presentation, OddDerivedJacobiFormsZeroLine) {
  const RingPresentation r = load_ring("djf_inf_odd.json");
  const std::size_t want[] = {1, 0, 1, 1, 2, 1, 3};
  for (int n = 0; n <= 12; n += 2)
    EXPECT_TRUE(graded_piece(r, {n, 0}).same_group(group(want[n / 2]))) << "n = " << n;
}

TEST(Presentation, ConnectiveTwoLocalGroupsLowDegrees) {
  const RingPresentation r = load_ring("tjf_inf_2local.json");
  const std::vector<GroupDescriptor> want{group(1), group(0, {2}), group(0, {2}), group(0), group(1),
                                          group(0), group(1),      group(0),      group(2)};
  for (int n = 0; n <= 8; ++n)
    EXPECT_TRUE(graded_piece(r, {n}).same_group(want[static_cast<std::size_t>(n)]))
        << "degree " << n << ": " << graded_piece(r, {n}).str();
}

TEST(Presentation, LabelsNameMonomials) {
  const RingPresentation r = load_ring("djf_inf_2local.json");
  const GroupDescriptor g = graded_piece(r, {1, 1});
  EXPECT_TRUE(g.same_group(group(0, {2})));
  ASSERT_EQ(g.labels.size(), 1u);
  EXPECT_EQ(g.labels[0], "h1");
}

TEST(Presentation, TwoLocalModTwoAndH1) {
  const RingPresentation r = quotient_by(load_ring("djf_inf_2local.json"), {"2", "h1"});
  // over F_2 the degree-16 piece is spanned by b2^4, b2*b3^2 (= b4^2), b2^2*b4, b8 modulo b4^2 - b2*b3^2
  EXPECT_EQ(graded_piece(r, {16, 0}).dim_mod(2), 4u);
  EXPECT_TRUE(graded_piece(r, {1, 1}).is_zero());
}

TEST(Presentation, HilbertCsv) {
  const auto rows = hilbert_table(load_ring("mf.json"), {0}, {12});
  EXPECT_EQ(hilbert_csv(rows, 1), "n,rank,torsion\n0,1,\n8,1,\n12,1,\n");
}

TEST(Presentation, ErrorsOnBadInput) {
  EXPECT_THROW(RingPresentation::from_json("{"), ConfigError);
  EXPECT_THROW(RingPresentation::from_json(R"({"coefficients":"Z","generators":[{"name":"x","degree":[2]},)"
                                           R"({"name":"y","degree":[3]}],"relations":["x + y"]})"),
               ConfigError);
  const RingPresentation mf = load_ring("mf.json");
  EXPECT_THROW(mf.parse("c4 + q"), ParseError);
  EXPECT_THROW(mf.degree_of(mf.parse("c4 + c6")), DegreeMismatch);
  EXPECT_THROW(load_ring("no_such_ring.json"), ConfigError);
}

TEST(PresentationProperty, FreeRingRanksAreMonomialCounts) {
  wbtest::Gen g(31);
  for (int it = 0; it < 25; ++it) {
    RingPresentation r;
    r.name = "free";
    std::vector<int> degs;
    const int k = static_cast<int>(g.range(1, 4));
    for (int i = 0; i < k; ++i) {
      degs.push_back(static_cast<int>(g.range(1, 6)));
      r.add_generator("g" + std::to_string(i), {degs.back()});
    }
    for (int n = 0; n <= 20; ++n)
      EXPECT_TRUE(graded_piece(r, {n}).same_group(group(partition_count(degs, n))))
          << "degree " << n << " " << wbtest::seed_note();
  }
}

TEST(PresentationProperty, MapWithZeroResidualsBoundsImageRanks) {
  // c4 -> x^2, c6 -> x^3, Delta -> 0 into Z[x] with |x| = 4 kills c4^3 - c6^2 - 1728 Delta.
  RingPresentation target;
  target.name = "Z[x]";
  target.add_generator("x", {4});
  const RingPresentation mf = load_ring("mf.json");
  EXPECT_TRUE(check_map(mf, target, {"x^2", "x^3", "0"}).ok());
  EXPECT_FALSE(check_map(mf, target, {"x^2", "x^3", "x^6"}).ok());
  EXPECT_THROW(check_map(mf, target, {"x", "x^3", "0"}), DegreeMismatch);
}

TEST(DiscriminantMaps, CorrectedSignsPassPrintedSignsFail) {
  EXPECT_TRUE(verify_discriminant_map("djf-2local").ok());
  EXPECT_TRUE(verify_discriminant_map("djf-integral").ok());
  EXPECT_TRUE(verify_discriminant_map("djf-odd").ok());
  EXPECT_FALSE(verify_discriminant_map("djf-odd-printed").ok());
  EXPECT_FALSE(verify_discriminant_map("djf-integral-printed").ok());
  EXPECT_THROW(verify_discriminant_map("nope"), ConfigError);
}

TEST(Localization, InvertingAOnTheTrigradedRing) {
  const RingPresentation r = load_ring("djf_tri_odd.json");
  const RingPresentation stable = load_ring("djf_inf_odd.json");
  for (int n : {4, 6, 8, 12}) {
    const LadderResult l = localize_rank(r, "a", {n, 0, n / 2});
    EXPECT_TRUE(l.stable.same_group(graded_piece(stable, {n, 0}))) << "n = " << n << ": " << l.stable.str();
  }
  EXPECT_TRUE(localize_rank(r, "a", {3, 1, 0}).stable.is_zero());
}

TEST(Localization, LadderStopsWhenThePieceIsFinal) {
  // In Z[x] every step of the x-ladder is Z.
  RingPresentation r;
  r.add_generator("x", {2});
  const LadderResult l = localize_rank(r, "x", {0});
  EXPECT_TRUE(l.stable.same_group(group(1)));
  for (const auto& s : l.steps) EXPECT_TRUE(s.same_group(group(1)));
  // Delta-multiples in mf grow without bound.
  EXPECT_THROW(localize_rank(load_ring("mf.json"), "Delta", {0}), NoStabilization);
}

TEST(LocalizationProperty, InvertingAGradingVariableCountsMonomials) {
  // Generators h_i of degree (d_i, e_i) with e_i in {0, 1} and g of degree (0, 1): the g-ladder from (n, n)
  // is constant at the number of monomials in the h_i of first degree n. Starting lower can plateau
  // before the last jump, which the run-length test cannot see.
  wbtest::Gen gen(32);
  for (int it = 0; it < 12; ++it) {
    RingPresentation r;
    r.add_generator("g", {0, 1});
    std::vector<int> degs;
    const int k = static_cast<int>(gen.range(1, 3));
    for (int i = 0; i < k; ++i) {
      degs.push_back(static_cast<int>(gen.range(1, 4)));
      r.add_generator("h" + std::to_string(i), {degs.back(), static_cast<int>(gen.range(0, 1))});
    }
    PieceEngine eng(r);
    const Poly g = r.parse("g");
    for (int n = 0; n <= 10; ++n) {
      const LadderResult l = localize_rank(eng, g, {n, n});
      EXPECT_TRUE(l.stable.same_group(group(partition_count(degs, n)))) << n << " " << wbtest::seed_note();
      for (std::size_t i = 1; i < l.steps.size(); ++i) EXPECT_GE(l.steps[i].free_rank, l.steps[i - 1].free_rank);
    }
  }
}

TEST(Subring, SpanOfSquaresInAPolynomialRing) {
  RingPresentation r;
  r.add_generator("x", {2});
  PieceEngine eng(r);
  SubringSpec s;
  s.generators = {r.parse("2*x")};
  s.generator_names = {"2x"};
  // degree 4: the subring contains 4x^2 only
  const GroupDescriptor g = subring_piece(eng, s, {4});
  EXPECT_TRUE(g.same_group(group(1)));
  const auto span = subring_span(eng, s, {4});
  ASSERT_EQ(span.size(), 1u);
  EXPECT_EQ(span[0], (SparseRow{{0, mpz_class(4)}}));
}
