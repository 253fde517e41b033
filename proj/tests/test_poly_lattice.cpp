#include <gtest/gtest.h>

#include "test_support.hpp"
#include "workbench/lattice.hpp"
#include "workbench/poly.hpp"

using namespace wb;

namespace {

using Matrix = std::vector<std::vector<long>>;

mpz_class det(const Matrix& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  mpz_class d = 0;
  for (std::size_t c = 0; c < n; ++c) {
    Matrix sub;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<long> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      sub.push_back(row);
    }
    const mpz_class t = m[0][c] * det(sub);
    d += (c % 2 == 0) ? t : mpz_class(-t);
  }
  return d;
}

void subsets(std::size_t n, std::size_t k, std::size_t from, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = from; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

// Free rank and prime-power torsion of Z^n / rowspan(m) from determinantal divisors.
GroupDescriptor cokernel_by_minors(const Matrix& m, std::size_t n) {
  std::vector<mpz_class> D{1};
  for (std::size_t k = 1; k <= std::min(m.size(), n); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(m.size(), k, 0, cur, rs);
    subsets(n, k, 0, cur, cs);
    mpz_class g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        Matrix sub;
        for (auto i : r) {
          std::vector<long> row;
          for (auto j : c) row.push_back(m[i][j]);
          sub.push_back(row);
        }
        g = gcd(g, det(sub));
      }
    if (g == 0) break;
    D.push_back(g);
  }
  GroupDescriptor out;
  const std::size_t rank = D.size() - 1;
  out.free_rank = n - rank;
  for (std::size_t k = 1; k <= rank; ++k) {
    const mpz_class d = D[k] / D[k - 1];
    for (const auto& [p, e] : factorize(d)) {
      mpz_class q;
      mpz_pow_ui(q.get_mpz_t(), p.get_mpz_t(), e);
      out.torsion.push_back(q);
    }
  }
  std::sort(out.torsion.begin(), out.torsion.end());
  return out;
}

std::vector<SparseRow> rows_of(const Matrix& m) {
  std::vector<SparseRow> rows;
  for (const auto& r : m) {
    std::map<int, mpz_class> e;
    for (std::size_t j = 0; j < r.size(); ++j) e[static_cast<int>(j)] = r[j];
    rows.push_back(make_row(e));
  }
  return rows;
}

}  // namespace

TEST(Poly, ParseAndArithmetic) {
  const std::vector<std::string> names{"x", "y"};
  const Poly p = parse_poly("(x + y)^2 - 2*x*y", names);
  EXPECT_EQ(p, parse_poly("x^2 + y^2", names));
  EXPECT_EQ(parse_poly("1/4*x - x/4", names), Poly(2));
  EXPECT_EQ(parse_poly("x*y", names).to_string(names), "x*y");
}

TEST(Poly, ParseErrors) {
  const std::vector<std::string> names{"x"};
  EXPECT_THROW(parse_poly("x +", names), ParseError);
  EXPECT_THROW(parse_poly("z", names), ParseError);
  EXPECT_THROW(parse_poly("(x", names), ParseError);
}

TEST(Poly, HomogeneousDegree) {
  const std::vector<std::string> names{"x", "y"};
  const std::vector<MultiDegree> degs{{2, 1}, {3, 0}};
  MultiDegree d;
  EXPECT_FALSE(homogeneous_degree(parse_poly("x^3 - y^2", names), degs, 2, d));
  EXPECT_TRUE(homogeneous_degree(parse_poly("x^3 + 2*x^3", names), degs, 2, d));
  EXPECT_EQ(d, (MultiDegree{6, 3}));
}

TEST(Poly, SubstituteIsARingMap) {
  const std::vector<std::string> names{"x", "y"};
  const Poly f = parse_poly("x^2*y - 3*y", names);
  const std::vector<Poly> images{parse_poly("x + y", names), parse_poly("x*y", names)};
  const Poly g = parse_poly("x - 1", names);
  EXPECT_EQ((f * g).substitute(images), f.substitute(images) * g.substitute(images));
}

TEST(Coefficients, ParseForms) {
  EXPECT_EQ(Coefficients::parse("Z"), Coefficients::integers());
  EXPECT_EQ(Coefficients::parse("Z_(2)"), Coefficients::local(2));
  EXPECT_EQ(Coefficients::parse("F_3"), Coefficients::field(3));
  EXPECT_EQ(Coefficients::parse("Z[1/6]"), Coefficients::inverting({2, 3}));
  EXPECT_THROW(Coefficients::parse("R"), std::invalid_argument);
  EXPECT_TRUE(Coefficients::local(2).is_unit(15));
  EXPECT_FALSE(Coefficients::local(2).is_unit(6));
}

TEST(Lattice, QuotientGroupExamples) {
  // Z^2 / <(2, 0), (0, 12)> = Z/2 + Z/4 + Z/3
  const auto g = quotient_group(2, rows_of({{2, 0}, {0, 12}}), Coefficients::integers());
  EXPECT_EQ(g.free_rank, 0u);
  EXPECT_EQ(g.torsion, (std::vector<mpz_class>{2, 3, 4}));
  const auto g2 = quotient_group(2, rows_of({{2, 0}, {0, 12}}), Coefficients::local(2));
  EXPECT_EQ(g2.torsion, (std::vector<mpz_class>{2, 4}));
  const auto g3 = quotient_group(3, rows_of({{2, 0, 0}}), Coefficients::inverting({2}));
  EXPECT_TRUE(g3.same_group(GroupDescriptor{2, {}, {}}));
}

TEST(Lattice, SmithWithNegativePivots) {
  // Once looped forever: nearest-integer rounding with a negative pivot.
  const Matrix m{{192, -21, 21}, {0, 64, -64}, {0, 0, 64}};
  EXPECT_TRUE(quotient_group(3, rows_of(m), Coefficients::integers()).same_group(cokernel_by_minors(m, 3)));
}

TEST(LatticeProperty, SmithMatchesDeterminantalDivisors) {
  wbtest::Gen g(21);
  for (int it = 0; it < 300; ++it) {
    const std::size_t rows = static_cast<std::size_t>(g.range(1, 4)), cols = static_cast<std::size_t>(g.range(1, 4));
    Matrix m(rows, std::vector<long>(cols));
    for (auto& r : m)
      for (auto& x : r) x = g.coin(0.3) ? 0 : g.range(-40, 40);
    const GroupDescriptor got = quotient_group(static_cast<int>(cols), rows_of(m), Coefficients::integers());
    const GroupDescriptor want = cokernel_by_minors(m, cols);
    EXPECT_TRUE(got.same_group(want)) << got.str() << " vs " << want.str() << " " << wbtest::seed_note() << " it "
                                      << it;
  }
}

TEST(LatticeProperty, EchelonMembership) {
  wbtest::Gen g(22);
  for (int it = 0; it < 100; ++it) {
    const int cols = static_cast<int>(g.range(1, 5));
    Echelon e(cols);
    std::vector<SparseRow> gens;
    for (int k = 0; k < 3; ++k) {
      std::map<int, mpz_class> m;
      for (int j = 0; j < cols; ++j) m[j] = g.range(-6, 6);
      gens.push_back(make_row(m));
      e.insert(gens.back());
    }
    // integer combinations are members
    SparseRow v;
    for (const auto& r : gens) v = row_add(v, r, g.range(-3, 3));
    EXPECT_TRUE(e.contains(v)) << wbtest::seed_note();
    std::vector<mpz_class> coords;
    EXPECT_TRUE(e.coordinates(v, coords));
  }
}

TEST(Lattice, SubquotientAndPreimage) {
  // L1 = Z^2, L2 = <(2, 0)> gives Z + Z/2
  const auto sq = subquotient(2, rows_of({{1, 0}, {0, 1}}), rows_of({{2, 0}}), Coefficients::integers());
  EXPECT_EQ(sq.group.free_rank, 1u);
  EXPECT_EQ(sq.group.torsion, (std::vector<mpz_class>{2}));
  // c1 * (1, 1) + c2 * (2, 0) in <(4, 0)>: c1 = 0 and c2 even
  const auto pre = preimage(2, rows_of({{1, 1}, {2, 0}}), rows_of({{4, 0}}));
  ASSERT_EQ(pre.size(), 1u);
  EXPECT_EQ(pre[0], (SparseRow{{1, mpz_class(2)}}));
}

TEST(Lattice, ContainsUpToUnits) {
  EXPECT_TRUE(contains_up_to_units(1, rows_of({{3}}), rows_of({{1}})[0], Coefficients::local(2)));
  EXPECT_FALSE(contains_up_to_units(1, rows_of({{2}}), rows_of({{1}})[0], Coefficients::local(2)));
}

TEST(Lattice, Factorize) {
  const auto f = factorize(360);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0], (std::pair<mpz_class, unsigned>{2, 3}));
  EXPECT_EQ(f[1], (std::pair<mpz_class, unsigned>{3, 2}));
  EXPECT_EQ(f[2], (std::pair<mpz_class, unsigned>{5, 1}));
}
