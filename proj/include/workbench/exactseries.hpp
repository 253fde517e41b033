// Exact truncated Laurent series in q and zeta on the lattice (1/24)Z x (1/2)Z.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wb {

class NonExactDivision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SeedNotRoot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class OffLattice : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// n/d in lowest terms.
inline mpq_class reduced(long n, long d) {
  mpq_class q(n, d);
  q.canonicalize();
  return q;
}

// Exponents are stored as integers: q-exponents in units of 1/24, zeta-exponents in units of 1/2.
struct LatticeExponent {
  std::int64_t q24 = 0;
  std::int64_t z2 = 0;

  static LatticeExponent from_rational(const mpq_class& q, const mpq_class& z);
  mpq_class q() const { return reduced(q24, 24); }
  mpq_class z() const { return reduced(z2, 2); }
  auto operator<=>(const LatticeExponent&) const = default;
};

// Laurent polynomial in zeta^(1/2): exponent (units of 1/2) -> coefficient.
using Laurent = std::map<std::int64_t, mpq_class>;

Laurent laurent_mul(const Laurent& a, const Laurent& b);
void laurent_add_into(Laurent& acc, const Laurent& b, const mpq_class& scale = 1);
// Throws NonExactDivision when den does not divide num.
Laurent laurent_div_exact(const Laurent& num, const Laurent& den);
std::string laurent_to_string(const Laurent& p);

class QZSeries {
 public:
  static constexpr std::int64_t kInfinitePrec = std::int64_t(1) << 60;

  QZSeries() = default;  // zero series, exact
  explicit QZSeries(std::int64_t qprec24) : qprec24_(qprec24) {}

  static QZSeries constant(const mpq_class& c, std::int64_t qprec24 = kInfinitePrec);
  static QZSeries term(const mpq_class& c, const mpq_class& qexp, const mpq_class& zexp,
                       std::int64_t qprec24 = kInfinitePrec);
  static QZSeries from_laurent(const Laurent& level0, std::int64_t qprec24 = kInfinitePrec);

  std::int64_t qprec24() const { return qprec24_; }
  mpq_class qprec() const;
  bool exact() const { return qprec24_ >= kInfinitePrec; }
  bool is_zero() const { return levels_.empty(); }
  // q-valuation in units of 1/24; kInfinitePrec for the zero series.
  std::int64_t valuation24() const;

  const std::map<std::int64_t, Laurent>& levels() const { return levels_; }
  Laurent level(std::int64_t q24) const;
  mpq_class coeff(std::int64_t q24, std::int64_t z2) const;
  mpq_class coeff(const mpq_class& q, const mpq_class& z) const;
  std::size_t term_count() const;

  void add_term(std::int64_t q24, std::int64_t z2, const mpq_class& c);
  void set_level(std::int64_t q24, Laurent lv);
  QZSeries truncated(std::int64_t qprec24) const;

  bool operator==(const QZSeries& o) const { return qprec24_ == o.qprec24_ && levels_ == o.levels_; }
  // Equality of coefficients below the smaller of the two precisions.
  bool agrees_with(const QZSeries& o) const;

  std::string to_json() const;
  static QZSeries from_json(const std::string& text);
  std::string to_string() const;

 private:
  std::map<std::int64_t, Laurent> levels_;
  std::int64_t qprec24_ = kInfinitePrec;
};

QZSeries add(const QZSeries& a, const QZSeries& b);
QZSeries sub(const QZSeries& a, const QZSeries& b);
QZSeries neg(const QZSeries& a);
QZSeries scale(const QZSeries& a, const mpq_class& c);
QZSeries mul(const QZSeries& a, const QZSeries& b);
QZSeries pow(const QZSeries& a, unsigned k);
QZSeries div_exact(const QZSeries& num, const QZSeries& den);
QZSeries scale_z(const QZSeries& s, std::int64_t k);
// Coefficients of w^0..w^K where zeta = exp(w).
std::vector<QZSeries> z_taylor(const QZSeries& s, unsigned K);
// Root of b^3 + c2 b^2 + c1 b + c0 = 0 whose q^0 level is seed.
QZSeries triangular_cubic_solve(const QZSeries& c2, const QZSeries& c1, const QZSeries& c0,
                                const Laurent& seed);

inline QZSeries operator+(const QZSeries& a, const QZSeries& b) { return add(a, b); }
inline QZSeries operator-(const QZSeries& a, const QZSeries& b) { return sub(a, b); }
inline QZSeries operator-(const QZSeries& a) { return neg(a); }
inline QZSeries operator*(const QZSeries& a, const QZSeries& b) { return mul(a, b); }
inline QZSeries operator*(const mpq_class& c, const QZSeries& a) { return scale(a, c); }

}  // namespace wb
