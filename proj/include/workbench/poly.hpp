// Sparse multivariate polynomials with rational coefficients, plus a small expression parser.
#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace wb {

using Exponents = std::vector<int>;
using MultiDegree = std::vector<int>;

class Poly {
 public:
  Poly() = default;
  explicit Poly(std::size_t nvars) : nvars_(nvars) {}
  static Poly constant(std::size_t nvars, const mpq_class& c);
  static Poly variable(std::size_t nvars, std::size_t i, int power = 1);
  static Poly monomial(const Exponents& e, const mpq_class& c = 1);

  std::size_t nvars() const { return nvars_; }
  const std::map<Exponents, mpq_class>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  mpq_class coeff(const Exponents& e) const;
  void add_term(const Exponents& e, const mpq_class& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly operator*(const mpq_class& c) const;
  bool operator==(const Poly& o) const { return terms_ == o.terms_; }
  bool operator<(const Poly& o) const { return terms_ < o.terms_; }

  Poly pow(unsigned k) const;
  // Ring homomorphism sending variable i to images[i].
  Poly substitute(const std::vector<Poly>& images) const;
  // Same variables, extended with extra trailing variables.
  Poly extend(std::size_t new_nvars, std::size_t offset = 0) const;
  Poly map_terms(const std::function<mpq_class(const Exponents&, const mpq_class&)>& f) const;

  // Least common multiple of coefficient denominators.
  mpz_class denominator_lcm() const;
  std::string to_string(const std::vector<std::string>& names) const;

 private:
  std::size_t nvars_ = 0;
  std::map<Exponents, mpq_class> terms_;
};

MultiDegree monomial_degree(const Exponents& e, const std::vector<MultiDegree>& gen_degrees, std::size_t arity);
// Returns false when the polynomial is not homogeneous.
bool homogeneous_degree(const Poly& p, const std::vector<MultiDegree>& gen_degrees, std::size_t arity,
                        MultiDegree& out);
std::string monomial_name(const Exponents& e, const std::vector<std::string>& names);
std::string degree_str(const MultiDegree& d);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grammar: sums of products of powers of names, integers, fractions and parenthesised expressions.
Poly parse_poly(const std::string& text, const std::vector<std::string>& names);

}  // namespace wb
