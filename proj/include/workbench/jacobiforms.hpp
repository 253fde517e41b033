// Named modular and weak Jacobi forms as exact q,zeta-expansions.
#pragma once

#include <string>
#include <vector>

#include "workbench/exactseries.hpp"

namespace wb {

class EmptyWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension n = 2k + 4m; the index is stored doubled so that m = 1/2 is representable.
struct FormMeta {
  int dimension = 0;
  int doubled_index = 0;

  int weight() const { return (dimension - 2 * doubled_index) / 2; }
  bool valid() const { return (dimension - 2 * doubled_index) % 2 == 0; }
  FormMeta operator+(const FormMeta& o) const {
    return {dimension + o.dimension, doubled_index + o.doubled_index};
  }
  bool operator==(const FormMeta&) const = default;
};

struct NamedForm {
  std::string name;
  FormMeta meta;
  QZSeries series;
};

NamedForm product(const NamedForm& f, const NamedForm& g);
NamedForm power(const NamedForm& f, unsigned k);

// qprec arguments are in units of 1/24.
QZSeries eta(std::int64_t qprec24);
QZSeries delta_series(std::int64_t qprec24);
QZSeries theta1_norm(std::int64_t qprec24);
QZSeries c4_series(std::int64_t qprec24);
QZSeries c6_series(std::int64_t qprec24);

NamedForm form_c4(std::int64_t qprec24);
NamedForm form_c6(std::int64_t qprec24);
NamedForm form_delta(std::int64_t qprec24);
NamedForm jacobi_a(std::int64_t qprec24);
NamedForm jacobi_c(std::int64_t qprec24);
NamedForm jacobi_b(std::int64_t qprec24);

// Expansion by CLI name: eta, delta, c4, c6, a, b, c.
QZSeries expand_named(const std::string& name, std::int64_t qprec24);

struct ResidualReport {
  bool zero = true;
  QZSeries residual;
  std::string leading;  // lowest nonzero term, empty when zero
};

// 432c^2 - b^3 + 3 c4 a^4 b - 2 c6 a^6 for the given forms.
ResidualReport cubic_relation_residual(const QZSeries& a, const QZSeries& b, const QZSeries& c,
                                       const QZSeries& c4, const QZSeries& c6);
ResidualReport verify_cubic_relation(std::int64_t qprec24);

struct SymmetryReport {
  std::size_t checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// c(n, r) = (-1)^(2m lambda) c(n + lambda r + m lambda^2, r + 2 m lambda) on the guaranteed window.
SymmetryReport elliptic_symmetry_check(const NamedForm& f, int lambda);
bool weak_check(const NamedForm& f);
// zeta-exponents all lie in Z + m.
bool zeta_support_ok(const NamedForm& f);

struct BasisResult {
  std::vector<NamedForm> forms;
  std::size_t rank = 0;
};

// Monomials a^i b^j c^k c4^p c6^e Delta^r with k, e <= 1 of the requested bidegree.
BasisResult jf_basis_series(int dimension, int doubled_index, std::int64_t qprec24);
std::size_t jf_basis_count(int dimension, int doubled_index);

}  // namespace wb
