// Integer lattices: echelon bases, Smith normal form, subquotients and preimages.
#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace wb {

using SparseRow = std::vector<std::pair<int, mpz_class>>;  // sorted by column, no zeros
using QRow = std::vector<std::pair<std::size_t, mpq_class>>;

SparseRow make_row(std::map<int, mpz_class> entries);
SparseRow row_add(const SparseRow& a, const SparseRow& b, const mpz_class& cb);  // a + cb*b
SparseRow row_scale(const SparseRow& a, const mpz_class& c);
SparseRow row_shift(const SparseRow& a, int offset);

std::size_t rational_rank(const std::vector<QRow>& rows, std::size_t ncols);

// Ring of coefficients: Z, a localization Z_(p), Z with some primes inverted, or F_p.
struct Coefficients {
  enum class Kind { Integers, Local, Inverted, Field, Rationals };
  Kind kind = Kind::Integers;
  unsigned long prime = 0;            // Local and Field
  std::set<unsigned long> inverted;   // Inverted

  static Coefficients integers() { return {}; }
  static Coefficients local(unsigned long p) { return {Kind::Local, p, {}}; }
  static Coefficients field(unsigned long p) { return {Kind::Field, p, {}}; }
  static Coefficients inverting(std::set<unsigned long> ps) { return {Kind::Inverted, 0, std::move(ps)}; }
  static Coefficients rationals() { return {Kind::Rationals, 0, {}}; }
  static Coefficients parse(const std::string& s);

  bool is_unit_prime(const mpz_class& p) const;
  // True when every prime factor of c is a unit.
  bool is_unit(const mpz_class& c) const;
  std::string name() const;
  bool operator==(const Coefficients&) const = default;
};

struct GroupDescriptor {
  std::size_t free_rank = 0;
  std::vector<mpz_class> torsion;  // prime-power orders, sorted
  std::vector<std::string> labels; // free generators first, then torsion generators

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  // Compares the isomorphism type only.
  bool same_group(const GroupDescriptor& o) const { return free_rank == o.free_rank && torsion == o.torsion; }
  // F_p-dimension of the group tensored with F_p.
  std::size_t dim_mod(unsigned long p) const;
  std::string str() const;
  std::string torsion_str() const;  // e.g. "2;2;9"
};

GroupDescriptor direct_sum(const GroupDescriptor& a, const GroupDescriptor& b);

// Echelon basis of a sublattice of Z^ncols; rows keyed by their leading column.
class Echelon {
 public:
  explicit Echelon(int ncols = 0) : ncols_(ncols) {}
  int ncols() const { return ncols_; }
  // Returns true when the rank grew.
  bool insert(SparseRow r);
  void insert_all(const std::vector<SparseRow>& rows) {
    for (const auto& r : rows) insert(r);
  }
  bool contains(const SparseRow& v) const;
  // Coordinates of v in rows() order; nullopt-like empty flag when v is not in the lattice.
  bool coordinates(const SparseRow& v, std::vector<mpz_class>& out) const;
  std::vector<SparseRow> rows() const;
  std::size_t rank() const { return rows_.size(); }

 private:
  int ncols_;
  std::map<int, SparseRow> rows_;
};

struct SmithResult {
  std::vector<mpz_class> diagonal;  // nonzero invariant factors, positive, divisibility chain
  std::vector<std::vector<mpz_class>> vinv;  // ncols x ncols, rows give cokernel generators
};

SmithResult smith_dense(std::vector<std::vector<mpz_class>> a, std::size_t ncols, bool want_transform);

using ColumnNamer = std::function<std::string(const SparseRow&)>;

// Z^ncols / span(rows), localized.
GroupDescriptor quotient_group(int ncols, const std::vector<SparseRow>& rows, const Coefficients& coeffs,
                               const ColumnNamer& namer = nullptr);

// L1 / L2 for lattices L2 inside L1 (L2 is replaced by L2 + nothing; elements outside L1 are an error).
struct Subquotient {
  GroupDescriptor group;
  std::vector<SparseRow> free_reps;     // ambient representatives of free generators
  std::vector<SparseRow> torsion_reps;  // ambient representatives, one per raw invariant factor > 1 kept
  std::vector<mpz_class> torsion_orders;
};

Subquotient subquotient(int ncols, const std::vector<SparseRow>& l1, const std::vector<SparseRow>& l2,
                        const Coefficients& coeffs, const ColumnNamer& namer = nullptr);

// Rows are pairs (first-block part, second-block part). Returns a basis of
// { second part of v : v in span(rows), first part of v = 0 }.
std::vector<SparseRow> project_kernel(int ncols1, int ncols2,
                                      const std::vector<std::pair<SparseRow, SparseRow>>& rows);

// Basis of { c in Z^k : sum c_i d_i in span(l2) } where d_i = images[i].
std::vector<SparseRow> preimage(int ncols, const std::vector<SparseRow>& images, const std::vector<SparseRow>& l2);

// Is some unit multiple (in coeffs) of v inside span(lattice)?
bool contains_up_to_units(int ncols, const std::vector<SparseRow>& lattice, const SparseRow& v,
                          const Coefficients& coeffs);

std::vector<std::pair<mpz_class, unsigned>> factorize(mpz_class n);

}  // namespace wb
