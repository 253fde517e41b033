// Graded Hopf algebroids (A, Γ) with Γ = A[γ]/(monic rules), the cobar complex and its cohomology,
// invariant ideals, change of cover and base change along comodule algebras.
#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "workbench/gradedpresent.hpp"

namespace wb {

class UnsupportedIdealShape : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NotInvariant : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class WitnessFails : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class WindowTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnvalidatedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Element of Γ^{⊗s}: (A-exponents of the left coefficient, γ-exponents per slot) -> coefficient.
using Tensor = std::map<std::pair<Exponents, std::vector<Exponents>>, mpq_class>;

// γ_gen^power = rhs, with rhs of lower degree in γ_gen.
struct GammaRule {
  std::size_t gen = 0;
  int power = 1;
  Poly rhs;
  std::string text;
};

class HopfAlgebroid {
 public:
  std::string name;
  RingPresentation base;
  std::vector<Generator> gamma;
  std::vector<GammaRule> rules;
  std::vector<Poly> eta_r;                                 // per A-generator, combined variables
  std::vector<Poly> epsilon;                               // per Γ-generator, combined variables
  std::vector<std::vector<std::pair<Poly, Poly>>> delta;   // per Γ-generator
  std::vector<std::pair<std::string, Poly>> definitions;   // parse-time abbreviations, e.g. r

  std::size_t na() const { return base.nvars(); }
  std::size_t ng() const { return gamma.size(); }
  std::size_t nc() const { return na() + ng(); }
  std::size_t arity() const { return base.arity(); }
  std::vector<std::string> names() const;
  std::vector<MultiDegree> degrees() const;
  // Combined ring A[γ] with A's relations and the Γ-rules, for degreewise work.
  RingPresentation combined() const;

  Poly parse(const std::string& text) const;
  void set_eta_r(const std::string& gen, const std::string& text);
  void set_delta(const std::string& gen, const std::vector<std::pair<std::string, std::string>>& terms);
  void add_gamma_generator(const std::string& name, MultiDegree degree);
  // Turns a relation into a rule monic (up to a unit) in some Γ-generator.
  void add_gamma_relation(const std::string& text);
  void add_gamma_relation(const Poly& p, const std::string& text);
  void add_definition(const std::string& name, const std::string& text);

  // Normal forms.
  Poly reduce(const Poly& p) const;
  Poly eta_r_of(const Poly& a) const;  // a involves only A-variables
  Poly epsilon_of(const Poly& g) const;
  Tensor normalize(const std::vector<Poly>& slots) const;
  Tensor delta_of(const Poly& g) const;
  Tensor tensor_product(const Tensor& x, const Tensor& y, std::size_t slots) const;
  bool gamma_zero(const Poly& p) const;
  bool tensor_zero(const Tensor& t) const;
  std::string tensor_string(const Tensor& t) const;

  Poly a_part(const Poly& combined_poly) const;  // restrict an A-only combined poly to A-variables
  Poly lift_a(const Poly& a) const;              // A-variables into combined variables
  bool positive_gamma(const Exponents& e) const;
  bool reduced_gamma(const Exponents& e) const;

  static HopfAlgebroid from_json(const std::string& text);
  std::string to_json() const;

 private:
  mutable std::mutex mu_;
  mutable std::map<Exponents, Poly> reduce_cache_;
  mutable std::map<Exponents, Poly> eta_cache_;
  mutable std::map<Exponents, Tensor> delta_cache_;
  mutable std::shared_ptr<PieceEngine> a_engine_;

 public:
  PieceEngine& a_engine() const;
  HopfAlgebroid() = default;
  HopfAlgebroid(const HopfAlgebroid& o);
  HopfAlgebroid& operator=(const HopfAlgebroid& o);
  void clear_caches();
};

struct ValidationReport {
  std::vector<std::string> failures;
  std::size_t checks = 0;
  bool ok() const { return failures.empty(); }
};

// Counit, coassociativity, Δ against Γ-rules, Δ∘η_R = 1⊗η_R, ε∘η_R = id and η_R on A-relations,
// all through degree `bound` (first grading component).
ValidationReport validate(const HopfAlgebroid& h, int bound);

struct ExtCell {
  int s = 0;
  MultiDegree t;
  GroupDescriptor group;
};

struct ExtTable {
  std::string name;
  std::size_t arity = 1;
  std::vector<ExtCell> cells;  // sorted by (s, t)
  const ExtCell* find(int s, const MultiDegree& t) const;
  GroupDescriptor at(int s, const MultiDegree& t) const;
  std::string csv() const;
};

struct CobarWindow {
  int s_max = 2;
  MultiDegree hi;  // componentwise bound on the internal degree
  std::size_t max_columns = 20000;
};

// Ext_{(A,Γ)}(A, A) through the normalized cobar complex; d∘d = 0 is checked on every cell.
ExtTable cobar_ext(const HopfAlgebroid& h, const CobarWindow& w);

// Dimension of the cobar group C^s in internal degree t (A-rank times γ-tuples).
std::size_t cobar_rank(const HopfAlgebroid& h, int s, const MultiDegree& t);

// Ideal generated by integer constants and A-generators.
bool invariant_ideal_check(const HopfAlgebroid& h, const std::vector<std::string>& gens);
HopfAlgebroid mod_invariant_ideal(const HopfAlgebroid& h, const std::vector<std::string>& gens);

struct CoverReduction {
  std::vector<std::string> kill;     // A-generators set to zero in A'
  std::vector<std::string> witness;  // Γ-monomials forming a basis of A'⊗Γ over g(A)
  int bound = 12;
};

// Degree at which the witness basis fails, or nullopt when it verifies through the bound.
std::optional<MultiDegree> check_witness(const HopfAlgebroid& h, const CoverReduction& red);
HopfAlgebroid change_of_cover(const HopfAlgebroid& h, const CoverReduction& red);

// Comodule algebra M = A[new generators]/(relations) with coaction images on the new generators.
struct ComoduleAlgebra {
  std::string name;
  std::vector<Generator> gens;
  std::vector<std::string> relations;
  std::map<std::string, std::string> coaction;  // generator -> element of Γ⊗M, combined names
};

HopfAlgebroid base_change_comodule(const HopfAlgebroid& h, const ComoduleAlgebra& m);

// Do two tables agree cell by cell on the cells present in both windows?
std::vector<std::string> compare_ext(const ExtTable& x, const ExtTable& y);

}  // namespace wb
