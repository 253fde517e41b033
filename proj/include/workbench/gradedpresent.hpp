// Finitely presented multigraded commutative rings and their degreewise abelian groups.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "workbench/lattice.hpp"
#include "workbench/poly.hpp"

namespace wb {

class InfinitePiece : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DegreeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NoStabilization : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Generator {
  std::string name;
  MultiDegree degree;
  bool inverted = false;
};

struct RingPresentation {
  std::string name;
  Coefficients coeffs;
  std::vector<Generator> gens;
  std::vector<Poly> relations;
  std::vector<std::string> relation_text;

  std::size_t arity() const { return gens.empty() ? 0 : gens[0].degree.size(); }
  std::size_t nvars() const { return gens.size(); }
  std::vector<std::string> names() const;
  std::vector<MultiDegree> degrees() const;
  int index_of(const std::string& name) const;  // -1 when absent
  Poly parse(const std::string& text) const;
  Poly var(const std::string& name) const;
  // Throws DegreeMismatch for inhomogeneous input.
  MultiDegree degree_of(const Poly& p) const;

  void add_generator(const std::string& name, MultiDegree degree, bool inverted = false);
  void add_relation(const std::string& text);
  void add_relation(const Poly& p, const std::string& text = "");

  static RingPresentation from_json(const std::string& text);
  std::string to_json() const;
};

// Cached per-degree monomial bases and relation lattices for one presentation.
class PieceEngine {
 public:
  explicit PieceEngine(RingPresentation pres);

  const RingPresentation& presentation() const { return pres_; }
  struct Basis {
    std::vector<Exponents> monos;
    std::map<Exponents, int> index;
  };
  // Monomials of degree d, excluding those killed by unit monomial relations.
  std::shared_ptr<const Basis> basis(const MultiDegree& d);
  // Degree-d piece of the ideal (plus p * e_i rows over F_p).
  std::vector<SparseRow> relation_rows(const MultiDegree& d);
  bool killed(const Exponents& e) const;
  // Integer row of p in degree d after clearing denominators (scale returned through *scale).
  SparseRow to_row(const Poly& p, const MultiDegree& d, mpz_class* scale = nullptr);
  Poly from_row(const SparseRow& r, const MultiDegree& d);
  std::string row_name(const SparseRow& r, const MultiDegree& d);
  GroupDescriptor piece(const MultiDegree& d, bool labels = true);
  // Does p vanish in the ring, up to a unit of the coefficients?
  bool in_ideal(const Poly& p);

 private:
  RingPresentation pres_;
  std::vector<MultiDegree> degs_;
  std::vector<Exponents> killers_;
  std::vector<std::pair<Poly, MultiDegree>> rels_;
  std::vector<long> weights_;
  bool nonneg_ = true;
  std::mutex mu_;
  std::map<MultiDegree, std::shared_ptr<const Basis>> cache_;

  void enumerate(std::size_t i, MultiDegree& rem, Exponents& cur, std::vector<Exponents>& out) const;
};

GroupDescriptor graded_piece(const RingPresentation& pres, const MultiDegree& d);

struct HilbertRow {
  MultiDegree degree;
  GroupDescriptor group;
};

// All degrees with lo <= d <= hi componentwise that carry monomials.
std::vector<MultiDegree> degrees_in_box(const RingPresentation& pres, const MultiDegree& lo, const MultiDegree& hi);
std::vector<HilbertRow> hilbert_table(PieceEngine& eng, const std::vector<MultiDegree>& degrees);
std::vector<HilbertRow> hilbert_table(const RingPresentation& pres, const MultiDegree& lo, const MultiDegree& hi);
std::string hilbert_csv(const std::vector<HilbertRow>& rows, std::size_t arity);
std::vector<std::string> degree_column_names(std::size_t arity);

struct MapReport {
  std::vector<std::string> residuals;  // one line per source relation that fails
  bool ok() const { return residuals.empty(); }
};

// Images are parsed in the target; source degrees are padded with zeros to the target arity.
MapReport check_map(const RingPresentation& source, const RingPresentation& target,
                    const std::vector<std::string>& images);

struct LadderResult {
  GroupDescriptor stable;
  std::vector<GroupDescriptor> steps;
  MultiDegree stable_degree;
};

// Multiplication ladder by a homogeneous element g starting at d.
LadderResult localize_rank(PieceEngine& eng, const Poly& g, const MultiDegree& d, std::size_t max_steps = 16,
                           std::size_t run = 3);
LadderResult localize_rank(const RingPresentation& pres, const std::string& g, const MultiDegree& d,
                           std::size_t max_steps = 16);

RingPresentation quotient_by(const RingPresentation& pres, const std::vector<std::string>& elements);

// Subring generated by the given elements, modulo the ideal of the subring generated by `ideal`.
struct SubringSpec {
  std::vector<Poly> generators;
  std::vector<std::string> generator_names;
  std::vector<Poly> ideal;
};
GroupDescriptor subring_piece(PieceEngine& eng, const SubringSpec& spec, const MultiDegree& d);
std::vector<SparseRow> subring_span(PieceEngine& eng, const SubringSpec& spec, const MultiDegree& d);

}  // namespace wb
