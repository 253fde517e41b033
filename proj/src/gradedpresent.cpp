#include "workbench/gradedpresent.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>
#include <sstream>

#include "workbench/parallel.hpp"

namespace wb {

using nlohmann::json;

std::vector<std::string> RingPresentation::names() const {
  std::vector<std::string> out;
  for (const auto& g : gens) out.push_back(g.name);
  return out;
}

std::vector<MultiDegree> RingPresentation::degrees() const {
  std::vector<MultiDegree> out;
  for (const auto& g : gens) out.push_back(g.degree);
  return out;
}

int RingPresentation::index_of(const std::string& n) const {
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gens[i].name == n) return static_cast<int>(i);
  return -1;
}

Poly RingPresentation::parse(const std::string& text) const { return parse_poly(text, names()); }

Poly RingPresentation::var(const std::string& n) const {
  const int i = index_of(n);
  if (i < 0) throw std::invalid_argument("unknown generator '" + n + "' in " + name);
  return Poly::variable(nvars(), static_cast<std::size_t>(i));
}

MultiDegree RingPresentation::degree_of(const Poly& p) const {
  MultiDegree d;
  if (!homogeneous_degree(p, degrees(), arity(), d))
    throw DegreeMismatch("inhomogeneous element " + p.to_string(names()) + " in " + name);
  return d;
}

void RingPresentation::add_generator(const std::string& n, MultiDegree degree, bool inverted) {
  if (!gens.empty() && degree.size() != arity())
    throw DegreeMismatch("generator " + n + " has the wrong grading arity");
  if (index_of(n) >= 0) throw std::invalid_argument("duplicate generator " + n);
  gens.push_back({n, std::move(degree), inverted});
  for (auto& r : relations) r = r.extend(gens.size());
}

void RingPresentation::add_relation(const std::string& text) { add_relation(parse(text), text); }

void RingPresentation::add_relation(const Poly& p, const std::string& text) {
  degree_of(p);
  relations.push_back(p.nvars() == nvars() ? p : p.extend(nvars()));
  relation_text.push_back(text.empty() ? p.to_string(names()) : text);
}

RingPresentation RingPresentation::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("presentation JSON: ") + e.what());
  }
  RingPresentation p;
  try {
    p.name = j.value("name", std::string("ring"));
    p.coeffs = Coefficients::parse(j.value("coefficients", std::string("Z")));
    for (const auto& g : j.at("generators"))
      p.add_generator(g.at("name").get<std::string>(), g.at("degree").get<MultiDegree>(),
                      g.value("inverted", false));
    for (const auto& r : j.value("relations", json::array())) p.add_relation(r.get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError("presentation '" + p.name + "': " + e.what());
  } catch (const ParseError& e) {
    throw ConfigError("presentation '" + p.name + "': " + e.what());
  } catch (const DegreeMismatch& e) {
    throw ConfigError("presentation '" + p.name + "': " + e.what());
  }
  return p;
}

std::string RingPresentation::to_json() const {
  json j;
  j["name"] = name;
  j["coefficients"] = coeffs.name();
  j["generators"] = json::array();
  for (const auto& g : gens) {
    json x{{"name", g.name}, {"degree", g.degree}};
    if (g.inverted) x["inverted"] = true;
    j["generators"].push_back(x);
  }
  j["relations"] = relation_text;
  return j.dump(2);
}

// ------------------------------------------------------------------ engine

PieceEngine::PieceEngine(RingPresentation pres) : pres_(std::move(pres)) {
  degs_ = pres_.degrees();
  weights_.assign(pres_.arity(), 1);
  for (const auto& d : degs_)
    for (int x : d)
      if (x < 0) nonneg_ = false;
  for (std::size_t r = 0; r < pres_.relations.size(); ++r) {
    const Poly& rel = pres_.relations[r];
    if (rel.is_zero()) continue;
    MultiDegree d = pres_.degree_of(rel);
    if (rel.size() == 1) {
      const mpq_class c = rel.terms().begin()->second;
      const bool unit = pres_.coeffs.kind == Coefficients::Kind::Field
                            ? (c.get_num() % mpz_class(pres_.coeffs.prime) != 0 &&
                               c.get_den() % mpz_class(pres_.coeffs.prime) != 0)
                            : pres_.coeffs.is_unit(c.get_num()) && pres_.coeffs.is_unit(c.get_den());
      if (unit) {
        killers_.push_back(rel.terms().begin()->first);
        continue;
      }
    }
    rels_.emplace_back(rel * mpq_class(rel.denominator_lcm()), d);
  }
}

bool PieceEngine::killed(const Exponents& e) const {
  for (const auto& k : killers_) {
    bool div = true;
    for (std::size_t i = 0; i < k.size(); ++i)
      if (e[i] < k[i]) {
        div = false;
        break;
      }
    if (div) return true;
  }
  return false;
}

void PieceEngine::enumerate(std::size_t i, MultiDegree& rem, Exponents& cur, std::vector<Exponents>& out) const {
  const std::size_t n = degs_.size();
  if (i == n) {
    for (int x : rem)
      if (x != 0) return;
    if (!killed(cur)) out.push_back(cur);
    return;
  }
  const MultiDegree& g = degs_[i];
  int k = 0;
  while (true) {
    enumerate(i + 1, rem, cur, out);
    // add one more factor of generator i
    bool ok = true;
    long f = 0;
    for (std::size_t c = 0; c < rem.size(); ++c) {
      rem[c] -= g[c];
      if (nonneg_ && rem[c] < 0) ok = false;
      f += weights_[c] * rem[c];
    }
    ++k;
    cur[i] = k;
    if (!ok || f < 0) {
      for (std::size_t c = 0; c < rem.size(); ++c) rem[c] += k * g[c];
      cur[i] = 0;
      return;
    }
  }
}

std::shared_ptr<const PieceEngine::Basis> PieceEngine::basis(const MultiDegree& d) {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(d);
    if (it != cache_.end()) return it->second;
  }
  for (std::size_t i = 0; i < degs_.size(); ++i) {
    long f = 0;
    for (std::size_t c = 0; c < degs_[i].size(); ++c) f += weights_[c] * degs_[i][c];
    if (f <= 0)
      throw InfinitePiece("generator " + pres_.gens[i].name + " has non-positive degree; pieces of " +
                          pres_.name + " are not finitely generated");
  }
  auto b = std::make_shared<Basis>();
  if (d.size() == pres_.arity()) {
    MultiDegree rem = d;
    Exponents cur(degs_.size(), 0);
    enumerate(0, rem, cur, b->monos);
    std::sort(b->monos.begin(), b->monos.end());
    for (std::size_t i = 0; i < b->monos.size(); ++i) b->index.emplace(b->monos[i], static_cast<int>(i));
  }
  std::lock_guard<std::mutex> lk(mu_);
  return cache_.emplace(d, std::move(b)).first->second;
}

SparseRow PieceEngine::to_row(const Poly& p, const MultiDegree& d, mpz_class* scale) {
  const auto b = basis(d);
  const mpz_class l = p.denominator_lcm();
  if (scale) *scale = l;
  std::map<int, mpz_class> m;
  for (const auto& [e, c] : p.terms()) {
    if (killed(e)) continue;
    auto it = b->index.find(e);
    if (it == b->index.end())
      throw DegreeMismatch("monomial " + monomial_name(e, pres_.names()) + " is not of degree " + degree_str(d));
    const mpq_class v = c * l;
    m[it->second] += v.get_num();
  }
  return make_row(std::move(m));
}

Poly PieceEngine::from_row(const SparseRow& r, const MultiDegree& d) {
  const auto b = basis(d);
  Poly p(pres_.nvars());
  for (const auto& [c, v] : r) p.add_term(b->monos.at(static_cast<std::size_t>(c)), mpq_class(v));
  return p;
}

// Unit factors of the content and an overall sign are dropped from labels.
std::string PieceEngine::row_name(const SparseRow& r, const MultiDegree& d) {
  if (r.empty()) return from_row(r, d).to_string(pres_.names());
  mpz_class g = 0;
  for (const auto& [c, x] : r) g = gcd(g, x);
  mpz_class unit = 1;
  if (pres_.coeffs.kind != Coefficients::Kind::Field)
    for (const auto& [p, k] : factorize(g))
      if (pres_.coeffs.is_unit_prime(p))
        for (unsigned i = 0; i < k; ++i) unit *= p;
  if (sgn(r.front().second) < 0) unit = -unit;
  SparseRow s = r;
  for (auto& [c, x] : s) x /= unit;
  return from_row(s, d).to_string(pres_.names());
}

std::vector<SparseRow> PieceEngine::relation_rows(const MultiDegree& d) {
  std::vector<SparseRow> rows;
  for (const auto& [rel, e] : rels_) {
    MultiDegree md(d.size());
    for (std::size_t c = 0; c < d.size(); ++c) md[c] = d[c] - e[c];
    const auto mb = basis(md);
    for (const auto& m : mb->monos) {
      SparseRow r = to_row(rel * Poly::monomial(m), d);
      if (!r.empty()) rows.push_back(std::move(r));
    }
  }
  if (pres_.coeffs.kind == Coefficients::Kind::Field) {
    const auto b = basis(d);
    for (std::size_t i = 0; i < b->monos.size(); ++i)
      rows.push_back(SparseRow{{static_cast<int>(i), mpz_class(pres_.coeffs.prime)}});
  }
  return rows;
}

GroupDescriptor PieceEngine::piece(const MultiDegree& d, bool labels) {
  const auto b = basis(d);
  const auto rows = relation_rows(d);
  ColumnNamer namer;
  if (labels) namer = [&](const SparseRow& r) { return row_name(r, d); };
  return quotient_group(static_cast<int>(b->monos.size()), rows, pres_.coeffs, namer);
}

bool PieceEngine::in_ideal(const Poly& p) {
  if (p.is_zero()) return true;
  const MultiDegree d = pres_.degree_of(p);
  const auto b = basis(d);
  return contains_up_to_units(static_cast<int>(b->monos.size()), relation_rows(d), to_row(p, d), pres_.coeffs);
}

GroupDescriptor graded_piece(const RingPresentation& pres, const MultiDegree& d) {
  PieceEngine eng(pres);
  return eng.piece(d);
}

std::vector<MultiDegree> degrees_in_box(const RingPresentation& pres, const MultiDegree& lo, const MultiDegree& hi) {
  std::set<MultiDegree> reach{MultiDegree(pres.arity(), 0)};
  for (const auto& g : pres.gens) {
    bool positive = false;
    for (std::size_t c = 0; c < g.degree.size(); ++c) {
      if (g.degree[c] < 0) throw InfinitePiece("degrees_in_box needs non-negative generator degrees");
      if (g.degree[c] > 0) positive = true;
    }
    if (!positive) throw InfinitePiece("generator " + g.name + " has degree zero");
    std::vector<MultiDegree> frontier(reach.begin(), reach.end());
    for (auto d : frontier) {
      while (true) {
        bool inside = true;
        for (std::size_t c = 0; c < d.size(); ++c) {
          d[c] += g.degree[c];
          if (d[c] > hi[c]) inside = false;
        }
        if (!inside) break;
        reach.insert(d);
      }
    }
  }
  std::vector<MultiDegree> out;
  for (const auto& d : reach) {
    bool ok = true;
    for (std::size_t c = 0; c < d.size(); ++c)
      if (d[c] < lo[c]) ok = false;
    if (ok) out.push_back(d);
  }
  return out;
}

std::vector<HilbertRow> hilbert_table(PieceEngine& eng, const std::vector<MultiDegree>& degrees) {
  std::vector<HilbertRow> rows(degrees.size());
  parallel_for(degrees.size(), [&](std::size_t i) { rows[i] = {degrees[i], eng.piece(degrees[i])}; });
  return rows;
}

std::vector<HilbertRow> hilbert_table(const RingPresentation& pres, const MultiDegree& lo, const MultiDegree& hi) {
  PieceEngine eng(pres);
  return hilbert_table(eng, degrees_in_box(pres, lo, hi));
}

std::vector<std::string> degree_column_names(std::size_t arity) {
  static const std::vector<std::string> names{"n", "s", "m", "u"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arity; ++i) out.push_back(i < names.size() ? names[i] : "d" + std::to_string(i));
  return out;
}

std::string hilbert_csv(const std::vector<HilbertRow>& rows, std::size_t arity) {
  std::ostringstream os;
  for (const auto& c : degree_column_names(arity)) os << c << ",";
  os << "rank,torsion\n";
  for (const auto& r : rows) {
    for (int x : r.degree) os << x << ",";
    os << r.group.free_rank << "," << r.group.torsion_str() << "\n";
  }
  return os.str();
}

MapReport check_map(const RingPresentation& source, const RingPresentation& target,
                    const std::vector<std::string>& images) {
  if (images.size() != source.nvars()) throw DegreeMismatch("check_map: one image per source generator required");
  std::vector<Poly> imgs;
  for (std::size_t i = 0; i < images.size(); ++i) {
    Poly p = target.parse(images[i]);
    MultiDegree want = source.gens[i].degree;
    want.resize(target.arity(), 0);
    if (!p.is_zero() && target.degree_of(p) != want)
      throw DegreeMismatch("image of " + source.gens[i].name + " has degree " + degree_str(target.degree_of(p)) +
                           ", expected " + degree_str(want));
    imgs.push_back(p.nvars() == target.nvars() ? p : p.extend(target.nvars()));
  }
  PieceEngine eng(target);
  MapReport rep;
  for (std::size_t r = 0; r < source.relations.size(); ++r) {
    const Poly img = source.relations[r].substitute(imgs);
    if (!eng.in_ideal(img))
      rep.residuals.push_back("relation " + source.relation_text[r] + " maps to " + img.to_string(target.names()) +
                              ", which is nonzero in " + target.name);
  }
  return rep;
}

LadderResult localize_rank(PieceEngine& eng, const Poly& g, const MultiDegree& d, std::size_t max_steps,
                           std::size_t run) {
  const MultiDegree gd = eng.presentation().degree_of(g);
  LadderResult res;
  MultiDegree cur = d;
  std::size_t streak = 0;
  for (std::size_t k = 0; k < max_steps; ++k) {
    GroupDescriptor x = eng.piece(cur, false);
    if (!res.steps.empty() && x.same_group(res.steps.back()))
      ++streak;
    else
      streak = 1;
    res.steps.push_back(x);
    if (streak >= run) {
      res.stable = x;
      res.stable_degree = cur;
      return res;
    }
    for (std::size_t c = 0; c < cur.size(); ++c) cur[c] += gd[c];
  }
  throw NoStabilization("ladder from " + degree_str(d) + " did not stabilize within " + std::to_string(max_steps) +
                        " steps");
}

LadderResult localize_rank(const RingPresentation& pres, const std::string& g, const MultiDegree& d,
                           std::size_t max_steps) {
  PieceEngine eng(pres);
  return localize_rank(eng, pres.parse(g), d, max_steps);
}

RingPresentation quotient_by(const RingPresentation& pres, const std::vector<std::string>& elements) {
  RingPresentation out = pres;
  for (const auto& e : elements) out.add_relation(e);
  out.name = pres.name + "/(" + [&] {
    std::string s;
    for (std::size_t i = 0; i < elements.size(); ++i) s += (i ? "," : "") + elements[i];
    return s;
  }() + ")";
  return out;
}

namespace {

void subring_monomials(const std::vector<MultiDegree>& degs, std::size_t i, MultiDegree& rem, Exponents& cur,
                       std::vector<Exponents>& out) {
  if (i == degs.size()) {
    for (int x : rem)
      if (x != 0) return;
    out.push_back(cur);
    return;
  }
  int k = 0;
  while (true) {
    subring_monomials(degs, i + 1, rem, cur, out);
    bool ok = true;
    long f = 0;
    for (std::size_t c = 0; c < rem.size(); ++c) {
      rem[c] -= degs[i][c];
      if (rem[c] < 0) ok = false;
      f += rem[c];
    }
    ++k;
    cur[i] = k;
    if (!ok || f < 0) {
      for (std::size_t c = 0; c < rem.size(); ++c) rem[c] += k * degs[i][c];
      cur[i] = 0;
      return;
    }
  }
}

}  // namespace

std::vector<SparseRow> subring_span(PieceEngine& eng, const SubringSpec& spec, const MultiDegree& d) {
  const auto& pres = eng.presentation();
  std::vector<MultiDegree> degs;
  for (const auto& g : spec.generators) degs.push_back(pres.degree_of(g));
  std::vector<Exponents> monos;
  MultiDegree rem = d;
  Exponents cur(degs.size(), 0);
  subring_monomials(degs, 0, rem, cur, monos);
  std::vector<SparseRow> rows = eng.relation_rows(d);
  for (const auto& m : monos) {
    Poly p = Poly::constant(pres.nvars(), 1);
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) p = p * spec.generators[i].pow(static_cast<unsigned>(m[i]));
    SparseRow r = eng.to_row(p, d);
    if (!r.empty()) rows.push_back(std::move(r));
  }
  return rows;
}

GroupDescriptor subring_piece(PieceEngine& eng, const SubringSpec& spec, const MultiDegree& d) {
  const auto& pres = eng.presentation();
  const auto b = eng.basis(d);
  std::vector<SparseRow> l1 = subring_span(eng, spec, d);
  std::vector<SparseRow> l2 = eng.relation_rows(d);
  for (const auto& j : spec.ideal) {
    const MultiDegree e = pres.degree_of(j);
    MultiDegree md(d.size());
    bool ok = true;
    for (std::size_t c = 0; c < d.size(); ++c) {
      md[c] = d[c] - e[c];
      if (md[c] < 0) ok = false;
    }
    if (!ok) continue;
    const auto lower = subring_span(eng, spec, md);
    for (const auto& r : lower) {
      SparseRow prod = eng.to_row(eng.from_row(r, md) * j, d);
      if (!prod.empty()) l2.push_back(std::move(prod));
    }
  }
  ColumnNamer namer = [&](const SparseRow& r) { return eng.row_name(r, d); };
  return subquotient(static_cast<int>(b->monos.size()), l1, l2, pres.coeffs, namer).group;
}

}  // namespace wb
