#include "workbench/hopfcohomology.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>
#include <sstream>

#include "workbench/parallel.hpp"

namespace wb {

using nlohmann::json;

namespace {

Exponents head(const Exponents& e, std::size_t n) { return Exponents(e.begin(), e.begin() + static_cast<long>(n)); }
Exponents tail(const Exponents& e, std::size_t n) { return Exponents(e.begin() + static_cast<long>(n), e.end()); }

Exponents join(const Exponents& a, const Exponents& g) {
  Exponents e = a;
  e.insert(e.end(), g.begin(), g.end());
  return e;
}

bool all_zero(const Exponents& e) {
  for (int x : e)
    if (x) return false;
  return true;
}

// Applies a variable map: images[i] is the image of variable i (all in the same target ring).
Poly remap(const Poly& p, const std::vector<Poly>& images) {
  if (p.is_zero()) return Poly(images.empty() ? 0 : images[0].nvars());
  return p.substitute(images);
}

mpz_class lcm_den(const std::vector<std::map<int, mpq_class>>& rows) {
  mpz_class l = 1;
  for (const auto& r : rows)
    for (const auto& [c, v] : r) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
  return l;
}

std::vector<SparseRow> scale_rows(const std::vector<std::map<int, mpq_class>>& rows, const mpz_class& l) {
  std::vector<SparseRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    std::map<int, mpz_class> m;
    for (const auto& [c, v] : r) {
      const mpq_class x = v * l;
      m[c] = x.get_num();
    }
    out.push_back(make_row(std::move(m)));
  }
  return out;
}

void require_unit(const mpz_class& l, const Coefficients& k, const std::string& what) {
  if (l == 1) return;
  if (k.kind == Coefficients::Kind::Rationals) return;
  if (k.kind == Coefficients::Kind::Field) {
    if (l % mpz_class(k.prime) != 0) return;
  } else if (k.is_unit(l)) {
    return;
  }
  throw std::domain_error(what + ": denominator " + l.get_str() + " is not a unit in " + k.name());
}

}  // namespace

// ----------------------------------------------------------------- algebroid

HopfAlgebroid::HopfAlgebroid(const HopfAlgebroid& o)
    : name(o.name),
      base(o.base),
      gamma(o.gamma),
      rules(o.rules),
      eta_r(o.eta_r),
      epsilon(o.epsilon),
      delta(o.delta),
      definitions(o.definitions) {}

HopfAlgebroid& HopfAlgebroid::operator=(const HopfAlgebroid& o) {
  if (this == &o) return *this;
  name = o.name;
  base = o.base;
  gamma = o.gamma;
  rules = o.rules;
  eta_r = o.eta_r;
  epsilon = o.epsilon;
  delta = o.delta;
  definitions = o.definitions;
  clear_caches();
  return *this;
}

void HopfAlgebroid::clear_caches() {
  std::lock_guard<std::mutex> lk(mu_);
  reduce_cache_.clear();
  eta_cache_.clear();
  delta_cache_.clear();
  a_engine_.reset();
}

PieceEngine& HopfAlgebroid::a_engine() const {
  std::lock_guard<std::mutex> lk(mu_);
  if (!a_engine_) a_engine_ = std::make_shared<PieceEngine>(base);
  return *a_engine_;
}

std::vector<std::string> HopfAlgebroid::names() const {
  std::vector<std::string> n = base.names();
  for (const auto& g : gamma) n.push_back(g.name);
  return n;
}

std::vector<MultiDegree> HopfAlgebroid::degrees() const {
  std::vector<MultiDegree> d = base.degrees();
  for (const auto& g : gamma) d.push_back(g.degree);
  return d;
}

RingPresentation HopfAlgebroid::combined() const {
  RingPresentation r;
  r.name = name + "[gamma]";
  r.coeffs = base.coeffs;
  r.gens = base.gens;
  for (const auto& g : gamma) r.gens.push_back(g);
  for (std::size_t i = 0; i < base.relations.size(); ++i)
    r.add_relation(base.relations[i].extend(nc()), base.relation_text[i]);
  for (const auto& ru : rules) {
    Poly lead = Poly::variable(nc(), na() + ru.gen, ru.power);
    Poly rel = lead - ru.rhs;
    r.add_relation(rel * mpq_class(rel.denominator_lcm()), ru.text);
  }
  return r;
}

Poly HopfAlgebroid::parse(const std::string& text) const {
  std::vector<std::string> nm = names();
  if (definitions.empty()) {
    Poly p = parse_poly(text, nm);
    return p.nvars() == nc() ? p : p.extend(nc());
  }
  for (const auto& [n, p] : definitions) nm.push_back(n);
  Poly p = parse_poly(text, nm);
  std::vector<Poly> images;
  for (std::size_t i = 0; i < nc(); ++i) images.push_back(Poly::variable(nc(), i));
  for (const auto& [n, d] : definitions) images.push_back(d);
  return p.substitute(images);
}

void HopfAlgebroid::add_definition(const std::string& n, const std::string& text) {
  definitions.emplace_back(n, parse(text));
}

void HopfAlgebroid::add_gamma_generator(const std::string& n, MultiDegree degree) {
  if (base.index_of(n) >= 0) throw std::invalid_argument("Γ-generator " + n + " clashes with A");
  for (const auto& g : gamma)
    if (g.name == n) throw std::invalid_argument("duplicate Γ-generator " + n);
  if (eta_r.size() != na()) {
    eta_r.clear();
    for (std::size_t i = 0; i < na(); ++i) eta_r.push_back(Poly::variable(nc(), i));
  }
  gamma.push_back({n, std::move(degree), false});
  const std::size_t m = nc();
  for (auto& p : eta_r) p = p.extend(m);
  for (auto& p : epsilon) p = p.extend(m);
  for (auto& terms : delta)
    for (auto& [l, r] : terms) {
      l = l.extend(m);
      r = r.extend(m);
    }
  for (auto& ru : rules) ru.rhs = ru.rhs.extend(m);
  for (auto& d : definitions) d.second = d.second.extend(m);
  epsilon.push_back(Poly(m));
  const Poly g = Poly::variable(m, m - 1);
  delta.push_back({{g, Poly::constant(m, 1)}, {Poly::constant(m, 1), g}});
  clear_caches();
}

void HopfAlgebroid::add_gamma_relation(const std::string& text) { add_gamma_relation(parse(text), text); }

void HopfAlgebroid::add_gamma_relation(const Poly& p0, const std::string& text) {
  const Poly p = reduce(p0);
  if (p.is_zero()) return;
  const Coefficients& k = base.coeffs;
  auto unit = [&](const mpq_class& c) {
    if (k.kind == Coefficients::Kind::Rationals) return true;
    if (k.kind == Coefficients::Kind::Field)
      return c.get_num() % mpz_class(k.prime) != 0 && c.get_den() % mpz_class(k.prime) != 0;
    return k.is_unit(c.get_num()) && k.is_unit(c.get_den());
  };
  int best_power = 0;
  std::size_t best_gen = 0;
  mpq_class best_c;
  for (std::size_t j = 0; j < ng(); ++j) {
    const std::size_t v = na() + j;
    int top = 0;
    for (const auto& [e, c] : p.terms()) top = std::max(top, e[v]);
    if (top == 0) continue;
    int count = 0;
    bool pure = false;
    mpq_class lc;
    for (const auto& [e, c] : p.terms())
      if (e[v] == top) {
        ++count;
        Exponents x = e;
        x[v] = 0;
        pure = all_zero(x);
        lc = c;
      }
    if (count != 1 || !pure || !unit(lc)) continue;
    if (best_power == 0 || top < best_power) {
      best_power = top;
      best_gen = j;
      best_c = lc;
    }
  }
  if (best_power == 0)
    throw UnsupportedIdealShape("relation " + (text.empty() ? p.to_string(names()) : text) +
                                " is not monic in any Γ-generator over " + k.name());
  GammaRule ru;
  ru.gen = best_gen;
  ru.power = best_power;
  const Poly lead = Poly::variable(nc(), na() + best_gen, best_power) * best_c;
  ru.rhs = (lead - p) * (mpq_class(1) / best_c);
  ru.text = text.empty() ? p.to_string(names()) : text;
  rules.push_back(ru);
  clear_caches();
}

void HopfAlgebroid::set_eta_r(const std::string& gen, const std::string& text) {
  const int i = base.index_of(gen);
  if (i < 0) throw std::invalid_argument("eta_R: unknown base generator " + gen);
  if (eta_r.size() != na()) {
    eta_r.clear();
    for (std::size_t j = 0; j < na(); ++j) eta_r.push_back(Poly::variable(nc(), j));
  }
  eta_r[static_cast<std::size_t>(i)] = parse(text);
  clear_caches();
}

void HopfAlgebroid::set_delta(const std::string& gen, const std::vector<std::pair<std::string, std::string>>& terms) {
  std::size_t j = ng();
  for (std::size_t i = 0; i < ng(); ++i)
    if (gamma[i].name == gen) j = i;
  if (j == ng()) throw std::invalid_argument("delta: unknown Γ-generator " + gen);
  delta[j].clear();
  for (const auto& [l, r] : terms) delta[j].emplace_back(parse(l), parse(r));
  clear_caches();
}

Poly HopfAlgebroid::a_part(const Poly& p) const {
  Poly out(na());
  for (const auto& [e, c] : p.terms()) {
    if (!all_zero(tail(e, na()))) throw std::logic_error("a_part: element involves Γ-generators");
    out.add_term(head(e, na()), c);
  }
  return out;
}

Poly HopfAlgebroid::lift_a(const Poly& a) const { return a.extend(nc()); }

bool HopfAlgebroid::positive_gamma(const Exponents& g) const { return !all_zero(g); }

bool HopfAlgebroid::reduced_gamma(const Exponents& g) const {
  for (const auto& ru : rules)
    if (g[ru.gen] >= ru.power) return false;
  return true;
}

Poly HopfAlgebroid::reduce(const Poly& p) const {
  if (rules.empty()) return p;
  Poly out(nc());
  for (const auto& [e, c] : p.terms()) {
    const GammaRule* hit = nullptr;
    for (const auto& ru : rules)
      if (e[na() + ru.gen] >= ru.power) {
        hit = &ru;
        break;
      }
    if (!hit) {
      out.add_term(e, c);
      continue;
    }
    Poly r;
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = reduce_cache_.find(e);
      if (it != reduce_cache_.end()) r = it->second;
    }
    if (r.nvars() == 0) {
      Exponents e2 = e;
      e2[na() + hit->gen] -= hit->power;
      r = reduce(Poly::monomial(e2) * hit->rhs);
      if (r.nvars() == 0) r = Poly(nc());
      std::lock_guard<std::mutex> lk(mu_);
      reduce_cache_.emplace(e, r);
    }
    out += r * c;
  }
  return out;
}

Poly HopfAlgebroid::eta_r_of(const Poly& a) const {
  Poly out(nc());
  for (const auto& [e, c] : a.terms()) {
    const Exponents ae = head(e, na());
    if (!all_zero(tail(e, na()))) throw std::logic_error("eta_r_of: argument involves Γ-generators");
    Poly img;
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = eta_cache_.find(ae);
      if (it != eta_cache_.end()) img = it->second;
    }
    if (img.nvars() == 0) {
      img = Poly::constant(nc(), 1);
      for (std::size_t i = 0; i < na(); ++i)
        if (ae[i]) img = reduce(img * eta_r[i].pow(static_cast<unsigned>(ae[i])));
      std::lock_guard<std::mutex> lk(mu_);
      eta_cache_.emplace(ae, img);
    }
    out += img * c;
  }
  return out;
}

Poly HopfAlgebroid::epsilon_of(const Poly& g) const {
  std::vector<Poly> images;
  for (std::size_t i = 0; i < na(); ++i) images.push_back(Poly::variable(nc(), i));
  for (std::size_t j = 0; j < ng(); ++j) images.push_back(epsilon[j]);
  return remap(g, images);
}

namespace {

// Splits a combined polynomial into γ-monomial -> A-coefficient (combined variables, A-part only).
std::map<Exponents, Poly> split_gamma(const Poly& p, std::size_t na, std::size_t nc) {
  std::map<Exponents, Poly> out;
  for (const auto& [e, c] : p.terms()) {
    Exponents a = e;
    Exponents g = tail(e, na);
    for (std::size_t i = na; i < nc; ++i) a[i] = 0;
    auto it = out.find(g);
    if (it == out.end()) it = out.emplace(g, Poly(nc)).first;
    it->second.add_term(a, c);
  }
  return out;
}

}  // namespace

Tensor HopfAlgebroid::normalize(const std::vector<Poly>& slots) const {
  Tensor out;
  const std::size_t s = slots.size();
  if (s == 0) return out;
  using State = std::map<std::vector<Exponents>, Poly>;
  State st;
  st.emplace(std::vector<Exponents>{}, slots[s - 1]);
  for (std::size_t i = s - 1; i >= 1; --i) {
    State nx;
    for (const auto& [suffix, P] : st) {
      const auto groups = split_gamma(reduce(P), na(), nc());
      for (const auto& [g, apoly] : groups) {
        Poly q = slots[i - 1] * eta_r_of(apoly);
        std::vector<Exponents> key;
        key.reserve(suffix.size() + 1);
        key.push_back(g);
        key.insert(key.end(), suffix.begin(), suffix.end());
        auto it = nx.find(key);
        if (it == nx.end())
          nx.emplace(std::move(key), std::move(q));
        else
          it->second += q;
      }
    }
    st = std::move(nx);
  }
  for (const auto& [suffix, P] : st) {
    const Poly r = reduce(P);
    for (const auto& [e, c] : r.terms()) {
      std::vector<Exponents> key;
      key.push_back(tail(e, na()));
      key.insert(key.end(), suffix.begin(), suffix.end());
      auto k = std::make_pair(head(e, na()), std::move(key));
      auto it = out.find(k);
      if (it == out.end()) {
        out.emplace(std::move(k), c);
      } else {
        it->second += c;
        if (sgn(it->second) == 0) out.erase(it);
      }
    }
  }
  return out;
}

Tensor HopfAlgebroid::tensor_product(const Tensor& x, const Tensor& y, std::size_t slots) const {
  Tensor out;
  for (const auto& [kx, cx] : x)
    for (const auto& [ky, cy] : y) {
      std::vector<Poly> sl;
      for (std::size_t i = 0; i < slots; ++i) {
        Exponents g(ng());
        for (std::size_t j = 0; j < ng(); ++j) g[j] = kx.second[i][j] + ky.second[i][j];
        Exponents a(na(), 0);
        if (i == 0)
          for (std::size_t j = 0; j < na(); ++j) a[j] = kx.first[j] + ky.first[j];
        sl.push_back(Poly::monomial(join(a, g), i == 0 ? mpq_class(cx * cy) : mpq_class(1)));
      }
      for (const auto& [k, c] : normalize(sl)) {
        auto it = out.find(k);
        if (it == out.end()) {
          out.emplace(k, c);
        } else {
          it->second += c;
          if (sgn(it->second) == 0) out.erase(it);
        }
      }
    }
  return out;
}

Tensor HopfAlgebroid::delta_of(const Poly& g) const {
  Tensor out;
  for (const auto& [e, c] : g.terms()) {
    const Exponents ge = tail(e, na());
    Tensor dg;
    bool have = false;
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = delta_cache_.find(ge);
      if (it != delta_cache_.end()) {
        dg = it->second;
        have = true;
      }
    }
    if (!have) {
      std::vector<Poly> one{Poly::constant(nc(), 1), Poly::constant(nc(), 1)};
      dg = normalize(one);
      for (std::size_t j = 0; j < ng(); ++j) {
        if (!ge[j]) continue;
        Tensor dj;
        for (const auto& [l, r] : delta[j])
          for (const auto& [k, v] : normalize({l, r})) {
            dj[k] += v;
          }
        for (auto it = dj.begin(); it != dj.end();) it = sgn(it->second) == 0 ? dj.erase(it) : std::next(it);
        for (int t = 0; t < ge[j]; ++t) dg = tensor_product(dg, dj, 2);
      }
      std::lock_guard<std::mutex> lk(mu_);
      delta_cache_.emplace(ge, dg);
    }
    const Exponents ae = head(e, na());
    for (const auto& [k, v] : dg) {
      Exponents a = k.first;
      for (std::size_t i = 0; i < na(); ++i) a[i] += ae[i];
      auto key = std::make_pair(a, k.second);
      auto it = out.find(key);
      if (it == out.end()) {
        out.emplace(key, v * c);
      } else {
        it->second += v * c;
        if (sgn(it->second) == 0) out.erase(it);
      }
    }
  }
  return out;
}

namespace {

std::vector<Poly> homogeneous_parts(const Poly& p, const RingPresentation& a) {
  std::map<MultiDegree, Poly> parts;
  const auto degs = a.degrees();
  for (const auto& [e, c] : p.terms()) {
    const MultiDegree d = monomial_degree(e, degs, a.arity());
    auto it = parts.find(d);
    if (it == parts.end()) it = parts.emplace(d, Poly(p.nvars())).first;
    it->second.add_term(e, c);
  }
  std::vector<Poly> out;
  for (auto& [d, q] : parts) out.push_back(std::move(q));
  return out;
}

}  // namespace

bool HopfAlgebroid::gamma_zero(const Poly& p) const {
  for (const auto& [g, apoly] : split_gamma(reduce(p), na(), nc())) {
    const Poly a = a_part(apoly);
    for (const auto& part : homogeneous_parts(a, base))
      if (!a_engine().in_ideal(part)) return false;
  }
  return true;
}

bool HopfAlgebroid::tensor_zero(const Tensor& t) const {
  std::map<std::vector<Exponents>, Poly> blocks;
  for (const auto& [k, c] : t) {
    auto it = blocks.find(k.second);
    if (it == blocks.end()) it = blocks.emplace(k.second, Poly(na())).first;
    it->second.add_term(k.first, c);
  }
  for (const auto& [g, a] : blocks)
    for (const auto& part : homogeneous_parts(a, base))
      if (!a_engine().in_ideal(part)) return false;
  return true;
}

std::string HopfAlgebroid::tensor_string(const Tensor& t) const {
  if (t.empty()) return "0";
  const auto an = base.names();
  std::vector<std::string> gn;
  for (const auto& g : gamma) gn.push_back(g.name);
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : t) {
    os << (first ? (sgn(c) < 0 ? "-" : "") : (sgn(c) < 0 ? " - " : " + "));
    first = false;
    const mpq_class a = abs(c);
    const std::string am = monomial_name(k.first, an);
    if (a != 1 || am == "1") os << a.get_str();
    if (am != "1") os << (a != 1 ? "*" : "") << am;
    os << "[";
    for (std::size_t i = 0; i < k.second.size(); ++i) os << (i ? "|" : "") << monomial_name(k.second[i], gn);
    os << "]";
  }
  return os.str();
}

// ----------------------------------------------------------------- JSON

HopfAlgebroid HopfAlgebroid::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("Hopf algebroid JSON: ") + e.what());
  }
  HopfAlgebroid h;
  try {
    h.name = j.value("name", std::string("H"));
    h.base = RingPresentation::from_json(j.at("base").dump());
    h.eta_r.clear();
    for (std::size_t i = 0; i < h.na(); ++i) h.eta_r.push_back(Poly::variable(h.na(), i));
    for (const auto& g : j.value("gamma_generators", json::array()))
      h.add_gamma_generator(g.at("name").get<std::string>(), g.at("degree").get<MultiDegree>());
    for (const auto& d : j.value("definitions", json::array()))
      h.add_definition(d.at("name").get<std::string>(), d.at("value").get<std::string>());
    for (const auto& r : j.value("relations", json::array())) h.add_gamma_relation(r.get<std::string>());
    const json eta = j.value("eta_R", json::object());
    const json eps = j.value("epsilon", json::object());
    const json del = j.value("delta", json::object());
    for (const auto& [g, v] : eta.items()) h.set_eta_r(g, v.get<std::string>());
    for (const auto& [g, v] : eps.items()) {
      bool found = false;
      for (std::size_t i = 0; i < h.ng(); ++i)
        if (h.gamma[i].name == g) {
          h.epsilon[i] = h.parse(v.get<std::string>());
          found = true;
        }
      if (!found) throw std::invalid_argument("epsilon: unknown Γ-generator " + g);
    }
    for (const auto& [g, v] : del.items()) {
      std::vector<std::pair<std::string, std::string>> terms;
      for (const auto& t : v) terms.emplace_back(t.at(0).get<std::string>(), t.at(1).get<std::string>());
      h.set_delta(g, terms);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("Hopf algebroid '" + h.name + "': " + e.what());
  }
  h.clear_caches();
  return h;
}

std::string HopfAlgebroid::to_json() const {
  json j;
  j["name"] = name;
  j["base"] = json::parse(base.to_json());
  const auto nm = names();
  j["gamma_generators"] = json::array();
  for (const auto& g : gamma) j["gamma_generators"].push_back({{"name", g.name}, {"degree", g.degree}});
  j["relations"] = json::array();
  for (const auto& ru : rules) {
    const Poly lead = Poly::variable(nc(), na() + ru.gen, ru.power);
    j["relations"].push_back((lead - ru.rhs).to_string(nm));
  }
  j["eta_R"] = json::object();
  for (std::size_t i = 0; i < na(); ++i) j["eta_R"][base.gens[i].name] = eta_r[i].to_string(nm);
  j["epsilon"] = json::object();
  for (std::size_t i = 0; i < ng(); ++i) j["epsilon"][gamma[i].name] = epsilon[i].to_string(nm);
  j["delta"] = json::object();
  for (std::size_t i = 0; i < ng(); ++i) {
    json terms = json::array();
    for (const auto& [l, r] : delta[i]) terms.push_back({l.to_string(nm), r.to_string(nm)});
    j["delta"][gamma[i].name] = terms;
  }
  return j.dump(2);
}

// ----------------------------------------------------------------- validation

ValidationReport validate(const HopfAlgebroid& h, int bound) {
  ValidationReport rep;
  const auto nm = h.names();
  const auto degs = h.degrees();
  const std::size_t ar = h.arity();
  auto deg_ok = [&](const MultiDegree& d) { return d.empty() || d[0] <= bound; };
  auto fail = [&](const std::string& what, const MultiDegree& d) {
    rep.failures.push_back(what + " in degree " + degree_str(d));
  };
  auto homog = [&](const Poly& p, const MultiDegree& want, const std::string& what) {
    MultiDegree d;
    ++rep.checks;
    if (p.is_zero()) return;
    if (!homogeneous_degree(p, degs, ar, d) || d != want) fail(what + " is not homogeneous of the expected degree", want);
  };

  for (std::size_t i = 0; i < h.na(); ++i) homog(h.eta_r[i], h.base.gens[i].degree, "eta_R(" + nm[i] + ")");
  for (std::size_t j = 0; j < h.ng(); ++j) {
    homog(h.epsilon[j], h.gamma[j].degree, "epsilon(" + h.gamma[j].name + ")");
    for (const auto& [l, r] : h.delta[j]) homog(l * r, h.gamma[j].degree, "delta(" + h.gamma[j].name + ")");
  }

  // ε∘η_R = id on A.
  for (std::size_t i = 0; i < h.na(); ++i) {
    const MultiDegree& d = h.base.gens[i].degree;
    if (!deg_ok(d)) continue;
    ++rep.checks;
    const Poly diff = h.epsilon_of(h.eta_r[i]) - Poly::variable(h.nc(), i);
    if (!h.gamma_zero(diff)) fail("counit fails on eta_R(" + nm[i] + ")", d);
  }
  // η_R respects the relations of A.
  for (std::size_t r = 0; r < h.base.relations.size(); ++r) {
    const Poly rel = h.base.relations[r];
    const MultiDegree d = h.base.degree_of(rel);
    if (!deg_ok(d)) continue;
    ++rep.checks;
    if (!h.gamma_zero(h.eta_r_of(h.lift_a(rel)))) fail("eta_R does not preserve relation " + h.base.relation_text[r], d);
  }
  for (std::size_t j = 0; j < h.ng(); ++j) {
    const MultiDegree& d = h.gamma[j].degree;
    if (!deg_ok(d)) continue;
    const Poly g = Poly::variable(h.nc(), h.na() + j);
    const Tensor dg = h.delta_of(g);
    // Counit on both sides.
    Poly left(h.nc()), right(h.nc());
    for (const auto& [k, c] : dg) {
      const Poly a = Poly::monomial(join(k.first, Exponents(h.ng(), 0)), c);
      const Poly g0 = Poly::monomial(join(Exponents(h.na(), 0), k.second[0]));
      const Poly g1 = Poly::monomial(join(Exponents(h.na(), 0), k.second[1]));
      left += a * h.epsilon_of(g0) * g1;
      right += a * g0 * h.eta_r_of(h.epsilon_of(g1));
    }
    ++rep.checks;
    if (!h.gamma_zero(left - g) || !h.gamma_zero(right - g)) fail("counit fails on " + h.gamma[j].name, d);
    // Coassociativity.
    Tensor lhs, rhs;
    for (const auto& [k, c] : dg) {
      const Poly x0 = Poly::monomial(join(k.first, k.second[0]), c);
      for (const auto& [k2, c2] : h.delta_of(x0)) {
        auto key = std::make_pair(k2.first, std::vector<Exponents>{k2.second[0], k2.second[1], k.second[1]});
        lhs[key] += c2;
      }
      const Poly x1 = Poly::monomial(join(Exponents(h.na(), 0), k.second[1]));
      for (const auto& [k2, c2] : h.delta_of(x1)) {
        std::vector<Poly> sl{x0, Poly::monomial(join(k2.first, k2.second[0]), c2),
                             Poly::monomial(join(Exponents(h.na(), 0), k2.second[1]))};
        for (const auto& [k3, c3] : h.normalize(sl)) rhs[k3] += c3;
      }
    }
    Tensor diff = lhs;
    for (const auto& [k, c] : rhs) diff[k] -= c;
    for (auto it = diff.begin(); it != diff.end();) it = sgn(it->second) == 0 ? diff.erase(it) : std::next(it);
    ++rep.checks;
    if (!h.tensor_zero(diff)) fail("coassociativity fails on " + h.gamma[j].name, d);
  }
  // Δ respects the Γ-rules.
  for (const auto& ru : h.rules) {
    const Poly lead = Poly::variable(h.nc(), h.na() + ru.gen, ru.power);
    MultiDegree d;
    homogeneous_degree(lead, degs, ar, d);
    if (!deg_ok(d)) continue;
    Tensor diff = h.delta_of(lead);
    for (const auto& [k, c] : h.delta_of(ru.rhs)) diff[k] -= c;
    for (auto it = diff.begin(); it != diff.end();) it = sgn(it->second) == 0 ? diff.erase(it) : std::next(it);
    ++rep.checks;
    if (!h.tensor_zero(diff)) fail("delta does not preserve relation " + ru.text, d);
  }
  // Δ∘η_R = 1⊗η_R.
  for (std::size_t i = 0; i < h.na(); ++i) {
    const MultiDegree& d = h.base.gens[i].degree;
    if (!deg_ok(d)) continue;
    Tensor diff = h.delta_of(h.eta_r[i]);
    for (const auto& [k, c] : h.normalize({Poly::constant(h.nc(), 1), h.eta_r[i]})) diff[k] -= c;
    for (auto it = diff.begin(); it != diff.end();) it = sgn(it->second) == 0 ? diff.erase(it) : std::next(it);
    ++rep.checks;
    if (!h.tensor_zero(diff)) fail("delta(eta_R(" + nm[i] + ")) differs from 1|eta_R(" + nm[i] + ")", d);
  }
  return rep;
}

// ----------------------------------------------------------------- cobar complex

namespace {

struct CobarBasis {
  std::vector<std::vector<Exponents>> tuples;
  std::vector<MultiDegree> adeg;
  std::vector<std::shared_ptr<const PieceEngine::Basis>> abasis;
  std::vector<int> offset;
  std::map<std::vector<Exponents>, std::size_t> index;
  int n = 0;
};

class Cobar {
 public:
  Cobar(const HopfAlgebroid& h, const MultiDegree& hi) : h_(h), hi_(hi) {
    // Reduced, non-constant γ-monomials inside the box.
    const std::size_t ng = h.ng();
    Exponents cur(ng, 0);
    MultiDegree d(h.arity(), 0);
    gamma_monos(0, cur, d);
  }

  const std::vector<std::pair<Exponents, MultiDegree>>& monos() const { return monos_; }

  CobarBasis basis(int s, const MultiDegree& t) const {
    CobarBasis b;
    std::vector<Exponents> cur;
    tuples(s, t, cur, b);
    return b;
  }

  // Rational row of a normalized tensor in the coordinates of b; degenerate terms are dropped.
  std::map<int, mpq_class> row(const Tensor& t, const CobarBasis& b) const {
    std::map<int, mpq_class> out;
    PieceEngine& eng = h_.a_engine();
    for (const auto& [k, c] : t) {
      bool degenerate = false;
      for (const auto& g : k.second)
        if (all_zero(g)) degenerate = true;
      if (degenerate) continue;
      auto it = b.index.find(k.second);
      if (it == b.index.end())
        throw std::logic_error("cobar: tuple outside the basis in " + h_.name + ": " + h_.tensor_string({{k, c}}));
      if (eng.killed(k.first)) continue;
      const auto& ab = *b.abasis[it->second];
      auto jt = ab.index.find(k.first);
      if (jt == ab.index.end()) throw std::logic_error("cobar: A-monomial of the wrong degree");
      const int col = b.offset[it->second] + jt->second;
      mpq_class& v = out[col];
      v += c;
      if (sgn(v) == 0) out.erase(col);
    }
    return out;
  }

  // d of basis element i of C^s_t, as a row of C^{s+1}_t.
  std::map<int, mpq_class> d(const CobarBasis& src, int i, const CobarBasis& tgt) const {
    std::size_t blk = 0;
    while (blk + 1 < src.offset.size() && src.offset[blk + 1] <= i) ++blk;
    const auto& tup = src.tuples[blk];
    const Exponents& am = src.abasis[blk]->monos[static_cast<std::size_t>(i - src.offset[blk])];
    const std::size_t nc = h_.nc(), na = h_.na(), ng = h_.ng();
    const Poly a = Poly::monomial(join(am, Exponents(ng, 0)));
    std::vector<Poly> mus;
    for (const auto& g : tup) mus.push_back(Poly::monomial(join(Exponents(na, 0), g)));
    Tensor acc;
    auto add = [&](const Tensor& t, const mpq_class& sign) {
      for (const auto& [k, c] : t) {
        mpq_class& v = acc[k];
        v += sign * c;
        if (sgn(v) == 0) acc.erase(k);
      }
    };
    {
      std::vector<Poly> sl{h_.eta_r_of(a)};
      sl.insert(sl.end(), mus.begin(), mus.end());
      add(h_.normalize(sl), 1);
    }
    for (std::size_t k = 0; k < tup.size(); ++k) {
      const mpq_class sign = (k % 2 == 0) ? -1 : 1;  // (-1)^(k+1) for slot k+1
      for (const auto& [dk, dc] : h_.delta_of(mus[k])) {
        bool degenerate = all_zero(dk.second[0]) || all_zero(dk.second[1]);
        if (degenerate) continue;
        std::vector<Poly> sl;
        for (std::size_t j = 0; j < k; ++j) sl.push_back(mus[j]);
        sl.push_back(Poly::monomial(join(dk.first, dk.second[0]), dc));
        sl.push_back(Poly::monomial(join(Exponents(na, 0), dk.second[1])));
        for (std::size_t j = k + 1; j < tup.size(); ++j) sl.push_back(mus[j]);
        sl[0] = a * sl[0];
        add(h_.normalize(sl), sign);
      }
    }
    (void)nc;
    return row(acc, tgt);
  }

  std::vector<SparseRow> relations(const CobarBasis& b) const {
    std::vector<SparseRow> out;
    PieceEngine& eng = h_.a_engine();
    for (std::size_t k = 0; k < b.tuples.size(); ++k)
      for (const auto& r : eng.relation_rows(b.adeg[k])) out.push_back(row_shift(r, b.offset[k]));
    return out;
  }

  std::string label(const SparseRow& r, const CobarBasis& b) const {
    Tensor t;
    for (const auto& [c, v] : r) {
      std::size_t blk = 0;
      while (blk + 1 < b.offset.size() && b.offset[blk + 1] <= c) ++blk;
      const Exponents& am = b.abasis[blk]->monos[static_cast<std::size_t>(c - b.offset[blk])];
      t[{am, b.tuples[blk]}] += mpq_class(v);
    }
    if (!t.empty() && t.begin()->first.second.empty()) {
      Poly p(h_.na());
      for (const auto& [k, c] : t) p.add_term(k.first, c);
      return p.to_string(h_.base.names());
    }
    return h_.tensor_string(t);
  }

 private:
  const HopfAlgebroid& h_;
  MultiDegree hi_;
  std::vector<std::pair<Exponents, MultiDegree>> monos_;

  bool inside(const MultiDegree& d) const {
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] > hi_[i]) return false;
    return true;
  }

  void gamma_monos(std::size_t j, Exponents& cur, MultiDegree& d) {
    if (j == h_.ng()) {
      if (!all_zero(cur) && h_.reduced_gamma(cur)) monos_.emplace_back(cur, d);
      return;
    }
    const MultiDegree& g = h_.gamma[j].degree;
    bool positive = false;
    for (int x : g)
      if (x > 0) positive = true;
    const MultiDegree save = d;
    for (int k = 0;; ++k) {
      if (!inside(d)) break;
      bool ok = true;
      for (const auto& ru : h_.rules)
        if (ru.gen == j && k >= ru.power) ok = false;
      if (!ok) break;
      cur[j] = k;
      gamma_monos(j + 1, cur, d);
      if (!positive) break;
      for (std::size_t c = 0; c < d.size(); ++c) d[c] += g[c];
    }
    cur[j] = 0;
    d = save;
  }

  void tuples(int s, const MultiDegree& rem, std::vector<Exponents>& cur, CobarBasis& b) const {
    if (static_cast<int>(cur.size()) == s) {
      for (int x : rem)
        if (x < 0) return;
      auto ab = h_.a_engine().basis(rem);
      if (ab->monos.empty()) return;
      b.index.emplace(cur, b.tuples.size());
      b.tuples.push_back(cur);
      b.adeg.push_back(rem);
      b.abasis.push_back(ab);
      b.offset.push_back(b.n);
      b.n += static_cast<int>(ab->monos.size());
      return;
    }
    for (const auto& [g, d] : monos_) {
      MultiDegree r = rem;
      bool ok = true;
      for (std::size_t c = 0; c < r.size(); ++c) {
        r[c] -= d[c];
        if (r[c] < 0) ok = false;
      }
      if (!ok) continue;
      cur.push_back(g);
      tuples(s, r, cur, b);
      cur.pop_back();
    }
  }
};

}  // namespace

const ExtCell* ExtTable::find(int s, const MultiDegree& t) const {
  for (const auto& c : cells)
    if (c.s == s && c.t == t) return &c;
  return nullptr;
}

GroupDescriptor ExtTable::at(int s, const MultiDegree& t) const {
  const ExtCell* c = find(s, t);
  return c ? c->group : GroupDescriptor{};
}

std::string ExtTable::csv() const {
  std::ostringstream os;
  os << "s";
  if (arity == 1) {
    os << ",t";
  } else {
    for (std::size_t i = 0; i < arity; ++i) os << ",t" << i;
  }
  os << ",rank,torsion,labels\n";
  for (const auto& c : cells) {
    os << c.s;
    for (int x : c.t) os << "," << x;
    os << "," << c.group.free_rank << "," << c.group.torsion_str() << ",";
    for (std::size_t i = 0; i < c.group.labels.size(); ++i) os << (i ? ";" : "") << c.group.labels[i];
    os << "\n";
  }
  return os.str();
}

std::size_t cobar_rank(const HopfAlgebroid& h, int s, const MultiDegree& t) {
  Cobar cb(h, t);
  return static_cast<std::size_t>(cb.basis(s, t).n);
}

ExtTable cobar_ext(const HopfAlgebroid& h, const CobarWindow& w) {
  if (w.hi.size() != h.arity()) throw DegreeMismatch("cobar_ext: window arity differs from the grading");
  const RingPresentation comb = h.combined();
  const std::vector<MultiDegree> degs = degrees_in_box(comb, MultiDegree(h.arity(), 0), w.hi);
  Cobar cb(h, w.hi);
  const Coefficients& k = h.base.coeffs;
  std::vector<std::vector<ExtCell>> per(degs.size());

  parallel_for(degs.size(), [&](std::size_t di) {
    const MultiDegree& t = degs[di];
    std::vector<CobarBasis> B;
    for (int s = 0; s <= w.s_max + 1; ++s) {
      B.push_back(cb.basis(s, t));
      if (static_cast<std::size_t>(B.back().n) > w.max_columns)
        throw WindowTooLarge("cobar group C^" + std::to_string(s) + " in degree " + degree_str(t) + " has rank " +
                             std::to_string(B.back().n));
    }
    std::vector<std::vector<SparseRow>> rel;
    for (int s = 0; s <= w.s_max + 1; ++s) rel.push_back(cb.relations(B[static_cast<std::size_t>(s)]));
    // d^s : C^s -> C^{s+1}, scaled by a global unit.
    std::vector<std::vector<std::map<int, mpq_class>>> dq(static_cast<std::size_t>(w.s_max) + 1);
    std::vector<std::vector<SparseRow>> dz(static_cast<std::size_t>(w.s_max) + 1);
    for (int s = 0; s <= w.s_max; ++s) {
      const auto& src = B[static_cast<std::size_t>(s)];
      const auto& tgt = B[static_cast<std::size_t>(s) + 1];
      auto& rows = dq[static_cast<std::size_t>(s)];
      for (int i = 0; i < src.n; ++i) rows.push_back(cb.d(src, i, tgt));
      const mpz_class l = lcm_den(rows);
      require_unit(l, k, "cobar differential of " + h.name);
      dz[static_cast<std::size_t>(s)] = scale_rows(rows, l);
    }
    // d∘d = 0 modulo the relations of A.
    for (int s = 1; s <= w.s_max; ++s) {
      const auto& d0 = dq[static_cast<std::size_t>(s) - 1];
      const auto& d1 = dq[static_cast<std::size_t>(s)];
      const int ncols = B[static_cast<std::size_t>(s) + 1].n;
      for (const auto& r : d0) {
        std::map<int, mpq_class> acc;
        for (const auto& [c, v] : r)
          for (const auto& [c2, v2] : d1[static_cast<std::size_t>(c)]) {
            mpq_class& x = acc[c2];
            x += v * v2;
            if (sgn(x) == 0) acc.erase(c2);
          }
        if (acc.empty()) continue;
        const mpz_class l = lcm_den({acc});
        const SparseRow z = scale_rows({acc}, l)[0];
        if (!contains_up_to_units(ncols, rel[static_cast<std::size_t>(s) + 1], z, k))
          throw std::logic_error("cobar complex of " + h.name + ": d∘d ≠ 0 in degree " + degree_str(t));
      }
    }
    for (int s = 0; s <= w.s_max; ++s) {
      const auto& src = B[static_cast<std::size_t>(s)];
      if (src.n == 0) continue;
      const int nnext = B[static_cast<std::size_t>(s) + 1].n;
      const std::vector<SparseRow> cycles = preimage(nnext, dz[static_cast<std::size_t>(s)], rel[static_cast<std::size_t>(s) + 1]);
      std::vector<SparseRow> bounds = rel[static_cast<std::size_t>(s)];
      if (s > 0)
        for (const auto& r : dz[static_cast<std::size_t>(s) - 1]) bounds.push_back(r);
      ColumnNamer namer = [&](const SparseRow& r) { return cb.label(r, src); };
      const Subquotient q = subquotient(src.n, cycles, bounds, k, namer);
      per[di].push_back({s, t, q.group});
    }
  });

  ExtTable table;
  table.name = h.name;
  table.arity = h.arity();
  for (auto& v : per)
    for (auto& c : v) table.cells.push_back(std::move(c));
  std::sort(table.cells.begin(), table.cells.end(),
            [](const ExtCell& a, const ExtCell& b) { return std::tie(a.s, a.t) < std::tie(b.s, b.t); });
  return table;
}

std::vector<std::string> compare_ext(const ExtTable& x, const ExtTable& y) {
  std::vector<std::string> out;
  for (const auto& c : x.cells) {
    const ExtCell* o = y.find(c.s, c.t);
    if (!o) continue;
    if (!c.group.same_group(o->group))
      out.push_back("(s=" + std::to_string(c.s) + ", t=" + degree_str(c.t) + "): " + c.group.str() + " vs " +
                    o->group.str());
  }
  return out;
}

// ----------------------------------------------------------------- ideals and covers

namespace {

struct Killed {
  HopfAlgebroid h;
  std::vector<Poly> images;  // old combined variable -> new combined polynomial
};

Killed kill_base(const HopfAlgebroid& h, const std::set<std::size_t>& kill) {
  Killed out;
  HopfAlgebroid& n = out.h;
  n.name = h.name;
  n.base.name = h.base.name;
  n.base.coeffs = h.base.coeffs;
  std::vector<int> newidx(h.na(), -1);
  for (std::size_t i = 0; i < h.na(); ++i)
    if (!kill.count(i)) {
      newidx[i] = static_cast<int>(n.base.gens.size());
      n.base.gens.push_back(h.base.gens[i]);
    }
  const std::size_t na2 = n.base.gens.size();
  const std::size_t nc2 = na2 + h.ng();
  n.gamma = h.gamma;
  for (std::size_t i = 0; i < h.na(); ++i)
    out.images.push_back(newidx[i] < 0 ? Poly(nc2) : Poly::variable(nc2, static_cast<std::size_t>(newidx[i])));
  for (std::size_t j = 0; j < h.ng(); ++j) out.images.push_back(Poly::variable(nc2, na2 + j));
  std::vector<Poly> aimg;
  for (std::size_t i = 0; i < h.na(); ++i)
    aimg.push_back(newidx[i] < 0 ? Poly(na2) : Poly::variable(na2, static_cast<std::size_t>(newidx[i])));
  for (std::size_t r = 0; r < h.base.relations.size(); ++r) {
    const Poly p = remap(h.base.relations[r], aimg);
    if (!p.is_zero()) n.base.add_relation(p, h.base.relation_text[r]);
  }
  for (std::size_t i = 0; i < h.na(); ++i)
    if (newidx[i] >= 0) n.eta_r.push_back(remap(h.eta_r[i], out.images));
  for (const auto& e : h.epsilon) n.epsilon.push_back(remap(e, out.images));
  for (const auto& terms : h.delta) {
    std::vector<std::pair<Poly, Poly>> t;
    for (const auto& [l, r] : terms) t.emplace_back(remap(l, out.images), remap(r, out.images));
    n.delta.push_back(std::move(t));
  }
  for (const auto& [nm, p] : h.definitions) n.definitions.emplace_back(nm, remap(p, out.images));
  for (const auto& ru : h.rules) {
    GammaRule r = ru;
    r.rhs = remap(ru.rhs, out.images);
    n.rules.push_back(r);
  }
  n.clear_caches();
  return out;
}

std::set<std::size_t> base_indices(const HopfAlgebroid& h, const std::vector<std::string>& gens,
                                   std::vector<mpz_class>* constants) {
  std::set<std::size_t> out;
  for (const auto& g : gens) {
    const int i = h.base.index_of(g);
    if (i >= 0) {
      out.insert(static_cast<std::size_t>(i));
      continue;
    }
    bool digits = !g.empty();
    for (char c : g)
      if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
    if (!digits || !constants) throw UnsupportedIdealShape("ideal generator '" + g + "' is neither a constant nor a generator of A");
    constants->push_back(mpz_class(g));
  }
  return out;
}

}  // namespace

bool invariant_ideal_check(const HopfAlgebroid& h, const std::vector<std::string>& gens) {
  std::vector<mpz_class> constants;
  const std::set<std::size_t> idx = base_indices(h, gens, &constants);
  RingPresentation comb = h.combined();
  for (const auto& c : constants) comb.add_relation(Poly::constant(h.nc(), mpq_class(c)), c.get_str());
  for (std::size_t i : idx) comb.add_relation(Poly::variable(h.nc(), i), h.base.gens[i].name);
  PieceEngine eng(comb);
  for (std::size_t i : idx) {
    const Poly diff = h.eta_r[i] - Poly::variable(h.nc(), i);
    if (!eng.in_ideal(h.reduce(diff))) return false;
  }
  return true;
}

HopfAlgebroid mod_invariant_ideal(const HopfAlgebroid& h, const std::vector<std::string>& gens) {
  if (!invariant_ideal_check(h, gens)) throw NotInvariant("ideal is not invariant in " + h.name);
  std::vector<mpz_class> constants;
  const std::set<std::size_t> idx = base_indices(h, gens, &constants);
  Killed k = kill_base(h, idx);
  HopfAlgebroid out = k.h;
  mpz_class g = 0;
  for (const auto& c : constants) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g != 0) {
    const auto f = factorize(g);
    if (f.size() != 1 || f[0].second != 1)
      throw UnsupportedIdealShape("constant ideal generator " + g.get_str() + " is not a prime");
    const unsigned long p = f[0].first.get_ui();
    const Coefficients& c = h.base.coeffs;
    if (c.kind == Coefficients::Kind::Field || c.kind == Coefficients::Kind::Rationals || c.is_unit_prime(p))
      throw UnsupportedIdealShape("reducing " + c.name() + " modulo " + g.get_str());
    out.base.coeffs = Coefficients::field(p);
    auto check = [&](const Poly& q) {
      for (const auto& [e, v] : q.terms())
        if (v.get_den() % mpz_class(p) == 0)
          throw UnsupportedIdealShape("coefficient " + v.get_str() + " does not reduce modulo " + g.get_str());
    };
    for (const auto& q : out.eta_r) check(q);
    for (const auto& ru : out.rules) check(ru.rhs);
  }
  std::string suffix;
  for (std::size_t i = 0; i < gens.size(); ++i) suffix += (i ? "," : "") + gens[i];
  out.name = h.name + "/(" + suffix + ")";
  out.base.name = out.name;
  out.clear_caches();
  return out;
}

std::optional<MultiDegree> check_witness(const HopfAlgebroid& h, const CoverReduction& red) {
  const std::set<std::size_t> idx = base_indices(h, red.kill, nullptr);
  Killed k = kill_base(h, idx);
  const HopfAlgebroid& r = k.h;  // A'⊗Γ, before imposing η_R of the killed generators
  std::vector<Poly> wit;
  std::vector<MultiDegree> wdeg;
  std::vector<std::string> words;
  for (const auto& w : red.witness) {
    if (w.size() > 2 && w.compare(w.size() - 2, 2, "^*") == 0) {
      // all powers of a Γ-generator inside the bound
      const std::string g = w.substr(0, w.size() - 2);
      const MultiDegree d = h.combined().degree_of(h.parse(g));
      if (d.empty() || d[0] <= 0) throw std::invalid_argument("witness " + w + " needs positive degree");
      for (int k = 0; k * d[0] <= red.bound; ++k) words.push_back(k == 0 ? "1" : g + "^" + std::to_string(k));
    } else {
      words.push_back(w);
    }
  }
  for (const auto& w : words) {
    Poly p = h.parse(w);
    if (p.size() != 1 || !all_zero(head(p.terms().begin()->first, h.na())))
      throw std::invalid_argument("witness element " + w + " is not a Γ-monomial");
    wdeg.push_back(h.combined().degree_of(p));
    wit.push_back(remap(p, k.images));
  }
  MultiDegree hi(h.arity(), red.bound);
  const auto degs = degrees_in_box(h.combined(), MultiDegree(h.arity(), 0), hi);
  Cobar target(r, hi);
  const Coefficients& coeffs = h.base.coeffs;
  for (const auto& d : degs) {
    // Target basis: A'-monomials times reduced γ-monomials (including 1).
    CobarBasis tb;
    {
      std::vector<std::pair<Exponents, MultiDegree>> monos{{Exponents(r.ng(), 0), MultiDegree(h.arity(), 0)}};
      for (const auto& m : target.monos()) monos.push_back(m);
      for (const auto& [g, gd] : monos) {
        MultiDegree rem = d;
        bool ok = true;
        for (std::size_t c = 0; c < rem.size(); ++c) {
          rem[c] -= gd[c];
          if (rem[c] < 0) ok = false;
        }
        if (!ok) continue;
        auto ab = r.a_engine().basis(rem);
        if (ab->monos.empty()) continue;
        tb.index.emplace(std::vector<Exponents>{g}, tb.tuples.size());
        tb.tuples.push_back({g});
        tb.adeg.push_back(rem);
        tb.abasis.push_back(ab);
        tb.offset.push_back(tb.n);
        tb.n += static_cast<int>(ab->monos.size());
      }
    }
    std::vector<std::map<int, mpq_class>> rows;
    std::vector<SparseRow> src_rel;
    int nsrc = 0;
    for (std::size_t w = 0; w < wit.size(); ++w) {
      MultiDegree rem = d;
      bool ok = true;
      for (std::size_t c = 0; c < rem.size(); ++c) {
        rem[c] -= wdeg[w][c];
        if (rem[c] < 0) ok = false;
      }
      if (!ok) continue;
      auto ab = h.a_engine().basis(rem);
      for (const auto& rr : h.a_engine().relation_rows(rem)) src_rel.push_back(row_shift(rr, nsrc));
      for (const auto& m : ab->monos) {
        const Poly img = r.reduce(remap(h.eta_r_of(Poly::monomial(join(m, Exponents(h.ng(), 0)))), k.images) * wit[w]);
        Tensor t;
        for (const auto& [e, c] : img.terms()) t[{head(e, r.na()), {tail(e, r.na())}}] += c;
        std::map<int, mpq_class> row;
        PieceEngine& eng = r.a_engine();
        for (const auto& [key, c] : t) {
          if (sgn(c) == 0 || eng.killed(key.first)) continue;
          auto it = tb.index.find(key.second);
          if (it == tb.index.end()) throw std::logic_error("witness: unreduced Γ-monomial");
          const auto& ab2 = *tb.abasis[it->second];
          const int col = tb.offset[it->second] + ab2.index.at(key.first);
          row[col] += c;
        }
        rows.push_back(std::move(row));
      }
      nsrc += static_cast<int>(ab->monos.size());
    }
    const mpz_class l = lcm_den(rows);
    require_unit(l, coeffs, "witness map");
    const std::vector<SparseRow> img = scale_rows(rows, l);
    std::vector<SparseRow> tgt_rel;
    for (std::size_t b = 0; b < tb.tuples.size(); ++b)
      for (const auto& rr : r.a_engine().relation_rows(tb.adeg[b])) tgt_rel.push_back(row_shift(rr, tb.offset[b]));
    std::vector<SparseRow> all = img;
    all.insert(all.end(), tgt_rel.begin(), tgt_rel.end());
    if (!quotient_group(tb.n, all, coeffs).is_zero()) return d;
    const auto pre = preimage(tb.n, img, tgt_rel);
    if (!subquotient(nsrc, pre, src_rel, coeffs).group.is_zero()) return d;
  }
  return std::nullopt;
}

HopfAlgebroid change_of_cover(const HopfAlgebroid& h, const CoverReduction& red) {
  if (auto bad = check_witness(h, red))
    throw WitnessFails("witness basis fails for " + h.name + " in degree " + degree_str(*bad));
  const std::set<std::size_t> idx = base_indices(h, red.kill, nullptr);
  Killed k = kill_base(h, idx);
  HopfAlgebroid out = k.h;
  for (std::size_t i : idx) {
    const Poly rho = out.reduce(remap(h.eta_r[i], k.images));
    if (rho.is_zero()) continue;
    out.add_gamma_relation(rho, "eta_R(" + h.base.gens[i].name + ")");
  }
  std::string suffix;
  for (std::size_t i = 0; i < red.kill.size(); ++i) suffix += (i ? "," : "") + red.kill[i];
  out.name = h.name + "/(" + suffix + ")";
  out.base.name = out.name;
  out.clear_caches();
  return out;
}

HopfAlgebroid base_change_comodule(const HopfAlgebroid& h, const ComoduleAlgebra& m) {
  if (m.gens.empty() && m.relations.empty()) return h;
  HopfAlgebroid out;
  out.name = h.name + "_" + m.name;
  out.base = h.base;
  out.base.name = out.name;
  for (const auto& g : m.gens) out.base.add_generator(g.name, g.degree, g.inverted);
  const std::size_t k = m.gens.size();
  const std::size_t na2 = out.base.nvars();
  const std::size_t nc2 = na2 + h.ng();
  std::vector<Poly> images;
  for (std::size_t i = 0; i < h.na(); ++i) images.push_back(Poly::variable(nc2, i));
  for (std::size_t j = 0; j < h.ng(); ++j) images.push_back(Poly::variable(nc2, h.na() + k + j));
  out.gamma = h.gamma;
  for (std::size_t i = 0; i < h.na(); ++i) out.eta_r.push_back(remap(h.eta_r[i], images));
  for (std::size_t i = 0; i < k; ++i) out.eta_r.push_back(Poly::variable(nc2, h.na() + i));
  for (const auto& e : h.epsilon) out.epsilon.push_back(remap(e, images));
  for (const auto& terms : h.delta) {
    std::vector<std::pair<Poly, Poly>> t;
    for (const auto& [l, r] : terms) t.emplace_back(remap(l, images), remap(r, images));
    out.delta.push_back(std::move(t));
  }
  for (const auto& [nm, p] : h.definitions) out.definitions.emplace_back(nm, remap(p, images));
  for (const auto& ru : h.rules) {
    GammaRule r = ru;
    r.rhs = remap(ru.rhs, images);
    out.rules.push_back(r);
  }
  for (const auto& rel : m.relations) {
    const Poly p = out.parse(rel);
    out.base.add_relation(out.a_part(p), rel);
  }
  for (const auto& [g, text] : m.coaction) out.set_eta_r(g, text);
  out.clear_caches();
  return out;
}

}  // namespace wb
