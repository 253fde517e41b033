#include "workbench/spectralsequences.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>
#include <sstream>

#include "workbench/parallel.hpp"

namespace wb {

using nlohmann::json;

MultiDegree DifferentialGrading::shift(int r) const {
  MultiDegree d = base;
  for (std::size_t i = 0; i < d.size() && i < step.size(); ++i) d[i] += r * step[i];
  return d;
}

std::vector<DifferentialRule> rules_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("rule-set JSON: ") + e.what());
  }
  const json& arr = j.is_array() ? j : j.at("rules");
  std::vector<DifferentialRule> out;
  try {
    for (const auto& r : arr)
      out.push_back({r.at("page").get<int>(), r.at("source").get<std::string>(), r.at("target").get<std::string>(),
                     r.value("citation", std::string())});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("rule-set JSON: ") + e.what());
  }
  return out;
}

std::string rules_to_json(const std::vector<DifferentialRule>& rules) {
  json arr = json::array();
  for (const auto& r : rules)
    arr.push_back({{"page", r.page}, {"source", r.source}, {"target", r.target}, {"citation", r.citation}});
  return json{{"rules", arr}}.dump(2);
}

// ----------------------------------------------------------------- engine state

struct SSState {
  std::shared_ptr<PieceEngine> eng;
  DifferentialGrading grading;
  std::vector<MultiDegree> degrees;  // sorted by weight, then lexicographically
  std::map<MultiDegree, std::size_t> index;
  std::vector<int> n;
  std::vector<std::vector<SparseRow>> l1, l2;  // final page

  long find(const MultiDegree& d) const {
    auto it = index.find(d);
    return it == index.end() ? -1 : static_cast<long>(it->second);
  }
};

namespace {

long weight(const MultiDegree& d) {
  long w = 0;
  for (int x : d) w += x;
  return w;
}

std::vector<SparseRow> echelonize(int ncols, const std::vector<SparseRow>& rows) {
  Echelon e(ncols);
  for (const auto& r : rows) e.insert(r);
  return e.rows();
}

MultiDegree add(const MultiDegree& a, const MultiDegree& b) {
  MultiDegree c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
  return c;
}

MultiDegree sub(const MultiDegree& a, const MultiDegree& b) {
  MultiDegree c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
  return c;
}

struct ParsedRule {
  int page;
  Poly source, target;
  MultiDegree sdeg, tdeg;
  std::string text;
};

struct Element {
  Poly rho, delta;
  long last = -1;  // index of the largest generator factor
};

struct Gen {
  Poly rho, delta;
  MultiDegree deg;
};

bool odd_degree(const MultiDegree& d) { return !d.empty() && (d[0] % 2 != 0); }

GroupDescriptor group_of(int n, const std::vector<SparseRow>& l1, const std::vector<SparseRow>& l2,
                         const Coefficients& k) {
  return subquotient(n, l1, l2, k).group;
}

}  // namespace

RunReport run(const PageSpec& spec, const std::vector<DifferentialRule>& rules, const SSWindow& window,
              const std::string& name) {
  auto st = std::make_shared<SSState>();
  st->eng = std::make_shared<PieceEngine>(spec.ring);
  st->grading = spec.grading;
  PieceEngine& eng = *st->eng;
  const RingPresentation& ring = spec.ring;
  const Coefficients& k = ring.coeffs;
  const std::size_t ar = ring.arity();
  if (window.hi.size() != ar) throw DegreeMismatch("spectral sequence window arity differs from the grading");

  st->degrees = degrees_in_box(ring, MultiDegree(ar, 0), window.hi);
  std::sort(st->degrees.begin(), st->degrees.end(), [](const MultiDegree& a, const MultiDegree& b) {
    const long wa = weight(a), wb = weight(b);
    return wa != wb ? wa < wb : a < b;
  });
  const std::size_t nd = st->degrees.size();
  for (std::size_t i = 0; i < nd; ++i) st->index[st->degrees[i]] = i;
  st->n.resize(nd);
  st->l1.resize(nd);
  st->l2.resize(nd);
  parallel_for(nd, [&](std::size_t i) {
    const MultiDegree& d = st->degrees[i];
    const int n = static_cast<int>(eng.basis(d)->monos.size());
    st->n[i] = n;
    st->l2[i] = echelonize(n, eng.relation_rows(d));
    for (int c = 0; c < n; ++c) st->l1[i].push_back(SparseRow{{c, mpz_class(1)}});
  });

  std::vector<ParsedRule> parsed;
  int last_rule_page = spec.page;
  for (const auto& r : rules) {
    ParsedRule p;
    p.page = r.page;
    p.text = "d" + std::to_string(r.page) + "(" + r.source + ") = " + r.target;
    try {
      p.source = ring.parse(r.source);
      p.target = ring.parse(r.target);
      p.sdeg = ring.degree_of(p.source);
    } catch (const ParseError& e) {
      throw InconsistentRule(p.text + ": " + e.what());
    } catch (const DegreeMismatch& e) {
      throw InconsistentRule(p.text + ": " + e.what());
    }
    const MultiDegree want = add(p.sdeg, spec.grading.shift(r.page));
    if (!p.target.is_zero()) {
      MultiDegree td;
      if (!homogeneous_degree(p.target, ring.degrees(), ar, td))
        throw InconsistentRule(p.text + ": target is not homogeneous");
      if (td != want)
        throw InconsistentRule(p.text + ": target has degree " + degree_str(td) + ", expected " + degree_str(want));
    }
    p.tdeg = want;
    if (r.page < spec.page) throw InconsistentRule(p.text + ": page precedes the first page");
    last_rule_page = std::max(last_rule_page, r.page);
    parsed.push_back(std::move(p));
  }

  RunReport rep;
  rep.name = name;
  rep.arity = ar;
  rep.column_names = degree_column_names(ar);
  std::set<std::string> noted;
  auto note = [&](const std::string& s) {
    if (noted.insert(s).second) rep.notes.push_back(s);
  };
  auto record = [&](int r) {
    std::vector<GroupDescriptor> g(nd);
    parallel_for(nd, [&](std::size_t i) { g[i] = group_of(st->n[i], st->l1[i], st->l2[i], k); });
    std::map<MultiDegree, GroupDescriptor> m;
    for (std::size_t i = 0; i < nd; ++i)
      if (!g[i].is_zero()) m.emplace(st->degrees[i], std::move(g[i]));
    rep.pages.push_back(r);
    rep.groups.push_back(std::move(m));
  };

  for (int r = spec.page;; ++r) {
    record(r);
    if (r >= window.max_page) break;
    const MultiDegree shift = spec.grading.shift(r);

    // Page generators and spanning sets, in weight order.
    std::vector<Gen> gens;
    std::vector<std::vector<Element>> span(nd);
    for (std::size_t i = 0; i < nd; ++i) {
      const MultiDegree& d = st->degrees[i];
      auto& S = span[i];
      if (weight(d) == 0) S.push_back({Poly::constant(ring.nvars(), 1), Poly(ring.nvars()), -1});
      for (std::size_t g = 0; g < gens.size(); ++g) {
        const MultiDegree rest = sub(d, gens[g].deg);
        bool neg = false;
        for (int x : rest)
          if (x < 0) neg = true;
        if (neg) continue;
        const long j = st->find(rest);
        if (j < 0) continue;
        const bool odd = odd_degree(gens[g].deg);
        for (const auto& x : span[static_cast<std::size_t>(j)]) {
          if (x.last > static_cast<long>(g)) continue;
          Element e;
          e.rho = gens[g].rho * x.rho;
          e.delta = gens[g].delta * x.rho;
          if (!x.delta.is_zero()) e.delta += (odd ? -(gens[g].rho * x.delta) : gens[g].rho * x.delta);
          e.last = static_cast<long>(g);
          S.push_back(std::move(e));
        }
      }
      if (st->n[i] == 0) {
        // Products vanish here, so their differentials must vanish on this page too.
        const MultiDegree td = add(d, shift);
        bool neg = false;
        for (int x : td)
          if (x < 0) neg = true;
        const long tj = neg ? -1 : st->find(td);
        if (tj >= 0 && st->n[static_cast<std::size_t>(tj)] > 0)
          for (const auto& e : S) {
            if (e.delta.is_zero()) continue;
            const std::size_t t = static_cast<std::size_t>(tj);
            if (!contains_up_to_units(st->n[t], st->l2[t], eng.to_row(e.delta, td), k))
              throw InconsistentRule("d" + std::to_string(r) + " is not well defined in degree " + degree_str(d) +
                                     ": the Leibniz extension contradicts the relations");
          }
        S.clear();
        continue;
      }
      std::vector<SparseRow> dec = st->l2[i];
      for (const auto& e : S) dec.push_back(eng.to_row(e.rho, d));
      std::vector<Gen> fresh;
      for (const auto& pr : parsed) {
        if (pr.page != r || pr.sdeg != d) continue;
        const SparseRow srow = eng.to_row(pr.source, d);
        if (!contains_up_to_units(st->n[i], st->l1[i], srow, k))
          throw InconsistentRule(pr.text + ": source is not a class on page " + std::to_string(r));
        Poly target = pr.target;
        const long tj = st->find(pr.tdeg);
        if (tj >= 0 && !target.is_zero()) {
          const std::size_t t = static_cast<std::size_t>(tj);
          const SparseRow trow = eng.to_row(target, pr.tdeg);
          if (!contains_up_to_units(st->n[t], st->l1[t], trow, k))
            throw InconsistentRule(pr.text + ": target is not a cycle on page " + std::to_string(r));
          if (contains_up_to_units(st->n[t], st->l2[t], trow, k)) {
            note("TargetNotOnPage: " + pr.text + " (target already zero on page " + std::to_string(r) + ")");
            target = Poly(ring.nvars());
          }
        } else if (tj < 0 && !target.is_zero()) {
          note("outside window: " + pr.text + " treated as zero");
          target = Poly(ring.nvars());
        }
        fresh.push_back({pr.source, target, d});
        dec.push_back(srow);
      }
      const Subquotient q = subquotient(st->n[i], st->l1[i], dec, k);
      for (const auto& v : q.free_reps) fresh.push_back({eng.from_row(v, d), Poly(ring.nvars()), d});
      for (const auto& v : q.torsion_reps) fresh.push_back({eng.from_row(v, d), Poly(ring.nvars()), d});
      for (auto& g : fresh) {
        S.push_back({g.rho, g.delta, static_cast<long>(gens.size())});
        gens.push_back(std::move(g));
      }
    }

    // Kernels, images and the checks d∘d = 0 and well-definedness.
    std::vector<std::vector<SparseRow>> l1next(nd), images(nd);
    std::vector<long> tgt(nd, -1);
    std::vector<std::string> errors(nd), truncated(nd);
    parallel_for(nd, [&](std::size_t i) {
      const MultiDegree& d = st->degrees[i];
      const int n = st->n[i];
      if (n == 0) return;
      const MultiDegree td = add(d, shift);
      bool neg = false;
      for (int x : td)
        if (x < 0) neg = true;
      const long tj = neg ? -1 : st->find(td);
      bool any = false;
      for (const auto& e : span[i])
        if (!e.delta.is_zero()) any = true;
      if (tj < 0 || st->n[static_cast<std::size_t>(tj)] == 0) {
        l1next[i] = st->l1[i];
        if (any && tj < 0) truncated[i] = degree_str(d);
        return;
      }
      tgt[i] = tj;
      const std::size_t t = static_cast<std::size_t>(tj);
      const int nt = st->n[t];
      std::vector<std::pair<SparseRow, SparseRow>> pairs, back;
      std::vector<SparseRow> img;
      for (const auto& e : span[i]) {
        const SparseRow rr = eng.to_row(e.rho, d);
        const SparseRow dr = e.delta.is_zero() ? SparseRow{} : eng.to_row(e.delta, td);
        pairs.emplace_back(dr, rr);
        back.emplace_back(rr, dr);
        if (!dr.empty()) img.push_back(dr);
      }
      for (const auto& l : st->l2[t]) pairs.emplace_back(l, SparseRow{});
      for (const auto& l : st->l2[i]) {
        pairs.emplace_back(SparseRow{}, l);
        back.emplace_back(l, SparseRow{});
      }
      l1next[i] = echelonize(n, project_kernel(nt, n, pairs));
      for (const auto& v : project_kernel(n, nt, back))
        if (!contains_up_to_units(nt, st->l2[t], v, k)) {
          errors[i] = "d" + std::to_string(r) + " is not well defined in degree " + degree_str(d) +
                      ": the Leibniz extension contradicts the relations";
          break;
        }
      images[i] = std::move(img);
    });
    for (std::size_t i = 0; i < nd; ++i) {
      if (!errors[i].empty()) throw InconsistentRule(errors[i]);
      if (!truncated[i].empty())
        note("page " + std::to_string(r) + ": differential from " + truncated[i] + " leaves the window");
    }
    std::vector<std::vector<SparseRow>> l2next = st->l2;
    bool nonzero = false;
    for (std::size_t i = 0; i < nd; ++i) {
      if (tgt[i] < 0 || images[i].empty()) continue;
      const std::size_t t = static_cast<std::size_t>(tgt[i]);
      for (const auto& v : images[i]) {
        if (!contains_up_to_units(st->n[t], st->l2[t], v, k)) nonzero = true;
        l2next[t].push_back(v);
      }
    }
    parallel_for(nd, [&](std::size_t t) {
      l2next[t] = echelonize(st->n[t], l2next[t]);
    });
    for (std::size_t i = 0; i < nd; ++i) {
      if (tgt[i] < 0) continue;
      const std::size_t t = static_cast<std::size_t>(tgt[i]);
      for (const auto& v : images[i])
        if (!contains_up_to_units(st->n[t], l1next[t], v, k))
          throw InconsistentRule("d" + std::to_string(r) + "∘d" + std::to_string(r) + " ≠ 0 from degree " +
                                 degree_str(st->degrees[i]));
    }
    st->l1 = std::move(l1next);
    st->l2 = std::move(l2next);
    if (!nonzero && r >= last_rule_page) break;
  }

  // Final page with labels.
  std::vector<GroupDescriptor> g(nd);
  parallel_for(nd, [&](std::size_t i) {
    const MultiDegree& d = st->degrees[i];
    ColumnNamer namer = [&](const SparseRow& v) { return eng.row_name(v, d); };
    g[i] = subquotient(st->n[i], st->l1[i], st->l2[i], k, namer).group;
  });
  for (std::size_t i = 0; i < nd; ++i)
    if (!g[i].is_zero()) rep.einf.emplace(st->degrees[i], std::move(g[i]));
  rep.state = st;
  return rep;
}

std::vector<DifferentialRule> lift_rules(const std::vector<DifferentialRule>& stable_rules, const std::string& a) {
  std::vector<DifferentialRule> out;
  for (const auto& r : stable_rules) {
    DifferentialRule u = r;
    u.target = a + "^" + std::to_string(r.page) + "*(" + r.target + ")";
    out.push_back(u);
  }
  return out;
}

RunReport uaahss_lift(const PageSpec& unstable, const std::vector<DifferentialRule>& stable_rules,
                      const std::string& a, const SSWindow& window, const std::string& name) {
  return run(unstable, lift_rules(stable_rules, a), window, name);
}

RunReport register_hidden_extension(RunReport report, const PageSpec& spec, const std::string& relation) {
  const auto eq = relation.find('=');
  if (eq == std::string::npos) throw ParseError("extension '" + relation + "' has no '='");
  HiddenExtension h;
  h.text = relation;
  h.lhs = spec.ring.parse(relation.substr(0, eq));
  h.rhs = spec.ring.parse(relation.substr(eq + 1));
  if (h.lhs.is_zero() && h.rhs.is_zero()) return report;
  const auto degs = spec.ring.degrees();
  MultiDegree dl, dr;
  if (!homogeneous_degree(h.lhs, degs, spec.ring.arity(), dl) || !homogeneous_degree(h.rhs, degs, spec.ring.arity(), dr))
    throw DegreeMismatch("extension '" + relation + "' is not homogeneous");
  const int f = spec.grading.filtration_component;
  for (std::size_t i = 0; i < dl.size(); ++i) {
    if (static_cast<int>(i) == f) continue;
    if (!h.lhs.is_zero() && !h.rhs.is_zero() && dl[i] != dr[i])
      throw DegreeMismatch("extension '" + relation + "' relates degrees " + degree_str(dl) + " and " +
                           degree_str(dr));
  }
  h.degree = h.lhs.is_zero() ? dr : dl;
  report.extensions.push_back(std::move(h));
  return report;
}

// ----------------------------------------------------------------- towers

namespace {

// Rank over F_p of a set of integer vectors.
std::size_t rank_mod_p(std::vector<std::vector<long>> rows, std::size_t ncols, long p) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < ncols && rank < rows.size(); ++c) {
    std::size_t piv = rows.size();
    for (std::size_t i = rank; i < rows.size(); ++i)
      if (rows[i][c] % p != 0) {
        piv = i;
        break;
      }
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    long inv = 1;
    const long a = ((rows[rank][c] % p) + p) % p;
    for (long x = 1; x < p; ++x)
      if ((a * x) % p == 1) inv = x;
    for (auto& v : rows[rank]) v = (((v % p) + p) % p * inv) % p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == rank) continue;
      const long f = ((rows[i][c] % p) + p) % p;
      if (!f) continue;
      for (std::size_t j = 0; j < ncols; ++j) rows[i][j] = (((rows[i][j] - f * rows[rank][j]) % p) + p) % p;
    }
    ++rank;
  }
  return rank;
}

std::vector<long> coords_mod(const Echelon& basis, const SparseRow& v, long p) {
  std::vector<mpz_class> c;
  if (!basis.coordinates(v, c)) throw std::logic_error("tower map leaves the cycles");
  std::vector<long> out;
  for (const auto& x : c) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(p));
    out.push_back(r.get_si());
  }
  return out;
}

}  // namespace

std::vector<TowerDescriptor> towers(const RunReport& report, const std::string& gname, unsigned long p,
                                    const MultiDegree& trusted_hi) {
  if (!report.state) return {};
  const SSState& st = *report.state;
  PieceEngine& eng = *st.eng;
  const Poly g = eng.presentation().parse(gname);
  const MultiDegree gd = eng.presentation().degree_of(g);
  const long lp = static_cast<long>(p);
  MultiDegree top = trusted_hi;
  if (top.empty()) {
    top.assign(gd.size(), 0);
    for (const auto& e : st.degrees)
      for (std::size_t c = 0; c < e.size(); ++c) top[c] = std::max(top[c], e[c]);
  }
  std::map<MultiDegree, TowerDescriptor> out;
  std::set<MultiDegree> seen;
  for (const auto& d0 : st.degrees) {
    bool trusted = true;
    for (std::size_t c = 0; c < d0.size(); ++c)
      if (d0[c] > top[c]) trusted = false;
    if (!trusted) continue;
    MultiDegree key = d0;
    while (true) {
      MultiDegree prev = sub(key, gd);
      bool neg = false;
      for (int x : prev)
        if (x < 0) neg = true;
      if (neg) break;
      key = prev;
    }
    if (!seen.insert(key).second) continue;
    // positions up to the trusted top; degrees without monomials carry zero
    std::vector<long> pos;
    std::vector<MultiDegree> ds;
    for (MultiDegree d = key;; d = add(d, gd)) {
      bool beyond = false;
      for (std::size_t c = 0; c < d.size(); ++c)
        if (d[c] > top[c]) beyond = true;
      if (beyond) break;
      pos.push_back(st.find(d));
      ds.push_back(d);
    }
    const std::size_t K = pos.size();
    if (K == 0) continue;
    // F_p data per position: L1 basis and L2 coordinates
    std::vector<std::unique_ptr<Echelon>> basis(K);
    std::vector<std::vector<std::vector<long>>> rel(K);
    std::vector<std::size_t> dimv(K, 0), relrank(K, 0);
    for (std::size_t i = 0; i < K; ++i) {
      if (pos[i] < 0) continue;
      const std::size_t j = static_cast<std::size_t>(pos[i]);
      basis[i] = std::make_unique<Echelon>(st.n[j]);
      for (const auto& r : st.l1[j]) basis[i]->insert(r);
      for (const auto& r : st.l2[j]) rel[i].push_back(coords_mod(*basis[i], r, lp));
      relrank[i] = rank_mod_p(rel[i], basis[i]->rank(), lp);
      dimv[i] = basis[i]->rank() - relrank[i];
    }
    // r[i][j]: rank of g^{j-i} from position i to j
    std::vector<std::vector<std::size_t>> rk(K, std::vector<std::size_t>(K, 0));
    for (std::size_t i = 0; i < K; ++i) {
      if (dimv[i] == 0) continue;
      rk[i][i] = dimv[i];
      std::vector<Poly> cur;
      for (const auto& b : basis[i]->rows()) cur.push_back(eng.from_row(b, ds[i]));
      for (std::size_t j = i + 1; j < K; ++j) {
        for (auto& c : cur) c = c * g;
        if (dimv[j] == 0) break;
        std::vector<std::vector<long>> rows = rel[j];
        const std::size_t ncols = basis[j]->rank();
        for (const auto& c : cur) rows.push_back(coords_mod(*basis[j], eng.to_row(c, ds[j]), lp));
        rk[i][j] = rank_mod_p(rows, ncols, lp) - relrank[j];
      }
    }
    auto R = [&](long i, long j) -> long {
      if (i < 0 || j >= static_cast<long>(K) || i > j) return 0;
      return static_cast<long>(rk[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    };
    for (long i = 0; i < static_cast<long>(K); ++i)
      for (long j = i; j < static_cast<long>(K); ++j) {
        const long bars = R(i, j) - R(i - 1, j) - R(i, j + 1) + R(i - 1, j + 1);
        if (bars <= 0) continue;
        auto& t = out[ds[static_cast<std::size_t>(i)]];
        t.key = ds[static_cast<std::size_t>(i)];
        for (long b = 0; b < bars; ++b) {
          if (j == static_cast<long>(K) - 1)
            ++t.free;
          else
            t.truncated.push_back(static_cast<int>(j - i + 1));
        }
      }
  }
  std::vector<TowerDescriptor> v;
  for (auto& [kd, t] : out) {
    std::sort(t.truncated.begin(), t.truncated.end());
    v.push_back(std::move(t));
  }
  return v;
}

GroupDescriptor tower_group(const TowerDescriptor& t, unsigned long p) {
  GroupDescriptor g;
  g.free_rank = t.free;
  for (int len : t.truncated) {
    mpz_class o;
    mpz_ui_pow_ui(o.get_mpz_t(), p, static_cast<unsigned long>(len));
    g.torsion.push_back(o);
  }
  std::sort(g.torsion.begin(), g.torsion.end());
  return g;
}

// ----------------------------------------------------------------- comparison

GroupDescriptor projected_group(const RunReport& report, const std::vector<std::size_t>& keep, const MultiDegree& d) {
  GroupDescriptor g;
  for (const auto& [deg, grp] : report.einf) {
    bool match = true;
    for (std::size_t i = 0; i < keep.size(); ++i)
      if (deg[keep[i]] != d[i]) match = false;
    if (match) g = direct_sum(g, grp);
  }
  g.labels.clear();
  return g;
}

std::vector<DiffLine> compare_assoc_graded(const RunReport& report, const std::vector<std::size_t>& keep,
                                           const std::function<GroupDescriptor(const MultiDegree&)>& target,
                                           const MultiDegree& lo, const MultiDegree& hi) {
  std::set<MultiDegree> degs;
  for (const auto& [deg, grp] : report.einf) {
    MultiDegree p;
    for (std::size_t i : keep) p.push_back(deg[i]);
    degs.insert(p);
  }
  // every degree of the box, so that target classes missing from the report show up
  MultiDegree cur = lo;
  if (!lo.empty()) {
    while (true) {
      degs.insert(cur);
      std::size_t c = 0;
      while (c < cur.size()) {
        if (cur[c] < hi[c]) {
          ++cur[c];
          break;
        }
        cur[c] = lo[c];
        ++c;
      }
      if (c == cur.size()) break;
    }
  }
  std::vector<DiffLine> out;
  for (const auto& d : degs) {
    bool inside = true;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] < lo[i] || d[i] > hi[i]) inside = false;
    if (!inside) continue;
    GroupDescriptor got = projected_group(report, keep, d);
    GroupDescriptor want = target(d);
    want.labels.clear();
    if (!got.same_group(want)) out.push_back({d, got, want});
  }
  return out;
}

std::vector<DiffLine> compare_assoc_graded(const RunReport& report, const RingPresentation& target,
                                           const std::vector<std::size_t>& keep, const MultiDegree& lo,
                                           const MultiDegree& hi) {
  auto eng = std::make_shared<PieceEngine>(target);
  return compare_assoc_graded(
      report, keep,
      [&](const MultiDegree& d) {
        for (int x : d)
          if (x < 0) return GroupDescriptor{};
        return eng->piece(d, false);
      },
      lo, hi);
}

RunReport page_report(const RunReport& report, int page) {
  RunReport out = report;
  out.einf.clear();
  for (std::size_t i = 0; i < report.pages.size(); ++i)
    if (report.pages[i] == page) out.einf = report.groups[i];
  out.towers.clear();
  return out;
}

RunReport restrict_window(const RunReport& report, const MultiDegree& lo, const MultiDegree& hi) {
  auto inside = [&](const MultiDegree& d) {
    for (std::size_t i = 0; i < d.size(); ++i)
      if ((i < lo.size() && d[i] < lo[i]) || (i < hi.size() && d[i] > hi[i])) return false;
    return true;
  };
  auto trim = [&](std::map<MultiDegree, GroupDescriptor>& m) {
    for (auto it = m.begin(); it != m.end();) it = inside(it->first) ? std::next(it) : m.erase(it);
  };
  RunReport out = report;
  for (auto& g : out.groups) trim(g);
  trim(out.einf);
  std::vector<TowerDescriptor> kept;
  for (const auto& t : out.towers)
    if (inside(t.key)) kept.push_back(t);
  out.towers = std::move(kept);
  return out;
}

std::vector<DiffLine> collapse_check(const RunReport& unstable, const RunReport& stable, std::size_t m_component,
                                     int m_top, int margin) {
  std::vector<DiffLine> out;
  std::set<MultiDegree> degs;
  for (const auto& [d, g] : stable.einf) degs.insert(d);
  for (const auto& [d, g] : unstable.einf)
    if (d[m_component] == m_top) {
      MultiDegree s = d;
      s.erase(s.begin() + static_cast<long>(m_component));
      degs.insert(s);
    }
  for (const auto& s : degs) {
    if (s.back() > m_top - margin) continue;
    MultiDegree d = s;
    d.insert(d.begin() + static_cast<long>(m_component), m_top);
    auto a = stable.einf.find(s);
    auto b = unstable.einf.find(d);
    GroupDescriptor ga = a == stable.einf.end() ? GroupDescriptor{} : a->second;
    GroupDescriptor gb = b == unstable.einf.end() ? GroupDescriptor{} : b->second;
    if (!ga.same_group(gb)) out.push_back({s, gb, ga});
  }
  return out;
}

std::string diff_string(const std::vector<DiffLine>& d) {
  std::ostringstream os;
  for (const auto& l : d) os << degree_str(l.degree) << ": " << l.got.str() << " vs " << l.want.str() << "\n";
  return os.str();
}

// ----------------------------------------------------------------- output

std::string RunReport::csv() const {
  std::ostringstream os;
  for (const auto& c : column_names) os << c << ",";
  os << "rank,torsion,labels\n";
  for (const auto& [d, g] : einf) {
    for (int x : d) os << x << ",";
    os << g.free_rank << "," << g.torsion_str() << ",";
    for (std::size_t i = 0; i < g.labels.size(); ++i) os << (i ? ";" : "") << g.labels[i];
    os << "\n";
  }
  return os.str();
}

std::string RunReport::json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["columns"] = column_names;
  auto cell = [](const MultiDegree& d, const GroupDescriptor& g, bool labels) {
    nlohmann::ordered_json c;
    c["degree"] = d;
    c["rank"] = g.free_rank;
    std::vector<std::string> t;
    for (const auto& x : g.torsion) t.push_back(x.get_str());
    c["torsion"] = t;
    if (labels) c["labels"] = g.labels;
    return c;
  };
  j["pages"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < pages.size(); ++i) {
    nlohmann::ordered_json p;
    p["page"] = pages[i];
    p["cells"] = nlohmann::ordered_json::array();
    for (const auto& [d, g] : groups[i]) p["cells"].push_back(cell(d, g, false));
    j["pages"].push_back(p);
  }
  j["einf"] = nlohmann::ordered_json::array();
  for (const auto& [d, g] : einf) j["einf"].push_back(cell(d, g, true));
  j["notes"] = notes;
  j["extensions"] = nlohmann::ordered_json::array();
  for (const auto& e : extensions) j["extensions"].push_back({{"relation", e.text}, {"degree", e.degree}});
  j["towers"] = nlohmann::ordered_json::array();
  for (const auto& t : towers)
    j["towers"].push_back({{"degree", t.key}, {"free", t.free}, {"truncated", t.truncated}});
  return j.dump(1);
}

}  // namespace wb
