#include "workbench/lattice.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace wb {

SparseRow make_row(std::map<int, mpz_class> entries) {
  SparseRow r;
  r.reserve(entries.size());
  for (auto& [c, v] : entries)
    if (sgn(v) != 0) r.emplace_back(c, std::move(v));
  return r;
}

SparseRow row_add(const SparseRow& a, const SparseRow& b, const mpz_class& cb) {
  SparseRow out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      mpz_class v = cb * b[j].second;
      if (sgn(v) != 0) out.emplace_back(b[j].first, std::move(v));
      ++j;
    } else {
      mpz_class v = a[i].second + cb * b[j].second;
      if (sgn(v) != 0) out.emplace_back(a[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

SparseRow row_scale(const SparseRow& a, const mpz_class& c) {
  if (sgn(c) == 0) return {};
  SparseRow out = a;
  for (auto& e : out) e.second *= c;
  return out;
}

SparseRow row_shift(const SparseRow& a, int offset) {
  SparseRow out = a;
  for (auto& e : out) e.first += offset;
  return out;
}

std::size_t rational_rank(const std::vector<QRow>& rows, std::size_t ncols) {
  (void)ncols;
  std::map<std::size_t, std::map<std::size_t, mpq_class>> piv;
  for (const auto& r0 : rows) {
    std::map<std::size_t, mpq_class> r;
    for (const auto& [c, v] : r0)
      if (sgn(v) != 0) r[c] += v;
    for (auto it = r.begin(); it != r.end();) {
      if (sgn(it->second) == 0) {
        it = r.erase(it);
        continue;
      }
      auto p = piv.find(it->first);
      if (p == piv.end()) break;
      const mpq_class f = it->second / p->second.begin()->second;
      for (const auto& [c, v] : p->second) {
        r[c] -= f * v;
      }
      it = r.begin();
    }
    for (auto it = r.begin(); it != r.end();)
      it = sgn(it->second) == 0 ? r.erase(it) : std::next(it);
    if (!r.empty()) piv[r.begin()->first] = r;
  }
  return piv.size();
}

std::vector<std::pair<mpz_class, unsigned>> factorize(mpz_class n) {
  std::vector<std::pair<mpz_class, unsigned>> out;
  n = abs(n);
  for (mpz_class p = 2; p * p <= n; ++p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
    if (p > 1000000) break;
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

Coefficients Coefficients::parse(const std::string& s0) {
  std::string s;
  for (char ch : s0)
    if (ch != ' ') s += ch;
  if (s == "Z") return integers();
  if (s == "Q") return rationals();
  if (s.rfind("Z_(", 0) == 0 && s.back() == ')') return local(std::stoul(s.substr(3, s.size() - 4)));
  if (s.rfind("Z_", 0) == 0) return local(std::stoul(s.substr(2)));
  if (s.rfind("F_", 0) == 0) return field(std::stoul(s.substr(2)));
  if (s.size() > 1 && s[0] == 'F') return field(std::stoul(s.substr(1)));
  if (s.rfind("Z[1/", 0) == 0 && s.back() == ']') {
    const mpz_class n(s.substr(4, s.size() - 5));
    std::set<unsigned long> ps;
    for (const auto& [p, e] : factorize(n)) ps.insert(p.get_ui());
    return inverting(ps);
  }
  throw std::invalid_argument("unknown coefficient ring '" + s0 + "'");
}

bool Coefficients::is_unit_prime(const mpz_class& p) const {
  switch (kind) {
    case Kind::Integers:
      return false;
    case Kind::Rationals:
      return true;
    case Kind::Local:
    case Kind::Field:
      return p != prime;
    case Kind::Inverted:
      return p.fits_ulong_p() && inverted.count(p.get_ui()) > 0;
  }
  return false;
}

bool Coefficients::is_unit(const mpz_class& c) const {
  if (sgn(c) == 0) return false;
  for (const auto& [p, e] : factorize(c))
    if (!is_unit_prime(p)) return false;
  return true;
}

std::string Coefficients::name() const {
  switch (kind) {
    case Kind::Integers:
      return "Z";
    case Kind::Rationals:
      return "Q";
    case Kind::Local:
      return "Z_(" + std::to_string(prime) + ")";
    case Kind::Field:
      return "F_" + std::to_string(prime);
    case Kind::Inverted: {
      unsigned long n = 1;
      for (auto p : inverted) n *= p;
      return "Z[1/" + std::to_string(n) + "]";
    }
  }
  return "?";
}

std::size_t GroupDescriptor::dim_mod(unsigned long p) const {
  std::size_t d = free_rank;
  for (const auto& t : torsion)
    if (t % p == 0) ++d;
  return d;
}

std::string GroupDescriptor::torsion_str() const {
  std::string s;
  for (std::size_t i = 0; i < torsion.size(); ++i) s += (i ? ";" : "") + torsion[i].get_str();
  return s;
}

std::string GroupDescriptor::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  if (free_rank) {
    os << "Z";
    if (free_rank > 1) os << "^" << free_rank;
    first = false;
  }
  std::map<mpz_class, int> counts;
  for (const auto& t : torsion) counts[t]++;
  for (const auto& [t, k] : counts) {
    if (!first) os << " + ";
    first = false;
    if (k > 1)
      os << "(Z/" << t.get_str() << ")^" << k;
    else
      os << "Z/" << t.get_str();
  }
  return os.str();
}

GroupDescriptor direct_sum(const GroupDescriptor& a, const GroupDescriptor& b) {
  GroupDescriptor out;
  out.free_rank = a.free_rank + b.free_rank;
  out.torsion = a.torsion;
  out.torsion.insert(out.torsion.end(), b.torsion.begin(), b.torsion.end());
  std::sort(out.torsion.begin(), out.torsion.end());
  // free labels first
  for (std::size_t i = 0; i < a.free_rank && i < a.labels.size(); ++i) out.labels.push_back(a.labels[i]);
  for (std::size_t i = 0; i < b.free_rank && i < b.labels.size(); ++i) out.labels.push_back(b.labels[i]);
  for (std::size_t i = a.free_rank; i < a.labels.size(); ++i) out.labels.push_back(a.labels[i]);
  for (std::size_t i = b.free_rank; i < b.labels.size(); ++i) out.labels.push_back(b.labels[i]);
  return out;
}

// ---------------------------------------------------------------- Echelon

namespace {

void normalize_sign(SparseRow& r) {
  if (!r.empty() && sgn(r[0].second) < 0)
    for (auto& e : r) e.second = -e.second;
}

}  // namespace

bool Echelon::insert(SparseRow r) {
  while (!r.empty()) {
    const int c = r[0].first;
    auto it = rows_.find(c);
    if (it == rows_.end()) {
      normalize_sign(r);
      rows_.emplace(c, std::move(r));
      return true;
    }
    SparseRow& p = it->second;
    const mpz_class& a = p[0].second;
    const mpz_class b = r[0].second;
    if (mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t())) {
      r = row_add(r, p, -(b / a));
      continue;
    }
    mpz_class g, x, y;
    mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    SparseRow np = row_add(row_scale(p, x), r, y);
    SparseRow nr = row_add(row_scale(p, b / g), r, -(a / g));
    normalize_sign(np);
    p = std::move(np);
    r = std::move(nr);
  }
  return false;
}

bool Echelon::contains(const SparseRow& v0) const {
  SparseRow v = v0;
  while (!v.empty()) {
    auto it = rows_.find(v[0].first);
    if (it == rows_.end()) return false;
    const mpz_class& a = it->second[0].second;
    if (!mpz_divisible_p(v[0].second.get_mpz_t(), a.get_mpz_t())) return false;
    v = row_add(v, it->second, -(v[0].second / a));
  }
  return true;
}

bool Echelon::coordinates(const SparseRow& v0, std::vector<mpz_class>& out) const {
  out.assign(rows_.size(), 0);
  std::map<int, std::size_t> index;
  std::size_t k = 0;
  for (const auto& [c, r] : rows_) index[c] = k++;
  SparseRow v = v0;
  while (!v.empty()) {
    auto it = rows_.find(v[0].first);
    if (it == rows_.end()) return false;
    const mpz_class& a = it->second[0].second;
    if (!mpz_divisible_p(v[0].second.get_mpz_t(), a.get_mpz_t())) return false;
    const mpz_class f = v[0].second / a;
    out[index[it->first]] += f;
    v = row_add(v, it->second, -f);
  }
  return true;
}

std::vector<SparseRow> Echelon::rows() const {
  std::vector<SparseRow> out;
  out.reserve(rows_.size());
  for (const auto& [c, r] : rows_) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------- Smith form

namespace {

// Nearest-integer quotient, so the remainder has absolute value at most |d|/2.
mpz_class balanced_quotient(const mpz_class& n, const mpz_class& d) {
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  mpz_class r2 = 2 * abs(r);
  if (r2 > abs(d)) q += 1;  // r has the sign of d
  return q;
}

}  // namespace

SmithResult smith_dense(std::vector<std::vector<mpz_class>> a, std::size_t n, bool want_transform) {
  SmithResult res;
  const std::size_t m = a.size();
  std::vector<std::vector<mpz_class>>& vinv = res.vinv;
  if (want_transform) {
    vinv.assign(n, std::vector<mpz_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i) vinv[i][i] = 1;
  }
  auto col_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (auto& row : a) std::swap(row[i], row[j]);
    if (want_transform) std::swap(vinv[i], vinv[j]);
  };
  // col_j -= q col_t
  auto col_sub = [&](std::size_t j, std::size_t t, const mpz_class& q) {
    for (auto& row : a)
      if (sgn(row[t]) != 0) row[j] -= q * row[t];
    if (want_transform)
      for (std::size_t k = 0; k < n; ++k) vinv[t][k] += q * vinv[j][k];
  };
  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    bool any = false;
    while (true) {
      // smallest nonzero entry of the trailing block becomes the pivot
      bool found = false;
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (sgn(a[i][j]) != 0 && (!found || mpz_cmpabs(a[i][j].get_mpz_t(), a[bi][bj].get_mpz_t()) < 0)) {
            found = true;
            bi = i;
            bj = j;
          }
      if (!found) break;
      any = true;
      std::swap(a[t], a[bi]);
      col_swap(t, bj);
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (sgn(a[i][t]) == 0) continue;
        const mpz_class q = balanced_quotient(a[i][t], a[t][t]);
        for (std::size_t j = t; j < n; ++j)
          if (sgn(a[t][j]) != 0) a[i][j] -= q * a[t][j];
        if (sgn(a[i][t]) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (sgn(a[t][j]) == 0) continue;
        col_sub(j, t, balanced_quotient(a[t][j], a[t][t]));
        if (sgn(a[t][j]) != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility of the remaining block
      bool fixed = false;
      for (std::size_t i = t + 1; i < m && !fixed; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (!mpz_divisible_p(a[i][j].get_mpz_t(), a[t][t].get_mpz_t())) {
            for (std::size_t k = t; k < n; ++k) a[t][k] += a[i][k];
            fixed = true;
            break;
          }
      if (!fixed) break;
    }
    if (!any) break;
    if (sgn(a[t][t]) < 0) {
      for (auto& row : a) row[t] = -row[t];
      if (want_transform)
        for (auto& x : vinv[t]) x = -x;
    }
    res.diagonal.push_back(a[t][t]);
  }
  return res;
}

// ---------------------------------------------------------------- quotients

namespace {

struct CoreQuotient {
  std::size_t free_rank = 0;
  std::vector<SparseRow> free_vecs;
  std::vector<mpz_class> orders;  // raw invariant factors > 1
  std::vector<SparseRow> torsion_vecs;
};

CoreQuotient quotient_core(int ncols, const std::vector<SparseRow>& rows, bool want_vectors) {
  Echelon e(ncols);
  for (const auto& r : rows) e.insert(r);
  std::vector<SparseRow> ech = e.rows();
  std::map<int, const SparseRow*> unit;
  std::vector<SparseRow> rest;
  for (const auto& r : ech) {
    if (r[0].second == 1)
      unit.emplace(r[0].first, &r);
    else
      rest.push_back(r);
  }
  // substitute the unit-pivot columns away
  for (auto& r : rest) {
    std::map<int, mpz_class> m;
    for (const auto& [c, v] : r) m[c] = v;
    for (auto it = m.begin(); it != m.end();) {
      auto u = unit.find(it->first);
      if (u == unit.end() || sgn(it->second) == 0) {
        ++it;
        continue;
      }
      const mpz_class f = it->second;
      const int col = it->first;
      for (const auto& [c, v] : *u->second) {
        auto& slot = m[c];
        slot -= f * v;
      }
      it = m.upper_bound(col);
    }
    r = make_row(std::move(m));
  }
  CoreQuotient out;
  // columns that are neither unit pivots nor touched by remaining rows are free
  std::map<int, int> touched;
  for (const auto& r : rest)
    for (const auto& [c, v] : r) touched[c]++;
  for (int c = 0; c < ncols; ++c) {
    if (unit.count(c) || touched.count(c)) continue;
    ++out.free_rank;
    if (want_vectors) out.free_vecs.push_back(SparseRow{{c, mpz_class(1)}});
  }
  // isolated single-entry rows
  std::vector<SparseRow> dense_rows;
  for (const auto& r : rest) {
    if (r.size() == 1 && touched[r[0].first] == 1) {
      const mpz_class d = abs(r[0].second);
      if (d != 1) {
        out.orders.push_back(d);
        if (want_vectors) out.torsion_vecs.push_back(SparseRow{{r[0].first, mpz_class(1)}});
      }
      touched.erase(r[0].first);
      continue;
    }
    dense_rows.push_back(r);
  }
  std::vector<int> cols;
  for (const auto& [c, k] : touched)
    if (k > 0) cols.push_back(c);
  std::map<int, std::size_t> cindex;
  for (std::size_t i = 0; i < cols.size(); ++i) cindex[cols[i]] = i;
  if (!cols.empty()) {
    std::vector<std::vector<mpz_class>> a(dense_rows.size(), std::vector<mpz_class>(cols.size(), 0));
    for (std::size_t i = 0; i < dense_rows.size(); ++i)
      for (const auto& [c, v] : dense_rows[i]) a[i][cindex.at(c)] = v;
    SmithResult s = smith_dense(std::move(a), cols.size(), want_vectors);
    auto vec_of = [&](std::size_t j) {
      std::map<int, mpz_class> m;
      for (std::size_t k = 0; k < cols.size(); ++k)
        if (sgn(s.vinv[j][k]) != 0) m[cols[k]] = s.vinv[j][k];
      return make_row(std::move(m));
    };
    for (std::size_t j = 0; j < s.diagonal.size(); ++j) {
      if (s.diagonal[j] == 1) continue;
      out.orders.push_back(s.diagonal[j]);
      if (want_vectors) out.torsion_vecs.push_back(vec_of(j));
    }
    for (std::size_t j = s.diagonal.size(); j < cols.size(); ++j) {
      ++out.free_rank;
      if (want_vectors) out.free_vecs.push_back(vec_of(j));
    }
  }
  return out;
}

Subquotient localize(const CoreQuotient& q, const Coefficients& coeffs, const ColumnNamer& namer,
                     bool want_vectors) {
  Subquotient out;
  out.group.free_rank = q.free_rank;
  if (want_vectors) out.free_reps = q.free_vecs;
  std::vector<std::pair<mpz_class, std::string>> tors;
  for (std::size_t i = 0; i < q.orders.size(); ++i) {
    mpz_class kept = 1;
    for (const auto& [p, e] : factorize(q.orders[i])) {
      if (coeffs.is_unit_prime(p)) continue;
      mpz_class pe;
      mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
      kept *= pe;
    }
    if (kept == 1) continue;
    SparseRow rep;
    if (want_vectors) {
      rep = row_scale(q.torsion_vecs[i], q.orders[i] / kept);
      out.torsion_reps.push_back(rep);
      out.torsion_orders.push_back(kept);
    }
    for (const auto& [p, e] : factorize(kept)) {
      mpz_class pe;
      mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
      tors.emplace_back(pe, (namer && want_vectors) ? namer(row_scale(rep, kept / pe)) : std::string());
    }
  }
  std::stable_sort(tors.begin(), tors.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  if (namer && want_vectors)
    for (const auto& v : q.free_vecs) out.group.labels.push_back(namer(v));
  for (const auto& [t, lbl] : tors) {
    out.group.torsion.push_back(t);
    if (namer && want_vectors) out.group.labels.push_back(lbl);
  }
  return out;
}

}  // namespace

GroupDescriptor quotient_group(int ncols, const std::vector<SparseRow>& rows, const Coefficients& coeffs,
                               const ColumnNamer& namer) {
  const bool vecs = static_cast<bool>(namer);
  return localize(quotient_core(ncols, rows, vecs), coeffs, namer, vecs).group;
}

Subquotient subquotient(int ncols, const std::vector<SparseRow>& l1, const std::vector<SparseRow>& l2,
                        const Coefficients& coeffs, const ColumnNamer& namer) {
  Echelon e(ncols);
  for (const auto& r : l1) e.insert(r);
  for (const auto& r : l2) e.insert(r);
  const std::vector<SparseRow> basis = e.rows();
  std::vector<SparseRow> coords;
  coords.reserve(l2.size());
  std::vector<mpz_class> x;
  for (const auto& r : l2) {
    if (!e.coordinates(r, x)) throw std::logic_error("subquotient: coordinates failed");
    std::map<int, mpz_class> m;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (sgn(x[i]) != 0) m[static_cast<int>(i)] = x[i];
    coords.push_back(make_row(std::move(m)));
  }
  auto to_ambient = [&](const SparseRow& c) {
    SparseRow v;
    for (const auto& [i, f] : c) v = row_add(v, basis[static_cast<std::size_t>(i)], f);
    return v;
  };
  CoreQuotient q = quotient_core(static_cast<int>(basis.size()), coords, true);
  for (auto& v : q.free_vecs) v = to_ambient(v);
  for (auto& v : q.torsion_vecs) v = to_ambient(v);
  return localize(q, coeffs, namer, true);
}

std::vector<SparseRow> project_kernel(int ncols1, int ncols2,
                                      const std::vector<std::pair<SparseRow, SparseRow>>& rows) {
  Echelon e(ncols1 + ncols2);
  for (const auto& [a, b] : rows) {
    SparseRow r = a;
    for (const auto& [c, v] : b) r.emplace_back(c + ncols1, v);
    e.insert(std::move(r));
  }
  std::vector<SparseRow> out;
  for (const auto& r : e.rows())
    if (r[0].first >= ncols1) out.push_back(row_shift(r, -ncols1));
  return out;
}

std::vector<SparseRow> preimage(int ncols, const std::vector<SparseRow>& images, const std::vector<SparseRow>& l2) {
  std::vector<std::pair<SparseRow, SparseRow>> rows;
  for (std::size_t i = 0; i < images.size(); ++i)
    rows.emplace_back(images[i], SparseRow{{static_cast<int>(i), mpz_class(1)}});
  for (const auto& r : l2) rows.emplace_back(r, SparseRow{});
  return project_kernel(ncols, static_cast<int>(images.size()), rows);
}

bool contains_up_to_units(int ncols, const std::vector<SparseRow>& lattice, const SparseRow& v,
                          const Coefficients& coeffs) {
  if (v.empty()) return true;
  Echelon e(ncols);
  for (const auto& r : lattice) e.insert(r);
  if (e.contains(v)) return true;
  std::vector<SparseRow> l1 = lattice;
  l1.push_back(v);
  const Subquotient q = subquotient(ncols, l1, lattice, Coefficients::integers());
  if (q.group.free_rank) return false;
  for (const auto& t : q.group.torsion)
    if (!coeffs.is_unit(t)) return false;
  return true;
}

}  // namespace wb
