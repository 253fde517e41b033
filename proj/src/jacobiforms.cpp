#include "workbench/jacobiforms.hpp"

#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>

#include "workbench/lattice.hpp"

namespace wb {

namespace {

mpz_class sigma(long n, unsigned k) {
  mpz_class s = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) {
      mpz_class t;
      mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(d), k);
      s += t;
    }
  return s;
}

// prod_{n>=1} (1 - q^n)^e truncated below q^(qprec24/24).
QZSeries euler_product_power(std::int64_t qprec24, unsigned e) {
  std::vector<mpz_class> c(static_cast<std::size_t>(std::max<std::int64_t>(qprec24 / 24 + 1, 1)), 0);
  const std::size_t N = c.size();
  c[0] = 1;
  for (std::size_t n = 1; n < N; ++n)
    for (unsigned rep = 0; rep < e; ++rep)
      for (std::size_t j = N - 1; j >= n; --j) {
        c[j] -= c[j - n];
        if (j == n) break;
      }
  QZSeries out(qprec24);
  for (std::size_t j = 0; j < N; ++j) out.add_term(static_cast<std::int64_t>(24 * j), 0, c[j]);
  return out;
}

QZSeries shift_q(const QZSeries& s, std::int64_t q24) {
  QZSeries out(s.exact() ? s.qprec24() : s.qprec24() + q24);
  for (const auto& [q, lv] : s.levels()) out.set_level(q + q24, lv);
  return out;
}

std::string term_string(std::int64_t q24, std::int64_t z2, const mpq_class& c) {
  std::ostringstream os;
  os << c.get_str() << "*q^" << reduced(q24, 24).get_str() << "*z^" << reduced(z2, 2).get_str();
  return os.str();
}

struct FormCache {
  std::mutex mu;
  std::map<std::pair<std::string, std::int64_t>, NamedForm> forms;
};

FormCache& cache() {
  static FormCache c;
  return c;
}

template <class F>
NamedForm cached(const std::string& name, std::int64_t prec, F make) {
  {
    std::lock_guard<std::mutex> lk(cache().mu);
    auto it = cache().forms.find({name, prec});
    if (it != cache().forms.end()) return it->second;
  }
  NamedForm f = make();
  std::lock_guard<std::mutex> lk(cache().mu);
  cache().forms.emplace(std::make_pair(name, prec), f);
  return f;
}

}  // namespace

NamedForm product(const NamedForm& f, const NamedForm& g) {
  return {f.name + "*" + g.name, f.meta + g.meta, mul(f.series, g.series)};
}

NamedForm power(const NamedForm& f, unsigned k) {
  return {f.name + "^" + std::to_string(k),
          {f.meta.dimension * static_cast<int>(k), f.meta.doubled_index * static_cast<int>(k)},
          pow(f.series, k)};
}

QZSeries eta(std::int64_t qprec24) {
  if (qprec24 <= 1) return QZSeries(qprec24);
  return shift_q(euler_product_power(qprec24 - 1, 1), 1);
}

QZSeries delta_series(std::int64_t qprec24) {
  if (qprec24 <= 24) return QZSeries(qprec24);
  return shift_q(euler_product_power(qprec24 - 24, 24), 24);
}

QZSeries theta1_norm(std::int64_t qprec24) {
  // n = k + 1/2, coefficient i^(2n+1) = (-1)^(k+1), q-exponent n^2/2, zeta-exponent n.
  QZSeries out(qprec24);
  for (std::int64_t k = 0;; ++k) {
    bool any = false;
    for (std::int64_t kk : {k, -k - 1}) {
      const std::int64_t odd = 2 * kk + 1;
      const std::int64_t q24 = 3 * odd * odd;
      if (q24 >= qprec24) continue;
      any = true;
      out.add_term(q24, odd, (kk % 2 == 0) ? -1 : 1);
    }
    if (!any) break;
  }
  return out;
}

QZSeries c4_series(std::int64_t qprec24) {
  QZSeries out = QZSeries::constant(1, qprec24);
  for (long n = 1; 24 * n < qprec24; ++n) out.add_term(24 * n, 0, 240 * sigma(n, 3));
  return out;
}

QZSeries c6_series(std::int64_t qprec24) {
  QZSeries out = QZSeries::constant(1, qprec24);
  for (long n = 1; 24 * n < qprec24; ++n) out.add_term(24 * n, 0, -504 * sigma(n, 5));
  return out;
}

NamedForm form_c4(std::int64_t p) { return {"c4", {8, 0}, c4_series(p)}; }
NamedForm form_c6(std::int64_t p) { return {"c6", {12, 0}, c6_series(p)}; }
NamedForm form_delta(std::int64_t p) { return {"Delta", {24, 0}, delta_series(p)}; }

NamedForm jacobi_a(std::int64_t p) {
  return cached("a", p, [&] {
    const QZSeries eta3 = pow(eta(p + 1), 3);
    return NamedForm{"a", {0, 1}, div_exact(theta1_norm(p + 3), eta3).truncated(p)};
  });
}

NamedForm jacobi_c(std::int64_t p) {
  return cached("c", p, [&] {
    const QZSeries th = theta1_norm(p + 3);
    return NamedForm{"c", {6, 3}, div_exact(scale_z(th, 2), th).truncated(p)};
  });
}

NamedForm jacobi_b(std::int64_t p) {
  return cached("b", p, [&] {
    const QZSeries a = jacobi_a(p).series;
    const QZSeries c = jacobi_c(p).series;
    const QZSeries a2 = mul(a, a), a4 = mul(a2, a2), a6 = mul(a4, a2);
    const QZSeries c2 = QZSeries(p);
    const QZSeries c1 = scale(mul(c4_series(p), a4), -3);
    const QZSeries c0 = sub(scale(mul(c6_series(p), a6), 2), scale(mul(c, c), 432));
    const Laurent seed{{-2, 1}, {0, 10}, {2, 1}};
    return NamedForm{"b", {4, 2}, triangular_cubic_solve(c2, c1, c0, seed)};
  });
}

QZSeries expand_named(const std::string& name, std::int64_t p) {
  if (name == "eta") return eta(p);
  if (name == "delta") return delta_series(p);
  if (name == "c4") return c4_series(p);
  if (name == "c6") return c6_series(p);
  if (name == "a") return jacobi_a(p).series;
  if (name == "b") return jacobi_b(p).series;
  if (name == "c") return jacobi_c(p).series;
  throw std::invalid_argument("unknown form '" + name + "'");
}

ResidualReport cubic_relation_residual(const QZSeries& a, const QZSeries& b, const QZSeries& c,
                                       const QZSeries& c4, const QZSeries& c6) {
  const QZSeries a2 = mul(a, a), a4 = mul(a2, a2), a6 = mul(a4, a2);
  QZSeries r = scale(mul(c, c), 432);
  r = sub(r, pow(b, 3));
  r = add(r, scale(mul(mul(c4, a4), b), 3));
  r = sub(r, scale(mul(c6, a6), 2));
  ResidualReport rep;
  rep.residual = r;
  rep.zero = r.is_zero();
  if (!rep.zero) {
    const auto& [q, lv] = *r.levels().begin();
    rep.leading = term_string(q, lv.begin()->first, lv.begin()->second);
  }
  return rep;
}

ResidualReport verify_cubic_relation(std::int64_t p) {
  return cubic_relation_residual(jacobi_a(p).series, jacobi_b(p).series, jacobi_c(p).series,
                                 c4_series(p), c6_series(p));
}

SymmetryReport elliptic_symmetry_check(const NamedForm& f, int lambda) {
  if (lambda != 1 && lambda != -1) throw std::invalid_argument("lambda must be +1 or -1");
  const std::int64_t dm = f.meta.doubled_index;
  const std::int64_t prec = f.series.qprec24();
  const int eps = (dm % 2 == 0) ? 1 : -1;
  SymmetryReport rep;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  auto check = [&](std::int64_t n24, std::int64_t z2) {
    const std::int64_t n24t = n24 + 12 * lambda * z2 + 12 * dm;
    const std::int64_t z2t = z2 + 2 * lambda * dm;
    if (n24 >= prec || n24t >= prec) return;
    if (!seen.insert({n24, z2}).second) return;
    ++rep.checked;
    const mpq_class lhs = f.series.coeff(n24, z2);
    const mpq_class rhs = eps * f.series.coeff(n24t, z2t);
    if (lhs != rhs)
      rep.violations.push_back("c(" + reduced(n24, 24).get_str() + "," + reduced(z2, 2).get_str() +
                               ")=" + lhs.get_str() + " vs " + rhs.get_str());
  };
  for (const auto& [q, lv] : f.series.levels())
    for (const auto& [z, c] : lv) {
      check(q, z);
      // the pair whose image is (q, z)
      const std::int64_t z2s = z - 2 * lambda * dm;
      const std::int64_t n24s = q - 12 * lambda * z2s - 12 * dm;
      check(n24s, z2s);
    }
  if (rep.checked == 0) throw EmptyWindow("no coefficient pair lies inside the window");
  return rep;
}

bool weak_check(const NamedForm& f) { return f.series.is_zero() || f.series.valuation24() >= 0; }

bool zeta_support_ok(const NamedForm& f) {
  const std::int64_t dm = f.meta.doubled_index;
  for (const auto& [q, lv] : f.series.levels())
    for (const auto& [z, c] : lv)
      if (((z - dm) % 2 + 2) % 2 != 0) return false;
  return true;
}

namespace {

struct Exps {
  int i, j, k, p, e, r;
};

std::vector<Exps> basis_exponents(int n, int dm) {
  std::vector<Exps> out;
  if (n < 0 || dm < 0) return out;
  for (int k = 0; k <= 1; ++k)
    for (int e = 0; e <= 1; ++e)
      for (int r = 0; 24 * r <= n; ++r)
        for (int p = 0; 8 * p <= n; ++p)
          for (int j = 0; 4 * j <= n; ++j) {
            if (4 * j + 6 * k + 8 * p + 12 * e + 24 * r != n) continue;
            const int i = dm - 2 * j - 3 * k;
            if (i < 0) continue;
            out.push_back({i, j, k, p, e, r});
          }
  return out;
}

}  // namespace

std::size_t jf_basis_count(int n, int dm) { return basis_exponents(n, dm).size(); }

BasisResult jf_basis_series(int n, int dm, std::int64_t p) {
  BasisResult res;
  const auto exps = basis_exponents(n, dm);
  if (exps.empty()) return res;
  const NamedForm a = jacobi_a(p), b = jacobi_b(p), c = jacobi_c(p);
  const NamedForm c4 = form_c4(p), c6 = form_c6(p), d = form_delta(p);
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> column;
  std::vector<std::vector<std::pair<std::size_t, mpq_class>>> rows;
  for (const auto& x : exps) {
    NamedForm f{"1", {0, 0}, QZSeries::constant(1, p)};
    auto times = [&](const NamedForm& g, int k) {
      for (int t = 0; t < k; ++t) f = product(f, g);
    };
    times(a, x.i);
    times(b, x.j);
    times(c, x.k);
    times(c4, x.p);
    times(c6, x.e);
    times(d, x.r);
    std::ostringstream nm;
    bool first = true;
    auto part = [&](const char* s, int k) {
      if (k == 0) return;
      if (!first) nm << "*";
      first = false;
      nm << s;
      if (k > 1) nm << "^" << k;
    };
    part("a", x.i);
    part("b", x.j);
    part("c", x.k);
    part("c4", x.p);
    part("c6", x.e);
    part("Delta", x.r);
    f.name = first ? "1" : nm.str();
    std::vector<std::pair<std::size_t, mpq_class>> row;
    for (const auto& [q, lv] : f.series.levels())
      for (const auto& [z, cf] : lv) {
        auto key = std::make_pair(q, z);
        auto it = column.find(key);
        if (it == column.end()) it = column.emplace(key, column.size()).first;
        row.emplace_back(it->second, cf);
      }
    rows.push_back(std::move(row));
    res.forms.push_back(std::move(f));
  }
  res.rank = rational_rank(rows, column.size());
  return res;
}

}  // namespace wb
