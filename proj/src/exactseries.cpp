#include "workbench/exactseries.hpp"

#include <algorithm>
#include <json.hpp>
#include <numeric>
#include <sstream>

namespace wb {

namespace {

constexpr std::int64_t kInf = QZSeries::kInfinitePrec;

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a >= kInf || b >= kInf) return kInf;
  return std::min<std::int64_t>(a + b, kInf);
}

void clean(Laurent& p) {
  for (auto it = p.begin(); it != p.end();) {
    if (sgn(it->second) == 0) {
      it = p.erase(it);
    } else {
      it->second.canonicalize();
      ++it;
    }
  }
}

nlohmann::json int_json(const mpz_class& z) {
  if (z.fits_slong_p()) return nlohmann::json(z.get_si());
  return nlohmann::json(z.get_str());
}

mpz_class int_from_json(const nlohmann::json& j) {
  if (j.is_string()) return mpz_class(j.get<std::string>());
  return mpz_class(j.get<long>());
}

}  // namespace

LatticeExponent LatticeExponent::from_rational(const mpq_class& q, const mpq_class& z) {
  mpq_class q24 = q * 24, z2 = z * 2;
  if (q24.get_den() != 1 || z2.get_den() != 1)
    throw OffLattice("exponent (" + q.get_str() + ", " + z.get_str() + ") is off the lattice");
  return {q24.get_num().get_si(), z2.get_num().get_si()};
}

Laurent laurent_mul(const Laurent& a, const Laurent& b) {
  Laurent out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) out[ea + eb] += ca * cb;
  clean(out);
  return out;
}

void laurent_add_into(Laurent& acc, const Laurent& b, const mpq_class& scale) {
  for (const auto& [e, c] : b) {
    auto& slot = acc[e];
    slot += scale * c;
    if (sgn(slot) == 0) acc.erase(e);
  }
}

Laurent laurent_div_exact(const Laurent& num, const Laurent& den) {
  if (den.empty()) throw NonExactDivision("division by the zero Laurent polynomial");
  if (num.empty()) return {};
  const std::int64_t e0 = den.begin()->first, e1 = den.rbegin()->first;
  const std::int64_t a0 = num.begin()->first, a1 = num.rbegin()->first;
  const std::int64_t k0 = a0 - e0, k1 = a1 - e1;
  if (k1 < k0) throw NonExactDivision("Laurent division leaves a remainder");
  std::vector<mpq_class> rem(static_cast<std::size_t>(a1 - a0 + 1));
  for (const auto& [e, c] : num) rem[static_cast<std::size_t>(e - a0)] = c;
  const mpq_class lead = den.rbegin()->second;
  Laurent q;
  for (std::int64_t k = k1; k >= k0; --k) {
    const mpq_class c = rem[static_cast<std::size_t>(k + e1 - a0)] / lead;
    if (sgn(c) == 0) continue;
    q[k] = c;
    for (const auto& [e, d] : den) rem[static_cast<std::size_t>(k + e - a0)] -= c * d;
  }
  for (const auto& r : rem)
    if (sgn(r) != 0) throw NonExactDivision("Laurent division leaves a remainder");
  return q;
}

std::string laurent_to_string(const Laurent& p) {
  if (p.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    mpq_class c = it->second;
    if (!first) os << (sgn(c) < 0 ? " - " : " + ");
    else if (sgn(c) < 0) os << "-";
    first = false;
    mpq_class a = abs(c);
    const mpq_class e = reduced(it->first, 2);
    if (it->first == 0) {
      os << a.get_str();
      continue;
    }
    if (a != 1) os << a.get_str() << "*";
    os << "z";
    if (e != 1) os << "^" << (e.get_den() == 1 ? e.get_str() : "(" + e.get_str() + ")");
  }
  return os.str();
}

QZSeries QZSeries::constant(const mpq_class& c, std::int64_t qprec24) {
  QZSeries s(qprec24);
  s.add_term(0, 0, c);
  return s;
}

QZSeries QZSeries::term(const mpq_class& c, const mpq_class& qexp, const mpq_class& zexp,
                        std::int64_t qprec24) {
  const auto e = LatticeExponent::from_rational(qexp, zexp);
  QZSeries s(qprec24);
  s.add_term(e.q24, e.z2, c);
  return s;
}

QZSeries QZSeries::from_laurent(const Laurent& level0, std::int64_t qprec24) {
  QZSeries s(qprec24);
  s.set_level(0, level0);
  return s;
}

mpq_class QZSeries::qprec() const {
  if (exact()) throw std::logic_error("exact series has no finite precision");
  return reduced(qprec24_, 24);
}

std::int64_t QZSeries::valuation24() const {
  return levels_.empty() ? kInf : levels_.begin()->first;
}

Laurent QZSeries::level(std::int64_t q24) const {
  auto it = levels_.find(q24);
  return it == levels_.end() ? Laurent{} : it->second;
}

mpq_class QZSeries::coeff(std::int64_t q24, std::int64_t z2) const {
  auto it = levels_.find(q24);
  if (it == levels_.end()) return 0;
  auto jt = it->second.find(z2);
  return jt == it->second.end() ? mpq_class(0) : jt->second;
}

mpq_class QZSeries::coeff(const mpq_class& q, const mpq_class& z) const {
  const auto e = LatticeExponent::from_rational(q, z);
  return coeff(e.q24, e.z2);
}

std::size_t QZSeries::term_count() const {
  std::size_t n = 0;
  for (const auto& [q, lv] : levels_) n += lv.size();
  return n;
}

void QZSeries::add_term(std::int64_t q24, std::int64_t z2, const mpq_class& c) {
  if (q24 >= qprec24_ || sgn(c) == 0) return;
  auto& lv = levels_[q24];
  auto& slot = lv[z2];
  slot += c;
  slot.canonicalize();  // callers may pass unreduced fractions
  if (sgn(slot) == 0) lv.erase(z2);
  if (lv.empty()) levels_.erase(q24);
}

void QZSeries::set_level(std::int64_t q24, Laurent lv) {
  clean(lv);
  if (q24 >= qprec24_ || lv.empty()) {
    levels_.erase(q24);
    return;
  }
  levels_[q24] = std::move(lv);
}

QZSeries QZSeries::truncated(std::int64_t qprec24) const {
  QZSeries out(std::min(qprec24, qprec24_));
  for (const auto& [q, lv] : levels_)
    if (q < out.qprec24_) out.levels_[q] = lv;
  return out;
}

bool QZSeries::agrees_with(const QZSeries& o) const {
  const std::int64_t p = std::min(qprec24_, o.qprec24_);
  return truncated(p).levels_ == o.truncated(p).levels_;
}

std::string QZSeries::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [q, lv] : levels_) {
    const mpq_class qe = reduced(q, 24);
    for (const auto& [z, c] : lv) {
      const mpq_class ze = reduced(z, 2);
      terms.push_back({int_json(qe.get_num()), int_json(qe.get_den()), int_json(ze.get_num()),
                       int_json(ze.get_den()), int_json(c.get_num()), int_json(c.get_den())});
    }
  }
  nlohmann::json j;
  if (exact()) {
    j["qprec"] = nullptr;
  } else {
    const mpq_class p = reduced(qprec24_, 24);
    j["qprec"] = {int_json(p.get_num()), int_json(p.get_den())};
  }
  j["terms"] = terms;
  return j.dump();
}

QZSeries QZSeries::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::int64_t prec = kInf;
  if (!j.at("qprec").is_null()) {
    mpq_class p(int_from_json(j["qprec"][0]), int_from_json(j["qprec"][1]));
    p.canonicalize();
    prec = LatticeExponent::from_rational(p, 0).q24;
  }
  QZSeries s(prec);
  for (const auto& rec : j.at("terms")) {
    mpq_class q(int_from_json(rec[0]), int_from_json(rec[1]));
    mpq_class z(int_from_json(rec[2]), int_from_json(rec[3]));
    mpq_class c(int_from_json(rec[4]), int_from_json(rec[5]));
    q.canonicalize();
    z.canonicalize();
    c.canonicalize();
    const auto e = LatticeExponent::from_rational(q, z);
    s.add_term(e.q24, e.z2, c);
  }
  return s;
}

std::string QZSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [q, lv] : levels_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << laurent_to_string(lv) << ")";
    if (q != 0) os << "*q^" << reduced(q, 24).get_str();
  }
  if (first) os << "0";
  if (!exact()) os << " + O(q^" << reduced(qprec24_, 24).get_str() << ")";
  return os.str();
}

QZSeries add(const QZSeries& a, const QZSeries& b) {
  QZSeries out = a.truncated(std::min(a.qprec24(), b.qprec24()));
  for (const auto& [q, lv] : b.levels())
    for (const auto& [z, c] : lv) out.add_term(q, z, c);
  return out;
}

QZSeries neg(const QZSeries& a) { return scale(a, -1); }

QZSeries sub(const QZSeries& a, const QZSeries& b) { return add(a, neg(b)); }

QZSeries scale(const QZSeries& a, const mpq_class& c) {
  QZSeries out(a.qprec24());
  if (sgn(c) == 0) return out;
  for (const auto& [q, lv] : a.levels()) {
    Laurent l;
    for (const auto& [z, x] : lv) l[z] = x * c;
    out.set_level(q, std::move(l));
  }
  return out;
}

QZSeries mul(const QZSeries& a, const QZSeries& b) {
  const std::int64_t prec =
      std::min(sat_add(a.qprec24(), b.valuation24()), sat_add(b.qprec24(), a.valuation24()));
  QZSeries out(prec);
  std::map<std::int64_t, Laurent> acc;
  for (const auto& [qa, la] : a.levels()) {
    for (const auto& [qb, lb] : b.levels()) {
      if (qa + qb >= prec) break;
      auto& slot = acc[qa + qb];
      for (const auto& [za, ca] : la)
        for (const auto& [zb, cb] : lb) slot[za + zb] += ca * cb;
    }
  }
  for (auto& [q, lv] : acc) out.set_level(q, std::move(lv));
  return out;
}

QZSeries pow(const QZSeries& a, unsigned k) {
  QZSeries result = QZSeries::constant(1);
  QZSeries base = a;
  while (k) {
    if (k & 1u) result = mul(result, base);
    k >>= 1u;
    if (k) base = mul(base, base);
  }
  return result;
}

QZSeries div_exact(const QZSeries& num, const QZSeries& den) {
  if (den.is_zero()) throw NonExactDivision("division by the zero series");
  const std::int64_t vd = den.valuation24();
  const Laurent d0 = den.level(vd);
  const std::int64_t vn = num.valuation24();
  std::int64_t prec = num.qprec24() >= kInf ? kInf : num.qprec24() - vd;
  if (!num.is_zero() && den.qprec24() < kInf)
    prec = std::min(prec, den.qprec24() + (vn - vd) - vd);
  if (num.is_zero()) return QZSeries(prec);
  const bool single_level = den.levels().size() == 1;
  if (prec >= kInf && !single_level)
    throw std::invalid_argument("div_exact: quotient of exact series needs a finite precision");

  QZSeries q(prec);
  std::map<std::int64_t, Laurent> rem(num.levels().begin(), num.levels().end());
  const std::int64_t limit = sat_add(prec, vd);
  while (!rem.empty()) {
    auto it = rem.begin();
    const std::int64_t L = it->first;
    if (L >= limit) break;
    const Laurent ql = laurent_div_exact(it->second, d0);
    const std::int64_t k = L - vd;
    q.set_level(k, ql);
    for (const auto& [qd, ld] : den.levels()) {
      if (k + qd >= limit) break;
      auto& slot = rem[k + qd];
      laurent_add_into(slot, laurent_mul(ql, ld), -1);
      if (slot.empty()) rem.erase(k + qd);
    }
  }
  return q;
}

QZSeries scale_z(const QZSeries& s, std::int64_t k) {
  if (k == 0) throw std::invalid_argument("scale_z needs a nonzero factor");
  QZSeries out(s.qprec24());
  for (const auto& [q, lv] : s.levels()) {
    Laurent l;
    for (const auto& [z, c] : lv) l[z * k] = c;
    out.set_level(q, std::move(l));
  }
  return out;
}

std::vector<QZSeries> z_taylor(const QZSeries& s, unsigned K) {
  std::vector<QZSeries> out(K + 1, QZSeries(s.qprec24()));
  for (const auto& [q, lv] : s.levels()) {
    std::vector<mpq_class> acc(K + 1);
    for (const auto& [z, c] : lv) {
      const mpq_class r = reduced(z, 2);
      mpq_class t = c;  // c * r^k / k!
      for (unsigned k = 0; k <= K; ++k) {
        acc[k] += t;
        t = t * r / (k + 1);
      }
    }
    for (unsigned k = 0; k <= K; ++k) out[k].add_term(q, 0, acc[k]);
  }
  return out;
}

QZSeries triangular_cubic_solve(const QZSeries& c2, const QZSeries& c1, const QZSeries& c0,
                                const Laurent& seed) {
  for (const auto* c : {&c2, &c1, &c0})
    if (c->valuation24() < 0)
      throw std::invalid_argument("triangular_cubic_solve: coefficients must have q-valuation >= 0");
  const std::int64_t prec = std::min({c2.qprec24(), c1.qprec24(), c0.qprec24()});
  QZSeries b = QZSeries::from_laurent(seed, prec);
  auto F = [&](const QZSeries& x) {
    const QZSeries x2 = mul(x, x);
    return add(add(mul(x2, x), mul(c2, x2)), add(mul(c1, x), c0)).truncated(prec);
  };
  const Laurent b0 = seed;
  Laurent deriv = laurent_mul(laurent_mul(b0, b0), Laurent{{0, 3}});
  laurent_add_into(deriv, laurent_mul(laurent_mul(c2.level(0), b0), Laurent{{0, 2}}));
  laurent_add_into(deriv, c1.level(0));

  QZSeries f = F(b);
  if (!f.level(0).empty())
    throw SeedNotRoot("seed " + laurent_to_string(seed) + " is not a root of the q^0 cubic");
  int guard = 0;
  while (!f.is_zero()) {
    if (deriv.empty())
      throw NonExactDivision("triangular_cubic_solve: q^0 derivative vanishes");
    if (++guard > 100000)
      throw std::runtime_error("triangular_cubic_solve: no finite precision bound");
    const std::int64_t L = f.valuation24();
    const Laurent corr = laurent_div_exact(f.level(L), deriv);
    QZSeries step(prec);
    Laurent negcorr;
    for (const auto& [z, c] : corr) negcorr[z] = -c;
    step.set_level(L, negcorr);
    b = add(b, step);
    f = F(b);
    if (!f.is_zero() && f.valuation24() <= L)
      throw NonExactDivision("triangular_cubic_solve: level did not clear");
  }
  return b;
}

}  // namespace wb
