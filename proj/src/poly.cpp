#include "workbench/poly.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace wb {

Poly Poly::constant(std::size_t nvars, const mpq_class& c) {
  Poly p(nvars);
  p.add_term(Exponents(nvars, 0), c);
  return p;
}

Poly Poly::variable(std::size_t nvars, std::size_t i, int power) {
  Poly p(nvars);
  Exponents e(nvars, 0);
  e.at(i) = power;
  p.add_term(e, 1);
  return p;
}

Poly Poly::monomial(const Exponents& e, const mpq_class& c) {
  Poly p(e.size());
  p.add_term(e, c);
  return p;
}

mpq_class Poly::coeff(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

void Poly::add_term(const Exponents& e, const mpq_class& c) {
  if (sgn(c) == 0) return;
  if (nvars_ == 0 && !e.empty()) nvars_ = e.size();
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  if (nvars_ == 0) nvars_ = o.nvars_;
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (nvars_ == 0) nvars_ = o.nvars_;
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  r += o;
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  r -= o;
  return r;
}

Poly Poly::operator-() const { return *this * mpq_class(-1); }

Poly Poly::operator*(const Poly& o) const {
  Poly r(std::max(nvars_, o.nvars_));
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      Exponents e(ea.size());
      for (std::size_t i = 0; i < ea.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  return r;
}

Poly Poly::operator*(const mpq_class& c) const {
  Poly r(nvars_);
  if (sgn(c) == 0) return r;
  for (const auto& [e, x] : terms_) r.terms_.emplace(e, x * c);
  return r;
}

Poly Poly::pow(unsigned k) const {
  Poly r = constant(nvars_, 1);
  Poly b = *this;
  while (k) {
    if (k & 1u) r = r * b;
    k >>= 1u;
    if (k) b = b * b;
  }
  return r;
}

Poly Poly::substitute(const std::vector<Poly>& images) const {
  if (images.size() != nvars_) throw std::invalid_argument("substitute: arity mismatch");
  const std::size_t out_vars = images.empty() ? 0 : images[0].nvars();
  Poly r(out_vars);
  std::map<std::pair<std::size_t, int>, Poly> powers;
  auto pw = [&](std::size_t i, int k) -> const Poly& {
    auto key = std::make_pair(i, k);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    if (k < 0) throw std::invalid_argument("substitute: negative exponent");
    return powers.emplace(key, images[i].pow(static_cast<unsigned>(k))).first->second;
  };
  for (const auto& [e, c] : terms_) {
    Poly t = constant(out_vars, c);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i]) t = t * pw(i, e[i]);
    r += t;
  }
  return r;
}

Poly Poly::extend(std::size_t new_nvars, std::size_t offset) const {
  Poly r(new_nvars);
  for (const auto& [e, c] : terms_) {
    Exponents f(new_nvars, 0);
    for (std::size_t i = 0; i < e.size(); ++i) f.at(i + offset) = e[i];
    r.add_term(f, c);
  }
  return r;
}

Poly Poly::map_terms(const std::function<mpq_class(const Exponents&, const mpq_class&)>& f) const {
  Poly r(nvars_);
  for (const auto& [e, c] : terms_) r.add_term(e, f(e, c));
  return r;
}

mpz_class Poly::denominator_lcm() const {
  mpz_class l = 1;
  for (const auto& [e, c] : terms_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  return l;
}

std::string monomial_name(const Exponents& e, const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += names.at(i);
    if (e[i] != 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

std::string Poly::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    const bool unit_mono = monomial_name(e, names) == "1";
    if (first) {
      if (sgn(c) < 0) os << "-";
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
    const mpq_class a = abs(c);
    if (unit_mono) {
      os << a.get_str();
    } else {
      if (a != 1) os << a.get_str() << "*";
      os << monomial_name(e, names);
    }
  }
  return os.str();
}

MultiDegree monomial_degree(const Exponents& e, const std::vector<MultiDegree>& gd, std::size_t arity) {
  MultiDegree d(arity, 0);
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i])
      for (std::size_t k = 0; k < arity; ++k) d[k] += e[i] * gd[i][k];
  return d;
}

bool homogeneous_degree(const Poly& p, const std::vector<MultiDegree>& gd, std::size_t arity, MultiDegree& out) {
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    MultiDegree d = monomial_degree(e, gd, arity);
    if (first) {
      out = d;
      first = false;
    } else if (d != out) {
      return false;
    }
  }
  if (first) out.assign(arity, 0);
  return true;
}

std::string degree_str(const MultiDegree& d) {
  std::string s = "(";
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s + ")";
}

namespace {

class Parser {
 public:
  Parser(const std::string& t, const std::vector<std::string>& names) : t_(t), names_(names) {
    for (std::size_t i = 0; i < names.size(); ++i) index_[names[i]] = i;
  }

  Poly parse() {
    Poly p = expr();
    skip();
    if (pos_ != t_.size()) fail("unexpected '" + std::string(1, t_[pos_]) + "'");
    return p;
  }

 private:
  const std::string& t_;
  const std::vector<std::string>& names_;
  std::map<std::string, std::size_t> index_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("parse error at column " + std::to_string(pos_ + 1) + " in '" + t_ + "': " + msg);
  }
  void skip() {
    while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < t_.size() && t_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Poly expr() {
    skip();
    Poly acc(names_.size());
    bool negate = false;
    if (eat('-')) negate = true;
    else eat('+');
    Poly t = term();
    acc += negate ? -t : t;
    while (true) {
      if (eat('+')) acc += term();
      else if (eat('-')) acc -= term();
      else break;
    }
    return acc;
  }
  Poly term() {
    Poly acc = factor();
    while (true) {
      skip();
      if (eat('*')) {
        acc = acc * factor();
      } else if (eat('/')) {
        Poly d = factor();
        if (d.size() != 1 || d.terms().begin()->first != Exponents(names_.size(), 0))
          fail("division only by constants");
        acc = acc * (mpq_class(1) / d.terms().begin()->second);
      } else if (pos_ < t_.size() && (std::isalnum(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '(')) {
        acc = acc * factor();  // implicit product
      } else {
        break;
      }
    }
    return acc;
  }
  Poly factor() {
    Poly base = atom();
    if (eat('^')) {
      skip();
      std::size_t st = pos_;
      while (pos_ < t_.size() && std::isdigit(static_cast<unsigned char>(t_[pos_]))) ++pos_;
      if (st == pos_) fail("expected exponent");
      base = base.pow(static_cast<unsigned>(std::stoul(t_.substr(st, pos_ - st))));
    }
    return base;
  }
  Poly atom() {
    skip();
    if (pos_ >= t_.size()) fail("unexpected end");
    if (eat('(')) {
      Poly p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (eat('-')) return -factor();
    if (std::isdigit(static_cast<unsigned char>(t_[pos_]))) {
      std::size_t st = pos_;
      while (pos_ < t_.size() && std::isdigit(static_cast<unsigned char>(t_[pos_]))) ++pos_;
      return Poly::constant(names_.size(), mpq_class(mpz_class(t_.substr(st, pos_ - st))));
    }
    std::size_t st = pos_;
    while (pos_ < t_.size() &&
           (std::isalnum(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '_' || t_[pos_] == '\''))
      ++pos_;
    if (st == pos_) fail("unexpected '" + std::string(1, t_[pos_]) + "'");
    const std::string name = t_.substr(st, pos_ - st);
    auto it = index_.find(name);
    if (it == index_.end()) fail("unknown symbol '" + name + "'");
    return Poly::variable(names_.size(), it->second);
  }
};

}  // namespace

Poly parse_poly(const std::string& text, const std::vector<std::string>& names) {
  return Parser(text, names).parse();
}

}  // namespace wb
