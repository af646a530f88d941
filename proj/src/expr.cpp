#include "hjc/expr.hpp"

#include <map>
#include <sstream>

#include "atom_registry.hpp"
#include "hjc/error.hpp"

namespace hjc {

struct ExprData {
  Poly num;
  Poly den;
  bool transcendental = false;
};

struct ExprAccess {
  static Expr wrap(Poly num, Poly den, bool transcendental) {
    return Expr(std::make_shared<const ExprData>(
        ExprData{std::move(num), std::move(den), transcendental}));
  }
};

namespace {

const std::shared_ptr<const ExprData>& zero_data() {
  static const auto z = std::make_shared<const ExprData>(ExprData{{}, poly::constant(1), false});
  return z;
}

bool poly_has_function(const Poly& p) {
  for (const auto& [m, _] : p) {
    for (const auto& [a, e] : m) {
      if (a->kind != AtomKind::Symbol) return true;
    }
  }
  return false;
}

bool has_high_radical(const Poly& p) {
  for (const auto& [m, _] : p) {
    for (const auto& [a, e] : m) {
      if (a->kind == AtomKind::Sqrt && e >= 2) return true;
    }
  }
  return false;
}

Expr make(Poly num, Poly den, bool coprime = false);

// Rewrites sqrt(u)^k as u^(k/2) * sqrt(u)^(k%2).
Expr reduce_radicals(const Poly& p) {
  Expr out;
  for (const auto& [m, c] : p) {
    Monomial kept;
    Expr factor(c);
    for (const auto& [a, e] : m) {
      if (a->kind == AtomKind::Sqrt && e >= 2) {
        factor = factor * a->arg.pow(e / 2);
        if (e % 2 != 0) kept.emplace_back(a, 1);
      } else {
        kept.emplace_back(a, e);
      }
    }
    Poly term;
    term.emplace(std::move(kept), Rational(1));
    out = out + make(std::move(term), poly::constant(1)) * factor;
  }
  return out;
}

Expr make(Poly num, Poly den, bool coprime) {
  if (den.empty()) throw EvalError("division by zero");
  if (num.empty()) return Expr();
  if (has_high_radical(num) || has_high_radical(den)) {
    return reduce_radicals(num) / reduce_radicals(den);
  }
  if (poly::is_constant(den)) {
    const Rational c = den.begin()->second;
    if (c != 1) num = poly::scale(num, Rational(1) / c);
    den = poly::constant(1);
  } else {
    Poly g = coprime ? poly::constant(1) : poly::gcd(num, den);
    if (!poly::is_one(g)) {
      num = *poly::divide_exact(num, g);
      den = *poly::divide_exact(den, g);
    }
    const Rational lc = poly::leading_coefficient(den);
    if (lc != 1) {
      num = poly::scale(num, Rational(1) / lc);
      den = poly::scale(den, Rational(1) / lc);
    }
    // A single-term denominator carrying sqrt(u) is rationalized to u.
    if (den.size() == 1) {
      for (const auto& [a, e] : den.begin()->first) {
        if (a->kind == AtomKind::Sqrt) {
          const Poly s = poly::from_atom(a, 1);
          return make(poly::mul(num, s), poly::mul(den, s));
        }
      }
    }
  }
  const bool tr = poly_has_function(num) || poly_has_function(den);
  return ExprAccess::wrap(std::move(num), std::move(den), tr);
}

void print_rational(std::ostream& os, const Rational& c) {
  os << c.get_num().get_str();
  if (c.get_den() != 1) os << "/" << c.get_den().get_str();
}

void print_monomial(std::ostream& os, const Monomial& m) {
  bool first = true;
  for (const auto& [a, e] : m) {
    if (!first) os << "*";
    first = false;
    os << a->key;
    if (e != 1) os << "^" << e;
  }
}

void print_poly(std::ostream& os, const Poly& p) {
  if (p.empty()) {
    os << "0";
    return;
  }
  bool first = true;
  for (const auto& [m, c] : p) {
    const bool negative = sgn(c) < 0;
    if (first) {
      if (negative) os << "-";
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    const Rational mag = negative ? Rational(-c) : c;
    if (m.empty()) {
      print_rational(os, mag);
    } else {
      if (mag != 1) {
        print_rational(os, mag);
        os << "*";
      }
      print_monomial(os, m);
    }
  }
}

void collect_symbols(const Poly& p, std::set<Symbol>& out) {
  for (const auto& [m, _] : p) {
    for (const auto& [a, e] : m) {
      if (a->kind == AtomKind::Symbol) {
        out.insert(symbol_of(a));
      } else {
        for (Symbol s : a->arg.free_symbols()) out.insert(s);
      }
    }
  }
}

template <typename AtomMap>
Expr rebuild_poly(const Poly& p, AtomMap&& value_of) {
  std::map<Atom, Expr> cache;
  Expr out;
  for (const auto& [m, c] : p) {
    Expr term(c);
    for (const auto& [a, e] : m) {
      auto it = cache.find(a);
      if (it == cache.end()) it = cache.emplace(a, value_of(a)).first;
      term = term * it->second.pow(e);
    }
    out = out + term;
  }
  return out;
}

template <typename AtomMap>
Expr rebuild(const Expr& e, AtomMap&& value_of) {
  Expr num = rebuild_poly(e.numerator(), value_of);
  if (e.is_polynomial()) return num;
  return num / rebuild_poly(e.denominator(), value_of);
}

Expr apply_kind(AtomKind kind, const std::string& name, int order, const Expr& arg) {
  switch (kind) {
    case AtomKind::Sin: return sin(arg);
    case AtomKind::Cos: return cos(arg);
    case AtomKind::Exp: return exp(arg);
    case AtomKind::Sqrt: return sqrt(arg);
    case AtomKind::Log: return log(arg);
    case AtomKind::Abstract: return apply_abstract(name, order, arg);
    case AtomKind::Symbol: break;
  }
  throw Error("apply_kind: symbol atom");
}

// d f(u) / du for a function atom, expressed at u = arg.
Expr outer_derivative(Atom a) {
  const Expr& u = a->arg;
  switch (a->kind) {
    case AtomKind::Sin: return cos(u);
    case AtomKind::Cos: return -sin(u);
    case AtomKind::Exp: return exp(u);
    case AtomKind::Sqrt: return Expr(1) / (Expr(2) * sqrt(u));
    case AtomKind::Log: return Expr(1) / u;
    case AtomKind::Abstract: return apply_abstract(a->name, a->order + 1, u);
    case AtomKind::Symbol: break;
  }
  throw Error("outer_derivative: symbol atom");
}

Expr diff_poly(const Poly& p, Symbol s) {
  std::map<Atom, Expr> datom;
  auto d_of = [&](Atom a) -> const Expr& {
    auto it = datom.find(a);
    if (it != datom.end()) return it->second;
    Expr d;
    if (a->kind == AtomKind::Symbol) {
      d = a == s.atom() ? Expr(1) : Expr(0);
    } else if (a->arg.depends_on(s)) {
      d = outer_derivative(a) * differentiate(a->arg, s);
    }
    return datom.emplace(a, d).first->second;
  };

  Expr out;
  for (const auto& [m, c] : p) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Expr& da = d_of(m[i].first);
      if (da.is_zero()) continue;
      Poly rest;
      Monomial rm = m;
      if (rm[i].second == 1) {
        rm.erase(rm.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        rm[i].second -= 1;
      }
      rest.emplace(std::move(rm), c * m[i].second);
      out = out + Expr::from_polys(std::move(rest), poly::constant(1)) * da;
    }
  }
  return out;
}

}  // namespace

Expr::Expr() : d_(zero_data()) {}

Expr::Expr(long value) : Expr(Rational(value)) {}

Expr::Expr(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  d_ = sgn(v) == 0 ? zero_data()
                   : std::make_shared<const ExprData>(ExprData{poly::constant(v), poly::constant(1), false});
}

Expr::Expr(Symbol s) {
  if (!s.valid()) throw SymbolError("invalid symbol");
  d_ = std::make_shared<const ExprData>(ExprData{poly::from_atom(s.atom()), poly::constant(1), false});
}

Expr Expr::from_polys(Poly num, Poly den) { return make(std::move(num), std::move(den)); }

Expr Expr::from_atom(Atom a, int power) {
  return Expr::from_polys(poly::from_atom(a, power), poly::constant(1));
}

const Poly& Expr::numerator() const { return d_->num; }
const Poly& Expr::denominator() const { return d_->den; }
bool Expr::is_zero() const { return d_->num.empty(); }
bool Expr::is_constant() const { return poly::is_constant(d_->num) && poly::is_one(d_->den); }

std::optional<Rational> Expr::constant_value() const {
  if (!is_constant()) return std::nullopt;
  return d_->num.empty() ? Rational(0) : d_->num.begin()->second;
}

bool Expr::is_polynomial() const { return poly::is_one(d_->den); }
bool Expr::has_transcendental() const { return d_->transcendental; }

std::set<Symbol> Expr::free_symbols() const {
  std::set<Symbol> out;
  collect_symbols(d_->num, out);
  collect_symbols(d_->den, out);
  return out;
}

bool Expr::depends_on(Symbol s) const { return free_symbols().count(s) != 0; }

std::vector<Atom> Expr::atoms() const {
  std::set<Atom> a = poly::atoms(d_->num);
  for (Atom x : poly::atoms(d_->den)) a.insert(x);
  std::vector<Atom> out(a.begin(), a.end());
  std::sort(out.begin(), out.end(), atom_less);
  return out;
}

std::string Expr::str() const {
  std::ostringstream os;
  const Poly& num = d_->num;
  const Poly& den = d_->den;
  if (poly::is_one(den)) {
    print_poly(os, num);
    return os.str();
  }
  if (num.size() > 1) {
    os << "(";
    print_poly(os, num);
    os << ")";
  } else {
    print_poly(os, num);
  }
  os << "/";
  const bool wrap = den.size() > 1 || den.begin()->first.size() > 1;
  if (wrap) os << "(";
  print_poly(os, den);
  if (wrap) os << ")";
  return os.str();
}

Expr Expr::pow(long n) const {
  if (n == 0) return Expr(1);
  if (n < 0) {
    if (is_zero()) throw EvalError("division by zero");
    return Expr(1) / pow(-n);
  }
  if (n == 1) return *this;
  const auto un = static_cast<unsigned>(n);
  if (is_polynomial()) return make(poly::power(d_->num, un), poly::constant(1));
  return make(poly::power(d_->num, un), poly::power(d_->den, un), true);
}

namespace {

// (an/ad) * (bn/bd) for coprime pairs: only the cross gcds can cancel.
Expr cross_multiply(const Poly& an, const Poly& ad, const Poly& bn, const Poly& bd) {
  auto cancel = [](Poly& n, Poly& d) {
    if (poly::is_one(d) || poly::is_constant(n) || poly::is_constant(d)) return;
    const Poly g = poly::gcd(n, d);
    if (poly::is_one(g)) return;
    n = *poly::divide_exact(n, g);
    d = *poly::divide_exact(d, g);
  };
  Poly n1 = an, d1 = bd, n2 = bn, d2 = ad;
  cancel(n1, d1);
  cancel(n2, d2);
  return make(poly::mul(n1, n2), poly::mul(d1, d2), true);
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const Poly& ad = a.denominator();
  const Poly& bd = b.denominator();
  if (poly::is_one(ad) && poly::is_one(bd)) {
    return make(poly::add(a.numerator(), b.numerator()), poly::constant(1));
  }
  if (poly::is_one(bd)) return make(poly::add(a.numerator(), poly::mul(b.numerator(), ad)), ad, true);
  if (poly::is_one(ad)) return make(poly::add(poly::mul(a.numerator(), bd), b.numerator()), bd, true);
  // With g = gcd(ad, bd), any common factor of the new numerator and
  // denominator already divides g.
  const Poly g = poly::gcd(ad, bd);
  const Poly ar = poly::is_one(g) ? ad : *poly::divide_exact(ad, g);
  const Poly br = poly::is_one(g) ? bd : *poly::divide_exact(bd, g);
  Poly num = poly::add(poly::mul(a.numerator(), br), poly::mul(b.numerator(), ar));
  Poly den = poly::mul(ad, br);
  if (!poly::is_one(g) && !num.empty()) {
    const Poly h = poly::gcd(num, g);
    if (!poly::is_one(h)) {
      num = *poly::divide_exact(num, h);
      den = *poly::divide_exact(den, h);
    }
  }
  if (num.empty()) return Expr();
  return make(std::move(num), std::move(den), true);
}

Expr operator-(const Expr& a) {
  if (a.is_zero()) return a;
  return Expr::from_polys(poly::neg(a.numerator()), a.denominator());
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_polynomial() && b.is_polynomial()) {
    return make(poly::mul(a.numerator(), b.numerator()), poly::constant(1));
  }
  return cross_multiply(a.numerator(), a.denominator(), b.numerator(), b.denominator());
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw EvalError("division by zero");
  if (a.is_zero()) return a;
  return cross_multiply(a.numerator(), a.denominator(), b.denominator(), b.numerator());
}

bool operator==(const Expr& a, const Expr& b) {
  return a.d_ == b.d_ || (a.d_->num == b.d_->num && a.d_->den == b.d_->den);
}

Expr sin(const Expr& e) {
  if (e.is_zero()) return Expr();
  return Expr::from_atom(intern_atom(AtomKind::Sin, "sin", 0, e));
}

Expr cos(const Expr& e) {
  if (e.is_zero()) return Expr(1);
  return Expr::from_atom(intern_atom(AtomKind::Cos, "cos", 0, e));
}

Expr exp(const Expr& e) {
  if (e.is_zero()) return Expr(1);
  return Expr::from_atom(intern_atom(AtomKind::Exp, "exp", 0, e));
}

Expr log(const Expr& e) {
  if (auto c = e.constant_value()) {
    if (sgn(*c) <= 0) throw EvalError("log of non-positive constant " + e.str());
    if (*c == 1) return Expr();
  }
  return Expr::from_atom(intern_atom(AtomKind::Log, "log", 0, e));
}

Expr sqrt(const Expr& e) {
  if (auto c = e.constant_value()) {
    if (sgn(*c) < 0) throw EvalError("sqrt of negative constant " + e.str());
    if (sgn(*c) == 0) return Expr();
    if (mpz_perfect_square_p(c->get_num_mpz_t()) != 0 &&
        mpz_perfect_square_p(c->get_den_mpz_t()) != 0) {
      mpz_class n, d;
      mpz_sqrt(n.get_mpz_t(), c->get_num_mpz_t());
      mpz_sqrt(d.get_mpz_t(), c->get_den_mpz_t());
      return Expr(Rational(n, d));
    }
  }
  return Expr::from_atom(intern_atom(AtomKind::Sqrt, "sqrt", 0, e));
}

Expr apply_abstract(const std::string& name, int order, const Expr& arg) {
  if (order < 0) throw Error("negative derivative order");
  return Expr::from_atom(intern_atom(AtomKind::Abstract, name, order, arg));
}

Expr differentiate(const Expr& e, Symbol s) {
  if (!s.valid()) throw SymbolError("differentiate: invalid symbol");
  if (!e.depends_on(s)) return Expr();
  const Expr dn = diff_poly(e.numerator(), s);
  if (e.is_polynomial()) return dn;
  const Expr num = Expr::from_polys(e.numerator(), poly::constant(1));
  const Expr den = Expr::from_polys(e.denominator(), poly::constant(1));
  const Expr dd = diff_poly(e.denominator(), s);
  return (dn * den - num * dd) / (den * den);
}

Expr substitute(const Expr& e, const Bindings& bindings) {
  if (bindings.empty()) return e;
  bool touched = false;
  for (Symbol s : e.free_symbols()) {
    if (bindings.count(s)) {
      touched = true;
      break;
    }
  }
  if (!touched) return e;
  return rebuild(e, [&](Atom a) -> Expr {
    if (a->kind == AtomKind::Symbol) {
      auto it = bindings.find(symbol_of(a));
      return it != bindings.end() ? it->second : Expr::from_atom(a);
    }
    return apply_kind(a->kind, a->name, a->order, substitute(a->arg, bindings));
  });
}

Expr substitute_function(const Expr& e, const std::string& name, Symbol param,
                         const Expr& body) {
  if (!abstract_functions(e).count(name)) return e;
  std::map<int, Expr> derivs{{0, body}};
  auto deriv = [&](int k) -> const Expr& {
    for (int i = 1; i <= k; ++i) {
      if (!derivs.count(i)) derivs[i] = differentiate(derivs[i - 1], param);
    }
    return derivs.at(k);
  };
  return rebuild(e, [&](Atom a) -> Expr {
    if (a->kind == AtomKind::Symbol) return Expr::from_atom(a);
    const Expr arg = substitute_function(a->arg, name, param, body);
    if (a->kind == AtomKind::Abstract && a->name == name) {
      return substitute(deriv(a->order), Bindings{{param, arg}});
    }
    return apply_kind(a->kind, a->name, a->order, arg);
  });
}

std::set<std::string> abstract_functions(const Expr& e) {
  std::set<std::string> out;
  for (const Poly* p : {&e.numerator(), &e.denominator()}) {
    for (Atom a : poly::atoms(*p)) {
      if (a->kind == AtomKind::Symbol) continue;
      if (a->kind == AtomKind::Abstract) out.insert(a->name);
      for (const auto& n : abstract_functions(a->arg)) out.insert(n);
    }
  }
  return out;
}

}  // namespace hjc
