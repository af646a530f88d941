// Atom interning, monomial ordering and sparse polynomial arithmetic,
// including the multivariate gcd used to keep rational functions reduced.

#include <algorithm>
#include <cctype>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>

#include "hjc/error.hpp"
#include "hjc/expr.hpp"
#include "atom_registry.hpp"

namespace hjc {

namespace {

struct Registry {
  std::mutex mu;
  std::unordered_map<std::string, std::unique_ptr<AtomData>> atoms;
};

Registry& registry() {
  static Registry r;
  return r;
}

// Digit runs compare numerically so q2 sorts before q10.
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      std::string_view na(a.data() + i, ie - i), nb(b.data() + j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

}  // namespace

Atom intern_atom(AtomKind kind, const std::string& name, int order, const Expr& arg) {
  std::string key;
  if (kind == AtomKind::Symbol) {
    key = name;
  } else {
    key = name + std::string(static_cast<std::size_t>(order), '\'') + "(" + arg.str() + ")";
  }
  const std::string reg_key = (kind == AtomKind::Symbol ? "s:" : "f:") + key;
  auto& r = registry();
  std::lock_guard lock(r.mu);
  auto it = r.atoms.find(reg_key);
  if (it != r.atoms.end()) return it->second.get();
  auto data = std::make_unique<AtomData>(AtomData{kind, name, order, arg, key});
  Atom out = data.get();
  r.atoms.emplace(reg_key, std::move(data));
  return out;
}

bool atom_less(Atom a, Atom b) {
  if (a == b) return false;
  const bool sa = a->kind == AtomKind::Symbol;
  const bool sb = b->kind == AtomKind::Symbol;
  if (sa != sb) return sa;
  if (sa) return natural_less(a->name, b->name);
  return a->key < b->key;
}

Symbol Symbol::intern(std::string_view name) {
  if (name.empty()) throw SymbolError("empty symbol name");
  return Symbol(intern_atom(AtomKind::Symbol, std::string(name), 0, Expr()));
}

const std::string& Symbol::name() const {
  static const std::string empty;
  return atom_ ? atom_->name : empty;
}

Symbol symbol_of(Atom a) { return Symbol(a); }

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  int da = 0, db = 0;
  for (const auto& [_, e] : a) da += e;
  for (const auto& [_, e] : b) db += e;
  if (da != db) return da > db;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].first != b[i].first) return atom_less(a[i].first, b[i].first);
    if (a[i].second != b[i].second) return a[i].second > b[i].second;
  }
  return a.size() < b.size();
}

namespace poly {

namespace {

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && atom_less(a[i].first, b[j].first))) {
      out.push_back(a[i++]);
    } else if (i == a.size() || atom_less(b[j].first, a[i].first)) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

// a / b when every exponent of b is covered by a.
std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0;
  for (const auto& [atom, e] : b) {
    while (i < a.size() && atom_less(a[i].first, atom)) out.push_back(a[i++]);
    if (i == a.size() || a[i].first != atom || a[i].second < e) return std::nullopt;
    if (a[i].second > e) out.emplace_back(atom, a[i].second - e);
    ++i;
  }
  while (i < a.size()) out.push_back(a[i++]);
  return out;
}

void add_term(Poly& p, const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = p.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) p.erase(it);
  }
}

Poly monic(const Poly& a) {
  if (a.empty()) return a;
  const Rational lc = leading_coefficient(a);
  if (lc == 1) return a;
  return scale(a, Rational(1) / lc);
}

Poly content_in(const Poly& a, Atom x) {
  Poly g;
  for (const auto& [_, c] : coefficients_in(a, x)) {
    g = g.empty() ? monic(c) : gcd(g, c);
    if (is_one(g)) break;
  }
  return g;
}

// Pseudo-remainder of a by b with respect to x.
Poly prem(Poly a, const Poly& b, Atom x) {
  const int db = degree_in(b, x);
  auto bc = coefficients_in(b, x);
  const Poly lc = bc.rbegin()->second;
  int da = degree_in(a, x);
  while (!a.empty() && da >= db) {
    auto ac = coefficients_in(a, x);
    const Poly lca = ac.rbegin()->second;
    const Poly shift = da - db == 0 ? constant(1) : from_atom(x, da - db);
    a = sub(mul(lc, a), mul(mul(lca, shift), b));
    da = a.empty() ? -1 : degree_in(a, x);
  }
  return a;
}

constexpr std::uint64_t kPrime = 2305843009213693951ULL;  // 2^61 - 1

__extension__ using Wide = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>((static_cast<Wide>(a) * b) % kPrime);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  for (; e; e >>= 1, b = mulmod(b, b)) {
    if (e & 1) r = mulmod(r, b);
  }
  return r;
}

std::uint64_t reduce_mod(const mpz_class& z) {
  static const mpz_class prime(std::to_string(kPrime));
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), prime.get_mpz_t());
  return static_cast<std::uint64_t>(r.get_ui());
}

std::optional<std::uint64_t> rational_mod(const Rational& c) {
  const std::uint64_t d = reduce_mod(c.get_den());
  if (d == 0) return std::nullopt;
  return mulmod(reduce_mod(c.get_num()), powmod(d, kPrime - 2));
}

using Dense = std::vector<std::uint64_t>;

void trim(Dense& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Degree of gcd(a, b) over GF(p).
int dense_gcd_degree(Dense a, Dense b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    const std::uint64_t inv = powmod(b.back(), kPrime - 2);
    while (a.size() >= b.size()) {
      const std::uint64_t f = mulmod(a.back(), inv);
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) {
        a[shift + i] = (a[shift + i] + kPrime - mulmod(f, b[i])) % kPrime;
      }
      trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return static_cast<int>(a.size()) - 1;
}

// Image of `p` in GF(p)[x] with every other atom replaced by its value.
std::optional<Dense> image(const Poly& p, Atom x, const std::map<Atom, std::uint64_t>& at) {
  Dense out(static_cast<std::size_t>(degree_in(p, x)) + 1, 0);
  for (const auto& [m, c] : p) {
    auto v = rational_mod(c);
    if (!v) return std::nullopt;
    std::uint64_t term = *v;
    int dx = 0;
    for (const auto& [a, e] : m) {
      if (a == x) {
        dx = e;
      } else {
        term = mulmod(term, powmod(at.at(a), static_cast<std::uint64_t>(e)));
      }
    }
    out[static_cast<std::size_t>(dx)] = (out[static_cast<std::size_t>(dx)] + term) % kPrime;
  }
  return out;
}

// True when the gcd of a and b provably does not involve x: an image that
// keeps both leading coefficients has a gcd of degree at least deg_x gcd(a, b).
bool free_of_in_gcd(const Poly& a, const Poly& b, Atom x, const std::set<Atom>& vars) {
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::map<Atom, std::uint64_t> at;
    for (Atom v : vars) {
      seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
      at[v] = (seed >> 7) % kPrime;
    }
    const auto ia = image(a, x, at);
    const auto ib = image(b, x, at);
    if (!ia || !ib) return false;
    if (ia->back() == 0 || ib->back() == 0) continue;
    return dense_gcd_degree(*ia, *ib) == 0;
  }
  return false;
}

Poly primitive_part(const Poly& a, Atom x) {
  const Poly c = content_in(a, x);
  if (is_one(c)) return monic(a);
  auto q = divide_exact(a, c);
  return monic(*q);
}

}  // namespace

Poly constant(const Rational& c) {
  Poly p;
  if (sgn(c) != 0) p.emplace(Monomial{}, c);
  return p;
}

Poly from_atom(Atom a, int power) {
  Poly p;
  if (power == 0) {
    p.emplace(Monomial{}, Rational(1));
  } else {
    p.emplace(Monomial{{a, power}}, Rational(1));
  }
  return p;
}

Poly add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) add_term(out, m, c);
  return out;
}

Poly sub(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) add_term(out, m, -c);
  return out;
}

Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  if (a.empty() || b.empty()) return out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) add_term(out, mono_mul(ma, mb), ca * cb);
  }
  return out;
}

Poly scale(const Poly& a, const Rational& c) {
  if (sgn(c) == 0) return {};
  Poly out = a;
  for (auto& [_, k] : out) k *= c;
  return out;
}

Poly neg(const Poly& a) { return scale(a, Rational(-1)); }

Poly power(const Poly& a, unsigned n) {
  Poly result = constant(1);
  Poly base = a;
  while (n > 0) {
    if (n & 1U) result = mul(result, base);
    n >>= 1U;
    if (n > 0) base = mul(base, base);
  }
  return result;
}

bool is_constant(const Poly& a) { return a.empty() || (a.size() == 1 && a.begin()->first.empty()); }

bool is_one(const Poly& a) {
  return a.size() == 1 && a.begin()->first.empty() && a.begin()->second == 1;
}

const Rational& leading_coefficient(const Poly& a) {
  static const Rational zero(0);
  return a.empty() ? zero : a.begin()->second;
}

int degree_in(const Poly& a, Atom x) {
  int d = 0;
  for (const auto& [m, _] : a) {
    for (const auto& [atom, e] : m) {
      if (atom == x) d = std::max(d, e);
    }
  }
  return d;
}

std::map<int, Poly> coefficients_in(const Poly& a, Atom x) {
  std::map<int, Poly> out;
  for (const auto& [m, c] : a) {
    int d = 0;
    Monomial rest;
    rest.reserve(m.size());
    for (const auto& f : m) {
      if (f.first == x) {
        d = f.second;
      } else {
        rest.push_back(f);
      }
    }
    add_term(out[d], rest, c);
  }
  return out;
}

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  if (b.empty()) return std::nullopt;
  Poly rem = a;
  Poly quot;
  const auto& [lm, lc] = *b.begin();
  while (!rem.empty()) {
    const auto& [rm, rc] = *rem.begin();
    auto q = mono_div(rm, lm);
    if (!q) return std::nullopt;
    const Rational qc = rc / lc;
    const Monomial qm = *q;
    add_term(quot, qm, qc);
    for (const auto& [bm, bc] : b) add_term(rem, mono_mul(qm, bm), -qc * bc);
  }
  return quot;
}

std::set<Atom> atoms(const Poly& a) {
  std::set<Atom> out;
  for (const auto& [m, _] : a) {
    for (const auto& [atom, e] : m) out.insert(atom);
  }
  return out;
}

Poly gcd(const Poly& a, const Poly& b) {
  if (a.empty()) return monic(b);
  if (b.empty()) return monic(a);
  if (is_constant(a) || is_constant(b)) return constant(1);

  const auto va = atoms(a);
  const auto vb = atoms(b);
  // An indeterminate present in only one argument cannot divide the gcd.
  for (Atom x : va) {
    if (!vb.count(x)) return gcd(content_in(a, x), b);
  }
  for (Atom x : vb) {
    if (!va.count(x)) return gcd(a, content_in(b, x));
  }

  if (divide_exact(a, b)) return monic(b);
  if (divide_exact(b, a)) return monic(a);
  for (Atom v : va) {
    if (free_of_in_gcd(a, b, v, va)) return gcd(content_in(a, v), content_in(b, v));
  }

  // Same support: pick the atom of lowest maximal degree as main variable.
  Atom x = nullptr;
  int best = 0;
  for (Atom v : va) {
    const int d = std::max(degree_in(a, v), degree_in(b, v));
    if (x == nullptr || d < best || (d == best && atom_less(v, x))) {
      x = v;
      best = d;
    }
  }

  const Poly ca = content_in(a, x);
  const Poly cb = content_in(b, x);
  const Poly c = gcd(ca, cb);
  Poly pa = is_one(ca) ? a : *divide_exact(a, ca);
  Poly pb = is_one(cb) ? b : *divide_exact(b, cb);
  if (degree_in(pa, x) < degree_in(pb, x)) std::swap(pa, pb);
  while (!pb.empty()) {
    Poly r = prem(pa, pb, x);
    pa = std::move(pb);
    if (r.empty()) break;
    if (degree_in(r, x) == 0) return monic(c);
    pb = primitive_part(r, x);
  }
  return monic(mul(c, primitive_part(pa, x)));
}

}  // namespace poly
}  // namespace hjc
