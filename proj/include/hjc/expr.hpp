#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hjc {

using Rational = mpq_class;

enum class AtomKind : std::uint8_t { Symbol, Sin, Cos, Exp, Sqrt, Log, Abstract };

class Expr;
struct ExprData;
struct AtomData;

/// Atoms are interned for the lifetime of the process, so identity is pointer
/// identity and handles are trivially copyable.
using Atom = const AtomData*;

/// Total order on atoms: symbols first (natural name order, so q2 < q10),
/// then function applications by their canonical key.
bool atom_less(Atom a, Atom b);

/// Handle to an interned symbol name.
class Symbol {
 public:
  Symbol() = default;
  static Symbol intern(std::string_view name);

  [[nodiscard]] const std::string& name() const;
  [[nodiscard]] Atom atom() const noexcept { return atom_; }
  [[nodiscard]] bool valid() const noexcept { return atom_ != nullptr; }

  friend bool operator==(Symbol a, Symbol b) noexcept { return a.atom_ == b.atom_; }
  friend bool operator!=(Symbol a, Symbol b) noexcept { return a.atom_ != b.atom_; }
  /// Natural name order; stable across runs.
  friend bool operator<(Symbol a, Symbol b) { return atom_less(a.atom_, b.atom_); }

 private:
  explicit Symbol(Atom a) : atom_(a) {}
  friend struct AtomData;
  friend Symbol symbol_of(Atom);
  Atom atom_ = nullptr;
};

/// Symbol behind a symbol atom. Precondition: `a->kind == AtomKind::Symbol`.
Symbol symbol_of(Atom a);

/// Product of atom powers, sorted by `atom_less`, all exponents >= 1.
using Monomial = std::vector<std::pair<Atom, int>>;

/// Graded order: higher total degree first, then lexicographic on atoms.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial over the rationals. The first entry is the
/// leading term.
using Poly = std::map<Monomial, Rational, MonomialOrder>;

/// Immutable symbolic expression held in canonical rational-function form:
/// numerator / denominator, both expanded polynomials over atoms, gcd-reduced,
/// denominator monic. Transcendental-free expressions that are equal as
/// rational functions have identical representations.
class Expr {
 public:
  Expr();  // zero
  Expr(long value);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)
  Expr(Symbol s);  // NOLINT(google-explicit-constructor)

  /// Builds num/den and normalizes. Throws EvalError if `den` is zero.
  static Expr from_polys(Poly num, Poly den);
  static Expr from_atom(Atom a, int power = 1);

  [[nodiscard]] const Poly& numerator() const;
  [[nodiscard]] const Poly& denominator() const;

  [[nodiscard]] bool is_zero() const;  // structural: numerator empty
  [[nodiscard]] bool is_constant() const;
  [[nodiscard]] std::optional<Rational> constant_value() const;
  [[nodiscard]] bool is_polynomial() const;  // denominator == 1
  /// True when any sin/cos/exp/sqrt/log or abstract function atom occurs.
  [[nodiscard]] bool has_transcendental() const;

  /// Symbols occurring anywhere, including inside function arguments.
  [[nodiscard]] std::set<Symbol> free_symbols() const;
  [[nodiscard]] bool depends_on(Symbol s) const;
  /// All distinct atoms at the top level (not inside function arguments).
  [[nodiscard]] std::vector<Atom> atoms() const;

  /// Grammar-compatible rendering; deterministic.
  [[nodiscard]] std::string str() const;

  [[nodiscard]] Expr pow(long n) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }
  Expr& operator/=(const Expr& b) { return *this = *this / b; }

  /// Identity of canonical forms.
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  friend struct ExprAccess;
  explicit Expr(std::shared_ptr<const ExprData> d) : d_(std::move(d)) {}
  std::shared_ptr<const ExprData> d_;
};

struct AtomData {
  AtomKind kind;
  std::string name;  // symbol name, builtin function name, or abstract function name
  int order = 0;     // derivative order of an abstract function
  Expr arg;          // argument of a function atom
  std::string key;   // canonical identity key
};

// Elementary functions with exact folding at trivial arguments.
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr sqrt(const Expr& e);
Expr log(const Expr& e);
/// Opaque unary function `name`, differentiated `order` times, applied to `arg`.
Expr apply_abstract(const std::string& name, int order, const Expr& arg);

/// Partial derivative with every other symbol held independent. Abstract
/// functions obey the chain rule: d V(u) = V'(u) du.
Expr differentiate(const Expr& e, Symbol s);

using Bindings = std::map<Symbol, Expr>;

/// Simultaneous substitution of symbols by expressions.
Expr substitute(const Expr& e, const Bindings& bindings);

/// Replaces every application of the abstract function `name` (and its
/// derivatives) by `body` with `param` bound to the argument.
Expr substitute_function(const Expr& e, const std::string& name, Symbol param,
                         const Expr& body);

/// Names of the abstract functions applied anywhere in `e`.
std::set<std::string> abstract_functions(const Expr& e);

/// Polynomial helpers shared with the gcd and linear-algebra code.
namespace poly {
Poly constant(const Rational& c);
Poly from_atom(Atom a, int power = 1);
Poly add(const Poly& a, const Poly& b);
Poly sub(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);
Poly scale(const Poly& a, const Rational& c);
Poly neg(const Poly& a);
Poly power(const Poly& a, unsigned n);
bool is_constant(const Poly& a);
bool is_one(const Poly& a);
const Rational& leading_coefficient(const Poly& a);
int degree_in(const Poly& a, Atom x);
/// Coefficients of `a` viewed as a univariate polynomial in `x`.
std::map<int, Poly> coefficients_in(const Poly& a, Atom x);
/// Exact quotient a / b, or nullopt when b does not divide a.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);
/// Monic greatest common divisor (treating every atom as an indeterminate).
Poly gcd(const Poly& a, const Poly& b);
std::set<Atom> atoms(const Poly& a);
}  // namespace poly

}  // namespace hjc
