// Pratt parser for the expression grammar.

#include "hjc/parser.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "hjc/error.hpp"

namespace hjc {

namespace {

enum class Tok { Number, Ident, Op, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t offset;  // 1-based
  std::string text;
  Rational value;
  int primes = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

Rational decimal_value(const std::string& mantissa, long exponent) {
  std::string digits;
  long scale = 0;
  bool frac = false;
  for (char c : mantissa) {
    if (c == '.') {
      frac = true;
      continue;
    }
    digits.push_back(c);
    if (frac) ++scale;
  }
  mpz_class n(digits, 10);
  Rational r(n);
  long net = exponent - scale;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(net < 0 ? -net : net));
  if (net >= 0) {
    r *= ten_pow;
  } else {
    r /= ten_pow;
  }
  r.canonicalize();
  return r;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() &&
                                                        std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::string mant;
      bool dot = false;
      while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || (src[i] == '.' && !dot))) {
        if (src[i] == '.') dot = true;
        mant.push_back(src[i++]);
      }
      long expo = 0;
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        bool negative = false;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) negative = src[j++] == '-';
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          std::string e;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) e.push_back(src[j++]);
          if (e.size() > 6) throw ParseError("exponent too large", start + 1);
          expo = std::stol(e) * (negative ? -1 : 1);
          i = j;
        }
      }
      if (mant == ".") throw ParseError("malformed number", start + 1);
      if (mant.front() == '.') mant.insert(mant.begin(), '0');
      Token t{Tok::Number, start + 1, std::string(src.substr(start, i - start)), decimal_value(mant, expo)};
      out.push_back(std::move(t));
      continue;
    }
    if (ident_start(c)) {
      while (i < src.size() && ident_char(src[i])) ++i;
      Token t{Tok::Ident, start + 1, std::string(src.substr(start, i - start)), Rational(0)};
      while (i < src.size() && src[i] == '\'') {
        ++t.primes;
        ++i;
      }
      out.push_back(std::move(t));
      continue;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        out.push_back(Token{Tok::Op, start + 1, std::string(1, c), Rational(0)});
        break;
      case '(': out.push_back(Token{Tok::LParen, start + 1, "(", Rational(0)}); break;
      case ')': out.push_back(Token{Tok::RParen, start + 1, ")", Rational(0)}); break;
      case ',': out.push_back(Token{Tok::Comma, start + 1, ",", Rational(0)}); break;
      default: {
        const auto uc = static_cast<unsigned char>(c);
        std::string shown = std::isprint(uc) ? std::string("'") + c + "'" : "byte 0x" + [&] {
          const char* hex = "0123456789abcdef";
          return std::string{hex[uc >> 4U], hex[uc & 15U]};
        }();
        throw ParseError("unexpected character " + shown, start + 1);
      }
    }
    ++i;
  }
  out.push_back(Token{Tok::End, src.size() + 1, "", Rational(0)});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const SymbolTable& table, const std::optional<std::set<Role>>& allowed)
      : toks_(std::move(toks)), table_(table), allowed_(allowed) {}

  Expr parse() {
    Expr e = expression(0);
    if (peek().kind != Tok::End) unexpected(peek());
    return e;
  }

 private:
  static constexpr int kUnaryBp = 30;
  static constexpr int kMaxDepth = 200;

  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] static void unexpected(const Token& t) {
    if (t.kind == Tok::End) throw ParseError("unexpected end of input", t.offset);
    if (t.kind == Tok::Number || t.kind == Tok::Ident || t.kind == Tok::LParen) {
      throw ParseError("unexpected '" + t.text + "' (implicit multiplication is not allowed)", t.offset);
    }
    throw ParseError("unexpected '" + t.text + "'", t.offset);
  }

  static std::pair<int, int> binding_power(const std::string& op) {
    if (op == "+" || op == "-") return {10, 11};
    if (op == "*" || op == "/") return {20, 21};
    return {40, 39};  // '^'
  }

  Expr expression(int min_bp) {
    if (++depth_ > kMaxDepth) throw ParseError("expression nested too deeply", peek().offset);
    struct Leave {
      int& d;
      ~Leave() { --d; }
    } leave{depth_};
    Expr lhs = prefix();
    for (;;) {
      const Token& t = peek();
      if (t.kind != Tok::Op) break;
      const auto [lbp, rbp] = binding_power(t.text);
      if (lbp < min_bp) break;
      const Token op = advance();
      if (op.text == "^") {
        const std::size_t at = peek().offset;
        lhs = power(lhs, expression(rbp), at);
        continue;
      }
      const Expr rhs = expression(rbp);
      if (op.text == "+") {
        lhs = lhs + rhs;
      } else if (op.text == "-") {
        lhs = lhs - rhs;
      } else if (op.text == "*") {
        lhs = lhs * rhs;
      } else {
        if (rhs.is_zero()) throw ParseError("division by zero", op.offset);
        try {
          lhs = lhs / rhs;
        } catch (const EvalError& e) {
          throw ParseError(e.what(), op.offset);
        }
      }
    }
    return lhs;
  }

  static Expr power(const Expr& base, const Expr& exponent, std::size_t at) {
    auto c = exponent.constant_value();
    if (!c) throw ParseError("exponent must be a constant", at);
    const mpz_class& den = c->get_den();
    if (den != 1 && den != 2) throw ParseError("exponent must be an integer or half-integer", at);
    if (!c->get_num().fits_slong_p() || abs(c->get_num()) > 64) {
      throw ParseError("exponent too large", at);
    }
    const long n = c->get_num().get_si();
    try {
      if (den == 1) return base.pow(n);
      return sqrt(base).pow(n);
    } catch (const EvalError& e) {
      throw ParseError(e.what(), at);
    }
  }

  Expr prefix() {
    const Token t = advance();
    switch (t.kind) {
      case Tok::Number: return Expr(t.value);
      case Tok::LParen: {
        Expr inner = expression(0);
        if (peek().kind != Tok::RParen) {
          if (peek().kind == Tok::End) throw ParseError("missing ')'", peek().offset);
          unexpected(peek());
        }
        advance();
        return inner;
      }
      case Tok::Op:
        if (t.text == "-") return -expression(kUnaryBp);
        if (t.text == "+") return expression(kUnaryBp);
        unexpected(t);
      case Tok::Ident: return identifier(t);
      default: unexpected(t);
    }
  }

  Expr identifier(const Token& t) {
    if (peek().kind == Tok::LParen) return call(t);
    if (t.primes > 0) throw ParseError("primes are only allowed on abstract function names", t.offset);
    auto info = table_.find(t.text);
    if (!info) {
      if (table_.function_arity(t.text)) {
        throw ParseError("function " + t.text + " used without arguments", t.offset);
      }
      throw ParseError("undeclared symbol " + t.text, t.offset);
    }
    if (allowed_ && !allowed_->count(info->role)) {
      throw ParseError("undeclared symbol " + t.text + " (" + std::string(role_name(info->role)) +
                           " not allowed here)",
                       t.offset);
    }
    return Expr(info->symbol);
  }

  Expr call(const Token& name) {
    const auto arity = table_.function_arity(name.text);
    if (!arity) {
      if (table_.find(name.text)) {
        throw ParseError("'" + name.text + "' is not a function (implicit multiplication is not allowed)",
                         name.offset);
      }
      throw ParseError("unknown function " + name.text, name.offset);
    }
    const bool builtin = is_builtin_function(name.text);
    if (builtin && name.primes > 0) {
      throw ParseError("primes are only allowed on abstract function names", name.offset);
    }
    advance();  // '('
    std::vector<Expr> args;
    if (peek().kind != Tok::RParen) {
      for (;;) {
        args.push_back(expression(0));
        if (peek().kind == Tok::Comma) {
          advance();
          continue;
        }
        break;
      }
    }
    if (peek().kind != Tok::RParen) {
      if (peek().kind == Tok::End) throw ParseError("missing ')'", peek().offset);
      unexpected(peek());
    }
    advance();
    if (static_cast<int>(args.size()) != *arity) {
      throw ParseError("function " + name.text + " expects " + std::to_string(*arity) +
                           " argument(s), got " + std::to_string(args.size()),
                       name.offset);
    }
    try {
      const Expr& a = args.front();
      if (name.text == "sin") return sin(a);
      if (name.text == "cos") return cos(a);
      if (name.text == "exp") return exp(a);
      if (name.text == "sqrt") return sqrt(a);
      if (name.text == "log") return log(a);
      return apply_abstract(name.text, name.primes, a);
    } catch (const EvalError& e) {
      throw ParseError(e.what(), name.offset);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  const SymbolTable& table_;
  const std::optional<std::set<Role>>& allowed_;
};

}  // namespace

Expr parse_expression(std::string_view src, const SymbolTable& table,
                      const std::optional<std::set<Role>>& allowed) {
  Parser p(lex(src), table, allowed);
  return p.parse();
}

}  // namespace hjc
