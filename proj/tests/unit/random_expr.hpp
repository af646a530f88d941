#pragma once

#include <random>
#include <vector>

#include "hjc/expr.hpp"

namespace testing {

/// Random polynomials and elementary expressions over a fixed set of symbols.
class ExprGen {
 public:
  ExprGen(std::vector<hjc::Symbol> vars, std::uint64_t seed) : vars_(std::move(vars)), rng_(seed) {}

  hjc::Rational coefficient() {
    std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
    int n = 0;
    while (n == 0) n = num(rng_);
    return hjc::Rational(n, den(rng_));
  }

  hjc::Expr monomial(int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<std::size_t> pick(0, vars_.size() - 1);
    hjc::Expr m(coefficient());
    const int d = deg(rng_);
    for (int i = 0; i < d; ++i) m *= hjc::Expr(vars_[pick(rng_)]);
    return m;
  }

  hjc::Expr polynomial(int max_terms = 4, int max_degree = 3) {
    std::uniform_int_distribution<int> terms(1, max_terms);
    hjc::Expr p;
    const int n = terms(rng_);
    for (int i = 0; i < n; ++i) p += monomial(max_degree);
    return p;
  }

  /// Polynomials, quotients, and one level of sin/cos/exp/log.
  hjc::Expr elementary() {
    std::uniform_int_distribution<int> kind(0, 5);
    const hjc::Expr a = polynomial(3, 2);
    const hjc::Expr b = polynomial(2, 2);
    switch (kind(rng_)) {
      case 0: return a * b;
      case 1: return a / (b * b + hjc::Expr(1L));
      case 2: return hjc::sin(a) * b;
      case 3: return hjc::exp(a / hjc::Expr(4L)) + b;
      case 4: return hjc::cos(b) / (a * a + hjc::Expr(2L));
      default: return hjc::log(a * a + hjc::Expr(1L)) * b;
    }
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::vector<hjc::Symbol> vars_;
  std::mt19937_64 rng_;
};

}  // namespace testing
