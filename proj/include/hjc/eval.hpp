#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hjc/expr.hpp"

namespace hjc {

using Point = std::map<Symbol, double>;

/// Numeric stand-in for abstract functions: value of the `order`-th
/// derivative of `name` at x.
using FunctionProvider = std::function<double(const std::string& name, int order, double x)>;

/// Expression flattened for repeated double-precision evaluation against a
/// fixed slot layout.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  /// Throws EvalError if `e` mentions a symbol that has no slot, or applies an
  /// abstract function while `functions` is empty.
  CompiledExpr(const Expr& e, std::span<const Symbol> slots, FunctionProvider functions = {});

  /// Throws EvalError on a pole or a domain violation (sqrt of a negative
  /// number, log of a non-positive one).
  [[nodiscard]] double operator()(std::span<const double> values) const;

  /// Numerator value and the sum of absolute term values, without dividing by
  /// the denominator. Used for scale-aware zero tests.
  struct NumeratorProbe {
    double value;
    double magnitude;
    double denominator;
  };
  [[nodiscard]] NumeratorProbe probe(std::span<const double> values) const;

  struct Program;

 private:
  std::shared_ptr<const Program> prog_;
};

/// Evaluates `e` at `point`, which must bind every free symbol.
double evaluate(const Expr& e, const Point& point);

enum class Certainty { Proven, Probabilistic };

struct ZeroTestOptions {
  int points = 16;
  double tolerance = 1e-9;
  int max_resamples = 100;
  std::uint64_t seed = 0x5eed;
};

struct ZeroTest {
  bool zero;
  Certainty certainty;
  explicit operator bool() const { return zero; }
};

/// Exact decision for transcendental-free expressions (canonical form is the
/// zero polynomial). Otherwise evaluates at random rational points, with
/// abstract functions replaced by fixed pseudo-random smooth functions that
/// are independent per derivative order. Throws EvalError("degenerate
/// expression") when too many sample points hit poles or domain errors.
ZeroTest is_zero(const Expr& e, const ZeroTestOptions& opts = {});

/// Pseudo-random smooth function used for abstract functions in
/// probabilistic zero tests.
FunctionProvider random_function_provider(std::uint64_t seed);

}  // namespace hjc
