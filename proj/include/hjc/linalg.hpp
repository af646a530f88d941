#pragma once

#include <vector>

#include "hjc/eval.hpp"
#include "hjc/expr.hpp"

namespace hjc {

using ExprMatrix = std::vector<std::vector<Expr>>;

/// Zero test used by the symbolic eliminations; records whether any decision
/// fell back to sampling.
class ZeroOracle {
 public:
  explicit ZeroOracle(ZeroTestOptions opts = {}) : opts_(opts) {}
  bool operator()(const Expr& e);
  [[nodiscard]] bool probabilistic() const { return probabilistic_; }
  [[nodiscard]] int probabilistic_count() const { return count_; }

 private:
  ZeroTestOptions opts_;
  bool probabilistic_ = false;
  int count_ = 0;
};

struct Elimination {
  int rank = 0;
  std::vector<int> pivot_columns;  // ascending
};

/// Row reduction scanning columns left to right, so the pivot columns are the
/// lexicographically smallest basis of the column space.
Elimination eliminate(ExprMatrix m, ZeroOracle& zero);

/// Solves the square system a x = b. Returns nullopt when `a` is singular.
std::optional<std::vector<Expr>> solve(ExprMatrix a, std::vector<Expr> b, ZeroOracle& zero);

}  // namespace hjc
