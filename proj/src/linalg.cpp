#include "hjc/linalg.hpp"

namespace hjc {

bool ZeroOracle::operator()(const Expr& e) {
  if (e.is_zero()) return true;
  if (!e.has_transcendental()) return false;
  const ZeroTest t = is_zero(e, opts_);
  if (t.certainty == Certainty::Probabilistic) {
    probabilistic_ = true;
    ++count_;
  }
  return t.zero;
}

Elimination eliminate(ExprMatrix m, ZeroOracle& zero) {
  Elimination out;
  const std::size_t rows = m.size();
  const std::size_t cols = rows == 0 ? 0 : m.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = rows;
    for (std::size_t i = r; i < rows; ++i) {
      if (!zero(m[i][c])) {
        piv = i;
        break;
      }
    }
    if (piv == rows) continue;
    std::swap(m[r], m[piv]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (m[i][c].is_zero()) continue;
      const Expr f = m[i][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    out.pivot_columns.push_back(static_cast<int>(c));
    ++r;
  }
  out.rank = static_cast<int>(r);
  return out;
}

std::optional<std::vector<Expr>> solve(ExprMatrix a, std::vector<Expr> b, ZeroOracle& zero) {
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = n;
    for (std::size_t i = c; i < n; ++i) {
      if (!zero(a[i][c])) {
        piv = i;
        break;
      }
    }
    if (piv == n) return std::nullopt;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c].is_zero()) continue;
      const Expr f = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
      b[i] -= f * b[c];
    }
  }
  std::vector<Expr> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

}  // namespace hjc
