#include "hjc/pathint.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hjc/error.hpp"

namespace hjc {

Symbol slice_fraction_symbol() { return Symbol::intern("s"); }

namespace {

struct SliceModel {
  std::size_t m = 0;                       // reduced pairs
  std::vector<Symbol> slots;               // t, parameters, reduced q, reduced p
  std::vector<Symbol> params;              // parameters other than t, in entry order
  struct Term {
    std::size_t param_index;  // 0 = t, k = params[k-1]
    CompiledExpr value;
    std::vector<CompiledExpr> grad;
    std::vector<std::vector<CompiledExpr>> hess;
  };
  std::vector<Term> terms;
};

SliceModel build_model(const ConstraintSet& cs, const NumericContext& ctx) {
  for (const auto& e : cs.entries) {
    if (e.generated()) throw AnalysisError("path integral does not support generated constraints (" + e.label + ")");
  }
  SliceModel sm;
  const PhaseSpace& ps = cs.space;
  const auto reduced = cs.reduced_pairs();
  sm.m = reduced.size();
  if (sm.m == 0) throw AnalysisError("no reduced degrees of freedom");
  sm.slots.push_back(ps.time());
  for (const auto* e : cs.parameterized()) {
    if (*e->parameter != ps.time()) {
      sm.params.push_back(*e->parameter);
      sm.slots.push_back(*e->parameter);
    }
  }
  std::vector<Symbol> z;
  for (const auto& pr : reduced) z.push_back(pr.first);
  for (const auto& pr : reduced) z.push_back(pr.second);
  sm.slots.insert(sm.slots.end(), z.begin(), z.end());

  std::set<Symbol> allowed(sm.slots.begin(), sm.slots.end());
  std::size_t k = 0;
  for (const auto* e : cs.parameterized()) {
    const Expr h = ctx.bind(cs.body(*e), ps);
    for (Symbol s : h.free_symbols()) {
      if (!allowed.count(s)) throw AnalysisError("Hamiltonian " + e->label + " depends on " + s.name());
    }
    SliceModel::Term term{*e->parameter == ps.time() ? 0 : ++k, CompiledExpr(h, sm.slots), {}, {}};
    for (std::size_t i = 0; i < z.size(); ++i) {
      const Expr gi = differentiate(h, z[i]);
      term.grad.emplace_back(gi, sm.slots);
      std::vector<CompiledExpr> row;
      for (std::size_t j = 0; j < z.size(); ++j) {
        const Expr gij = differentiate(gi, z[j]);
        for (Symbol s : z) {
          if (gij.depends_on(s)) {
            throw AnalysisError("Hamiltonian " + e->label + " is not quadratic in the reduced variables");
          }
        }
        row.emplace_back(gij, sm.slots);
      }
      term.hess.push_back(std::move(row));
    }
    sm.terms.push_back(std::move(term));
  }
  return sm;
}

// Symmetric banded matrix, upper band storage.
class Band {
 public:
  Band(std::size_t n, std::size_t w) : n_(n), w_(w), a_(n * (w + 1), 0.0) {}
  double& at(std::size_t i, std::size_t j) {  // i <= j <= i + w
    return a_[i * (w_ + 1) + (j - i)];
  }
  void add(std::size_t i, std::size_t j, double v) {
    if (i > j) std::swap(i, j);
    at(i, j) += v;
  }
  std::size_t size() const { return n_; }
  std::size_t width() const { return w_; }

 private:
  std::size_t n_, w_;
  std::vector<double> a_;
};

struct Factorization {
  double log_abs_det = 0.0;
  int signature = 0;
  std::vector<double> solution;
};

// In-place symmetric elimination without pivoting; solves A x = rhs.
Factorization factor_solve(Band& a, std::vector<double> rhs) {
  const std::size_t n = a.size();
  const std::size_t w = a.width();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j <= std::min(n - 1, i + w); ++j) scale = std::max(scale, std::fabs(a.at(i, j)));
  }
  Factorization f;
  for (std::size_t j = 0; j < n; ++j) {
    const double piv = a.at(j, j);
    if (!(std::fabs(piv) > 1e-13 * scale)) throw AnalysisError("caustic: singular slice matrix");
    f.log_abs_det += std::log(std::fabs(piv));
    f.signature += piv > 0 ? 1 : -1;
    const std::size_t end = std::min(n - 1, j + w);
    for (std::size_t i = j + 1; i <= end; ++i) {
      const double l = a.at(j, i) / piv;
      if (l == 0.0) continue;
      for (std::size_t k = i; k <= end; ++k) a.at(i, k) -= l * a.at(j, k);
      rhs[i] -= l * rhs[j];
    }
  }
  f.solution.assign(n, 0.0);
  for (std::size_t jj = n; jj-- > 0;) {
    double s = rhs[jj];
    const std::size_t end = std::min(n - 1, jj + w);
    for (std::size_t k = jj + 1; k <= end; ++k) s -= a.at(jj, k) * f.solution[k];
    f.solution[jj] = s / a.at(jj, jj);
  }
  return f;
}

}  // namespace

void check_quadratic(const ConstraintSet& cs, const NumericContext& ctx) { (void)build_model(cs, ctx); }

std::complex<double> quadratic_amplitude(const ConstraintSet& cs, const NumericContext& ctx, const SlicingPlan& plan,
                                         int slices) {
  if (slices < 2) throw Error("slice count must be at least 2");
  if (!(plan.t1 > plan.t0)) throw Error("propagation interval must have t1 > t0");
  const SliceModel sm = build_model(cs, ctx);
  const std::size_t m = sm.m;
  const auto reduced = cs.reduced_pairs();
  const auto n = static_cast<std::size_t>(slices);

  std::vector<double> qa(m), qb(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Symbol q = reduced[i].first;
    const auto a = plan.initial.find(q);
    const auto b = plan.final.find(q);
    if (a == plan.initial.end() || b == plan.final.end()) throw Error("missing endpoint for " + q.name());
    qa[i] = a->second;
    qb[i] = b->second;
  }
  // Parameter values at each slice boundary.
  std::vector<std::vector<double>> tau(sm.params.size() + 1, std::vector<double>(n + 1));
  const Symbol s_sym = slice_fraction_symbol();
  const std::vector<Symbol> s_slot{s_sym};
  for (std::size_t k = 0; k <= n; ++k) tau[0][k] = plan.t0 + (plan.t1 - plan.t0) * static_cast<double>(k) / slices;
  for (std::size_t j = 0; j < sm.params.size(); ++j) {
    const Symbol q = sm.params[j];
    double a = 0.0, b = 0.0;
    if (auto it = plan.parameter_endpoints.find(q); it != plan.parameter_endpoints.end()) {
      a = it->second.first;
      b = it->second.second;
    }
    std::optional<CompiledExpr> shape;
    if (auto it = plan.interpolation.find(q); it != plan.interpolation.end()) {
      for (Symbol s : it->second.free_symbols()) {
        if (s != s_sym) throw Error("interpolation for " + q.name() + " may depend only on s");
      }
      shape.emplace(it->second, s_slot);
      const double g0 = (*shape)(std::vector<double>{0.0});
      const double g1 = (*shape)(std::vector<double>{1.0});
      if (std::fabs(g0) > 1e-12 || std::fabs(g1 - 1.0) > 1e-12) {
        throw Error("interpolation for " + q.name() + " must satisfy g(0) = 0 and g(1) = 1");
      }
    }
    for (std::size_t k = 0; k <= n; ++k) {
      const double s = static_cast<double>(k) / slices;
      const double g = shape ? (*shape)(std::vector<double>{s}) : s;
      tau[j + 1][k] = a + (b - a) * g;
    }
  }

  // Unknowns: p_0, q_1, p_1, ..., q_{N-1}, p_{N-1}.
  const std::size_t dim = m * (2 * n - 1);
  Band mat(dim, 3 * m);
  std::vector<double> lin(dim, 0.0);
  double constant = 0.0;
  auto p_index = [&](std::size_t k, std::size_t i) { return 2 * m * k + i; };
  auto q_index = [&](std::size_t k, std::size_t i) { return 2 * m * k - m + i; };

  std::vector<double> x(sm.slots.size(), 0.0);
  std::vector<double> g(2 * m);
  std::vector<double> h(4 * m * m);
  for (std::size_t k = 0; k < n; ++k) {
    // S_k = p.(q_{k+1} - q_k) - [H(q_k, p; tau_k) + H(q_{k+1}, p; tau_{k+1})] dt / 2
    // over local variables u = (q_k, q_{k+1}, p_k).
    const std::size_t lm = 3 * m;
    std::vector<double> A(lm * lm, 0.0), b(lm, 0.0);
    for (std::size_t end = 0; end < 2; ++end) {
      for (std::size_t j = 0; j < tau.size(); ++j) x[j] = tau[j][k + end];
      std::fill(g.begin(), g.end(), 0.0);
      std::fill(h.begin(), h.end(), 0.0);
      double h0 = 0.0;
      for (const auto& term : sm.terms) {
        const double dt = 0.5 * (tau[term.param_index][k + 1] - tau[term.param_index][k]);
        if (dt == 0.0) continue;
        h0 += dt * term.value(x);
        for (std::size_t i = 0; i < 2 * m; ++i) {
          g[i] += dt * term.grad[i](x);
          for (std::size_t j = 0; j < 2 * m; ++j) h[i * 2 * m + j] += dt * term.hess[i][j](x);
        }
      }
      constant -= h0;
      // z = (q at this end, p) in terms of u.
      auto zu = [&](std::size_t zi) { return zi < m ? zi + end * m : zi + m; };
      for (std::size_t zi = 0; zi < 2 * m; ++zi) {
        b[zu(zi)] -= g[zi];
        for (std::size_t zj = 0; zj < 2 * m; ++zj) A[zu(zi) * lm + zu(zj)] -= h[zi * 2 * m + zj];
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t p = 2 * m + i, q0 = i, q1 = m + i;
      A[p * lm + q1] += 1.0;
      A[q1 * lm + p] += 1.0;
      A[p * lm + q0] -= 1.0;
      A[q0 * lm + p] -= 1.0;
    }
    // Map local to global: index or fixed value.
    std::vector<std::optional<std::size_t>> gi(lm);
    std::vector<double> fixed(lm, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (k == 0) fixed[i] = qa[i];
      else gi[i] = q_index(k, i);
      if (k + 1 == n) fixed[m + i] = qb[i];
      else gi[m + i] = q_index(k + 1, i);
      gi[2 * m + i] = p_index(k, i);
    }
    for (std::size_t u = 0; u < lm; ++u) {
      if (gi[u]) {
        lin[*gi[u]] += b[u];
      } else {
        constant += b[u] * fixed[u];
      }
      for (std::size_t v = 0; v < lm; ++v) {
        const double a = A[u * lm + v];
        if (a == 0.0) continue;
        if (gi[u] && gi[v]) {
          if (*gi[u] <= *gi[v]) mat.add(*gi[u], *gi[v], a);
        } else if (gi[u] && !gi[v]) {
          lin[*gi[u]] += a * fixed[v];
        } else if (!gi[u] && !gi[v]) {
          constant += 0.5 * a * fixed[u] * fixed[v];
        }
      }
    }
  }
  std::vector<double> rhs(lin.size());
  for (std::size_t i = 0; i < lin.size(); ++i) rhs[i] = -lin[i];
  const Factorization f = factor_solve(mat, rhs);
  double stationary = constant;
  for (std::size_t i = 0; i < lin.size(); ++i) stationary += 0.5 * lin[i] * f.solution[i];

  const double pi = std::numbers::pi;
  const double log_mag = -0.5 * static_cast<double>(m) * std::log(2.0 * pi) - 0.5 * f.log_abs_det;
  const double phase = pi * f.signature / 4.0 + stationary;
  return std::polar(std::exp(log_mag), phase);
}

PropagatorResult propagate_quadratic(const ConstraintSet& cs, const NumericContext& ctx, const SlicingPlan& plan) {
  PropagatorResult res;
  res.regime = "gaussian-exact";
  res.quantity = "amplitude";
  if (plan.slices.empty()) throw Error("empty slice sequence");
  for (int n : plan.slices) {
    int used = n;
    for (int attempt = 0;; ++attempt) {
      try {
        res.raw.push_back(quadratic_amplitude(cs, ctx, plan, used));
        break;
      } catch (const AnalysisError& e) {
        if (std::string(e.what()).rfind("caustic", 0) != 0 || attempt >= 3) throw;
        res.warnings.push_back("caustic at N = " + std::to_string(used) + ", using N = " + std::to_string(used + 1));
        ++used;
      }
    }
    res.n_sequence.push_back(used);
  }
  // Romberg table in h = 1/N, error expansion in h^2.
  std::vector<std::complex<double>> col = res.raw;
  std::complex<double> prev = col.back();
  bool doubling = true;
  for (std::size_t i = 1; i < res.n_sequence.size(); ++i) {
    if (res.n_sequence[i] != 2 * res.n_sequence[i - 1]) doubling = false;
  }
  if (!doubling || col.size() == 1) {
    res.value = col.back();
    res.error = col.size() > 1 ? std::abs(col.back() - col[col.size() - 2]) : std::abs(col.back());
    if (!doubling) res.warnings.push_back("slice sequence is not geometric; no extrapolation");
    return res;
  }
  double factor = 4.0;
  while (col.size() > 1) {
    prev = col.back();
    std::vector<std::complex<double>> next;
    for (std::size_t i = 1; i < col.size(); ++i) next.push_back((factor * col[i] - col[i - 1]) / (factor - 1.0));
    col = std::move(next);
    factor *= 4.0;
  }
  res.value = col.back();
  res.error = std::max(std::abs(res.value - prev), 4.0 * std::numeric_limits<double>::epsilon() * std::abs(res.value));
  return res;
}

}  // namespace hjc
