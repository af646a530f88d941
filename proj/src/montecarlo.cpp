#include <algorithm>
#include <cmath>
#include <random>

#include "hjc/error.hpp"
#include "hjc/pathint.hpp"

namespace hjc {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11U) * 0x1.0p-53; }

}  // namespace

PropagatorResult propagate_euclidean_mc(const ConstraintSet& cs, const NumericContext& ctx,
                                        const MonteCarloOptions& opts) {
  if (opts.slices < 2) throw Error("slice count must be at least 2");
  if (!(opts.beta > 0)) throw Error("beta must be positive");
  if (opts.sweeps < opts.bins || opts.bins < 2) throw Error("need at least as many sweeps as bins (>= 2)");
  const PhaseSpace& ps = cs.space;
  for (const auto& e : cs.entries) {
    if (e.generated()) throw AnalysisError("Monte Carlo does not support generated constraints (" + e.label + ")");
  }
  const auto reduced = cs.reduced_pairs();
  const std::size_t m = reduced.size();
  if (m == 0) throw AnalysisError("no reduced degrees of freedom");

  // Split H0 into sum p^2/(2 mass) + U(q); other Hamiltonians must not touch the reduced variables.
  Expr h;
  for (const auto* e : cs.parameterized()) {
    const Expr body = ctx.bind(cs.body(*e), ps);
    if (*e->parameter == ps.time()) {
      h = body;
      continue;
    }
    for (const auto& [q, p] : reduced) {
      if (body.depends_on(q) || body.depends_on(p)) {
        throw AnalysisError("Hamiltonian " + e->label + " couples to the reduced variables");
      }
    }
  }
  std::vector<Symbol> qs;
  Bindings no_p;
  for (const auto& [q, p] : reduced) {
    qs.push_back(q);
    no_p.emplace(p, Expr());
  }
  const Expr u = substitute(h, no_p);
  const Expr kinetic = h - u;
  std::vector<double> mass(m);
  Expr check = kinetic;
  for (std::size_t a = 0; a < m; ++a) {
    const Expr pa(reduced[a].second);
    const auto c = differentiate(differentiate(kinetic, reduced[a].second), reduced[a].second).constant_value();
    if (!c || *c <= 0) throw AnalysisError("Hamiltonian is not of the form sum p^2/(2m) + U(q)");
    mass[a] = 1.0 / c->get_d();
    check -= Expr(Rational(*c / 2)) * pa * pa;
  }
  if (!check.is_zero()) throw AnalysisError("Hamiltonian is not of the form sum p^2/(2m) + U(q)");
  for (Symbol s : u.free_symbols()) {
    if (std::find(qs.begin(), qs.end(), s) == qs.end()) {
      throw AnalysisError("potential depends on " + s.name() + "; only the reduced coordinates are allowed");
    }
  }
  const CompiledExpr pot(u, qs);

  const auto n = static_cast<std::size_t>(opts.slices);
  const double eps = opts.beta / static_cast<double>(n);
  std::vector<double> x(n * m, 0.0);
  std::vector<double> site(m);
  std::vector<double> delta(m);
  for (std::size_t a = 0; a < m; ++a) delta[a] = 2.0 * std::sqrt(eps / mass[a]);
  std::mt19937_64 rng(opts.seed);
  auto potential_at = [&](std::size_t k) {
    std::copy(x.begin() + static_cast<long>(k * m), x.begin() + static_cast<long>((k + 1) * m), site.begin());
    return pot(site);
  };

  long accepted = 0, proposed = 0;
  auto sweep = [&]() {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t prev = (k + n - 1) % n, next = (k + 1) % n;
      for (std::size_t a = 0; a < m; ++a) {
        double& xi = x[k * m + a];
        const double old = xi;
        const double u_old = potential_at(k);
        const double prop = old + delta[a] * (2.0 * uniform01(rng) - 1.0);
        const double xp = x[prev * m + a], xn = x[next * m + a];
        const double kin_old = (xn - old) * (xn - old) + (old - xp) * (old - xp);
        const double kin_new = (xn - prop) * (xn - prop) + (prop - xp) * (prop - xp);
        xi = prop;
        const double u_new = potential_at(k);
        const double ds = mass[a] / (2.0 * eps) * (kin_new - kin_old) + eps * (u_new - u_old);
        ++proposed;
        if (ds <= 0.0 || uniform01(rng) < std::exp(-ds)) {
          ++accepted;
        } else {
          xi = old;
        }
      }
    }
  };

  for (long s = 0; s < opts.thermalization; ++s) sweep();
  accepted = proposed = 0;
  const long per_bin = opts.sweeps / opts.bins;
  std::vector<double> bin_means;
  double total = 0.0;
  long count = 0;
  for (int b = 0; b < opts.bins; ++b) {
    double acc = 0.0;
    for (long s = 0; s < per_bin; ++s) {
      sweep();
      double e = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t next = (k + 1) % n;
        for (std::size_t a = 0; a < m; ++a) {
          const double d = x[next * m + a] - x[k * m + a];
          e += 0.5 / eps - mass[a] * d * d / (2.0 * eps * eps);
        }
        e += potential_at(k);
      }
      acc += e / static_cast<double>(n);
    }
    bin_means.push_back(acc / static_cast<double>(per_bin));
    total += acc;
    count += per_bin;
  }
  const double mean = total / static_cast<double>(count);
  double var = 0.0;
  for (double v : bin_means) var += (v - mean) * (v - mean);
  var /= static_cast<double>(bin_means.size() - 1);

  PropagatorResult res;
  res.regime = "euclidean-mc";
  res.quantity = "ground-state-energy";
  res.value = mean;
  res.error = std::sqrt(var / static_cast<double>(bin_means.size()));
  res.n_sequence = {opts.slices};
  res.raw = {mean};
  res.acceptance = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  return res;
}

}  // namespace hjc
