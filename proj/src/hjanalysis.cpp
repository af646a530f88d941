#include "hjc/hjanalysis.hpp"

#include <algorithm>

#include "hjc/error.hpp"

namespace hjc {

std::optional<Symbol> PhaseSpace::momentum_of(Symbol q) const {
  for (const auto& [a, b] : pairs) {
    if (a == q) return b;
  }
  return std::nullopt;
}

std::optional<Symbol> PhaseSpace::coordinate_of(Symbol p) const {
  for (const auto& [a, b] : pairs) {
    if (b == p) return a;
  }
  return std::nullopt;
}

PhaseSpace PhaseSpace::from_table(const SymbolTable& table) {
  PhaseSpace ps;
  ps.pairs.emplace_back(table.time(), table.time_momentum());
  for (int i = 0; i < table.dimension(); ++i) ps.pairs.emplace_back(table.coordinate(i), table.momentum(i));
  ps.velocities = table.velocities();
  ps.constants = table.constants();
  ps.functions = table.functions();
  return ps;
}

Expr poisson_bracket(const Expr& f, const Expr& g, const PhaseSpace& ps) {
  for (Symbol v : ps.velocities) {
    if (f.depends_on(v) || g.depends_on(v)) {
      throw AnalysisError("poisson bracket of an expression containing velocity " + v.name());
    }
  }
  Expr out;
  for (const auto& [q, p] : ps.pairs) {
    const Expr fq = differentiate(f, q);
    const Expr gp = differentiate(g, p);
    const Expr fp = differentiate(f, p);
    const Expr gq = differentiate(g, q);
    if (!fq.is_zero() && !gp.is_zero()) out += fq * gp;
    if (!fp.is_zero() && !gq.is_zero()) out -= fp * gq;
  }
  return out;
}

std::vector<const ConstraintEntry*> ConstraintSet::parameterized() const {
  std::vector<const ConstraintEntry*> out;
  for (const auto& e : entries) {
    if (!e.generated()) out.push_back(&e);
  }
  return out;
}

std::vector<std::pair<Symbol, Symbol>> ConstraintSet::reduced_pairs() const {
  std::vector<std::pair<Symbol, Symbol>> out;
  for (std::size_t i = 1; i < space.pairs.size(); ++i) {
    if (!find(space.pairs[i].first)) out.push_back(space.pairs[i]);
  }
  return out;
}

const ConstraintEntry* ConstraintSet::find(Symbol parameter) const {
  for (const auto& e : entries) {
    if (e.parameter && *e.parameter == parameter) return &e;
  }
  return nullptr;
}

Expr ConstraintSet::body(const ConstraintEntry& e) const {
  if (!e.parameter) return e.expr;
  return e.expr - Expr(*space.momentum_of(*e.parameter));
}

ConstraintSet make_constraint_set(const SystemSpec& spec, const LegendreResult& lr) {
  ConstraintSet cs;
  cs.space = PhaseSpace::from_table(spec.table);
  cs.entries.push_back({"H'_0", Expr(spec.table.time_momentum()) + lr.h0, spec.table.time(), ""});
  for (const auto& [mu, c] : lr.constraints) {
    cs.entries.push_back({"H'_" + std::to_string(mu + 1), c, spec.table.coordinate(mu), ""});
  }
  return cs;
}

TotalDiffSystem build_total_diff(const ConstraintSet& cs) {
  TotalDiffSystem tds;
  const auto params = cs.parameterized();
  for (const auto* e : params) tds.parameters.push_back(*e->parameter);
  auto row = [&](Symbol var, auto&& coef) {
    TotalDiffRow r{var, {}};
    for (const auto* e : params) r.coefficients.push_back(coef(*e));
    return r;
  };
  const auto reduced = cs.reduced_pairs();
  for (const auto& [q, p] : reduced) {
    tds.dq.push_back(row(q, [&](const ConstraintEntry& e) { return differentiate(e.expr, p); }));
  }
  for (const auto& [q, p] : reduced) {
    tds.dp.push_back(row(p, [&](const ConstraintEntry& e) { return -differentiate(e.expr, q); }));
  }
  for (const auto* pe : params) {
    const Symbol q = *pe->parameter;
    if (q == cs.space.time()) continue;
    tds.dp.push_back(row(*cs.space.momentum_of(q), [&](const ConstraintEntry& e) { return -differentiate(e.expr, q); }));
  }
  tds.dp.push_back(row(cs.space.time_momentum(),
                       [&](const ConstraintEntry& e) { return -differentiate(e.expr, cs.space.time()); }));
  tds.dz = row(Symbol(), [&](const ConstraintEntry& e) {
    Expr z = -cs.body(e);
    for (const auto& [q, p] : reduced) z += Expr(p) * differentiate(e.expr, p);
    return z;
  });
  return tds;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Integrable: return "integrable";
    case Verdict::IntegrableAfterDetermination: return "integrable-after-determination";
    case Verdict::Inconsistent: return "inconsistent";
  }
  return "?";
}

std::vector<ConstraintEntry> IntegrabilityReport::generated() const {
  std::vector<ConstraintEntry> out;
  for (const auto& e : constraints.entries) {
    if (e.generated()) out.push_back(e);
  }
  return out;
}

std::vector<Symbol> IntegrabilityReport::free_parameters() const {
  std::vector<Symbol> out;
  for (const auto* e : constraints.parameterized()) {
    if (!determination(*e->parameter)) out.push_back(*e->parameter);
  }
  return out;
}

const Determination* IntegrabilityReport::determination(Symbol q) const {
  for (const auto& d : determinations) {
    if (d.parameter == q) return &d;
  }
  return nullptr;
}

WeakReducer::WeakReducer(const PhaseSpace& ps, const std::vector<Expr>& constraints) {
  std::vector<Symbol> order;
  for (const auto& pr : ps.pairs) order.push_back(pr.second);
  for (const auto& pr : ps.pairs) order.push_back(pr.first);
  for (const Expr& c : constraints) {
    const Expr r = reduce(c);
    if (r.is_zero()) continue;
    bool done = false;
    for (int pass = 0; pass < 2 && !done; ++pass) {
      for (Symbol v : order) {
        if (!r.depends_on(v)) continue;
        const auto d = differentiate(r, v).constant_value();
        if (!d || *d == 0) continue;
        if (pass == 0 && abs(*d) != 1) continue;
        solved_.emplace_back(v, Expr(v) - r / Expr(*d));
        done = true;
        break;
      }
    }
    if (!done) unsolved_.push_back(r);
  }
}

Expr WeakReducer::reduce(const Expr& e) const {
  Expr out = e;
  for (const auto& [v, s] : solved_) {
    if (out.depends_on(v)) out = substitute(out, Bindings{{v, s}});
  }
  return out;
}

bool WeakReducer::weakly_zero(const Expr& e, ZeroOracle& zero) const {
  const Expr r = reduce(e);
  if (zero(r)) return true;
  for (const Expr& u : unsolved_) {
    const Expr u_r = reduce(u);
    if (u_r.is_zero()) continue;
    if ((r / u_r).is_constant()) return true;
  }
  return false;
}

namespace {

Rational content(const Poly& p) {
  mpz_class num = 0, den = 1;
  for (const auto& [m, c] : p) {
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), c.get_num().get_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
  }
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Integer-primitive scaling; the sign makes the last momentum with a constant
// coefficient positive.
Expr normalize_constraint(const Expr& e, const PhaseSpace& ps) {
  Expr out = e / Expr(content(e.numerator()));
  for (auto it = ps.pairs.rbegin(); it != ps.pairs.rend(); ++it) {
    const auto d = differentiate(out, it->second).constant_value();
    if (d && *d != 0) return *d < 0 ? -out : out;
  }
  return poly::leading_coefficient(out.numerator()) < 0 ? -out : out;
}

int label_number(const std::string& label) {
  const auto pos = label.find('_');
  if (pos == std::string::npos) return -1;
  try {
    return std::stoi(label.substr(pos + 1));
  } catch (const std::exception&) {
    return -1;
  }
}

}  // namespace

IntegrabilityReport closure_loop(const ConstraintSet& cs, int max_iter) {
  if (max_iter < 1) throw AnalysisError("max_iter must be at least 1");
  IntegrabilityReport rep;
  rep.constraints = cs;
  ZeroOracle zero;
  auto& entries = rep.constraints.entries;
  const PhaseSpace& ps = rep.constraints.space;
  const Symbol t = ps.time();

  std::string prefix = "H'";
  int next_label = 0;
  for (const auto& e : entries) {
    next_label = std::max(next_label, label_number(e.label) + 1);
    if (e.parameter && *e.parameter == t) prefix = e.label.substr(0, e.label.find('_'));
  }

  std::map<std::pair<std::size_t, std::size_t>, Expr> cache;
  auto finish = [&](Verdict v, int pass) {
    rep.verdict = v;
    rep.iterations = pass;
    if (zero.probabilistic()) rep.certainty = Certainty::Probabilistic;
    return rep;
  };

  for (int pass = 1;; ++pass) {
    if (pass > max_iter) {
      throw AnalysisError("closure loop did not terminate within " + std::to_string(max_iter) + " iterations");
    }
    std::vector<std::size_t> par;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (!entries[i].generated()) par.push_back(i);
    }
    rep.labels.clear();
    rep.brackets.assign(entries.size(), {});
    bool all_zero = true;
    for (std::size_t g = 0; g < entries.size(); ++g) {
      rep.labels.push_back(entries[g].label);
      for (std::size_t a : par) {
        auto key = std::make_pair(g, a);
        auto it = cache.find(key);
        if (it == cache.end()) {
          it = cache.emplace(key, poisson_bracket(entries[g].expr, entries[a].expr, ps)).first;
        }
        rep.brackets[g].push_back(it->second);
        if (!zero(it->second)) all_zero = false;
      }
    }
    const bool closed_before = !rep.determinations.empty() || !rep.generated().empty();
    if (all_zero) return finish(closed_before ? Verdict::IntegrableAfterDetermination : Verdict::Integrable, pass);

    std::vector<Expr> bodies;
    for (const auto& e : entries) bodies.push_back(e.expr);
    WeakReducer reducer(ps, bodies);

    std::vector<std::size_t> free_cols;
    std::size_t t_col = 0;
    for (std::size_t k = 0; k < par.size(); ++k) {
      const Symbol q = *entries[par[k]].parameter;
      if (q == t) t_col = k;
      else if (!rep.determination(q)) free_cols.push_back(k);
    }

    struct DetRow {
      std::vector<Rational> coef;  // per free column
      Expr rhs;
      std::string source;
    };
    std::vector<DetRow> det_rows;
    std::vector<std::pair<Expr, std::string>> candidates;

    for (std::size_t g = 0; g < entries.size(); ++g) {
      const auto& row = rep.brackets[g];
      Expr c0 = row[t_col];
      for (std::size_t k = 0; k < par.size(); ++k) {
        if (const auto* d = rep.determination(*entries[par[k]].parameter)) c0 += row[k] * d->rate;
      }
      const bool c0_zero = reducer.weakly_zero(c0, zero);
      std::vector<std::size_t> live;
      for (std::size_t k : free_cols) {
        if (!reducer.weakly_zero(row[k], zero)) live.push_back(k);
      }
      if (c0_zero && live.empty()) continue;
      const std::string src = "d" + entries[g].label;
      std::vector<std::size_t> constant_cols;
      for (std::size_t k : live) {
        if (reducer.reduce(row[k]).is_constant()) constant_cols.push_back(k);
      }
      if (!constant_cols.empty()) {
        if (constant_cols.size() != live.size()) {
          rep.diagnostics.push_back("undetermined direction in " + src);
          return finish(Verdict::Inconsistent, pass);
        }
        DetRow dr{{}, -c0, src};
        for (std::size_t k : free_cols) {
          const auto v = reducer.reduce(row[k]).constant_value();
          dr.coef.push_back(std::find(live.begin(), live.end(), k) != live.end() && v ? *v : Rational(0));
        }
        det_rows.push_back(std::move(dr));
        continue;
      }
      if (!c0_zero) candidates.emplace_back(reducer.reduce(c0), "coefficient of d" + t.name() + " in " + src);
      for (std::size_t k : live) {
        candidates.emplace_back(reducer.reduce(row[k]),
                                "coefficient of d" + entries[par[k]].parameter->name() + " in " + src);
      }
    }

    bool changed = false;

    // Joint solve of determination rows over the rationals.
    std::size_t r = 0;
    for (std::size_t c = 0; c < free_cols.size() && r < det_rows.size(); ++c) {
      std::size_t piv = det_rows.size();
      for (std::size_t i = r; i < det_rows.size(); ++i) {
        if (det_rows[i].coef[c] != 0) {
          piv = i;
          break;
        }
      }
      if (piv == det_rows.size()) continue;
      std::swap(det_rows[r], det_rows[piv]);
      const Rational pv = det_rows[r].coef[c];
      for (auto& x : det_rows[r].coef) x /= pv;
      det_rows[r].rhs = det_rows[r].rhs / Expr(pv);
      for (std::size_t i = 0; i < det_rows.size(); ++i) {
        if (i == r || det_rows[i].coef[c] == 0) continue;
        const Rational f = det_rows[i].coef[c];
        for (std::size_t j = 0; j < free_cols.size(); ++j) det_rows[i].coef[j] -= f * det_rows[r].coef[j];
        det_rows[i].rhs -= Expr(f) * det_rows[r].rhs;
        det_rows[i].source += "," + det_rows[r].source;
      }
      ++r;
    }
    for (std::size_t i = 0; i < det_rows.size(); ++i) {
      std::vector<std::size_t> nz;
      for (std::size_t j = 0; j < free_cols.size(); ++j) {
        if (det_rows[i].coef[j] != 0) nz.push_back(j);
      }
      if (nz.empty()) {
        if (!reducer.weakly_zero(det_rows[i].rhs, zero)) {
          rep.diagnostics.push_back("conflicting determinations from " + det_rows[i].source);
          return finish(Verdict::Inconsistent, pass);
        }
        continue;
      }
      if (nz.size() > 1) {
        rep.diagnostics.push_back("undetermined direction in " + det_rows[i].source);
        return finish(Verdict::Inconsistent, pass);
      }
      const Symbol q = *entries[par[free_cols[nz.front()]]].parameter;
      rep.determinations.push_back({q, det_rows[i].rhs, det_rows[i].source});
      changed = true;
    }

    std::vector<Expr> accepted = bodies;
    for (auto& [cand, src] : candidates) {
      if (cand.is_constant()) {
        rep.diagnostics.push_back("inconsistent constraint " + cand.str() + " = 0 from " + src);
        return finish(Verdict::Inconsistent, pass);
      }
      if (WeakReducer(ps, accepted).weakly_zero(cand, zero)) continue;
      const Expr c = normalize_constraint(cand, ps);
      accepted.push_back(c);
      entries.push_back({prefix + "_" + std::to_string(next_label++), c, std::nullopt, src});
      changed = true;
    }

    if (!changed) {
      if (!closed_before) rep.diagnostics.push_back("brackets vanish on the constraint surface only");
      return finish(Verdict::IntegrableAfterDetermination, pass);
    }
  }
}

}  // namespace hjc
