#include "hjc/legendre.hpp"

#include <algorithm>

#include "hjc/error.hpp"

namespace hjc {

namespace {

bool depends_on_any(const Expr& e, const std::vector<Symbol>& syms) {
  return std::any_of(syms.begin(), syms.end(), [&](Symbol s) { return e.depends_on(s); });
}

std::string index_list(const std::vector<int>& v, const SymbolTable& table) {
  std::string s;
  for (int i : v) s += (s.empty() ? "" : " ") + table.coordinate(i).name();
  return s;
}

}  // namespace

std::vector<Expr> compute_momenta(const SystemSpec& spec) {
  std::vector<Expr> out;
  for (int i = 0; i < spec.dimension(); ++i) out.push_back(differentiate(spec.lagrangian, spec.table.velocity(i)));
  return out;
}

HessianInfo hessian_rank(const SystemSpec& spec) {
  const int n = spec.dimension();
  const auto momenta = compute_momenta(spec);
  const auto& vels = spec.table.velocities();
  HessianInfo info;
  info.hessian.assign(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Expr h = differentiate(momenta[static_cast<std::size_t>(i)], vels[static_cast<std::size_t>(j)]);
      if (depends_on_any(h, vels)) {
        throw AnalysisError("irregular Legendre structure: momentum " + spec.table.momentum(i).name() +
                            " is not linear in the velocities");
      }
      info.hessian[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(h);
    }
  }
  ZeroOracle zero;
  const Elimination el = eliminate(info.hessian, zero);
  info.rank = el.rank;
  if (spec.parameters.empty()) {
    info.solvable = el.pivot_columns;
  } else {
    for (int i = 0; i < n; ++i) {
      const auto& name = spec.coordinates[static_cast<std::size_t>(i)];
      if (std::find(spec.parameters.begin(), spec.parameters.end(), name) == spec.parameters.end()) {
        info.solvable.push_back(i);
      }
    }
    if (static_cast<int>(info.solvable.size()) != info.rank) {
      throw AnalysisError("declared parameters do not match the Hessian: rank " + std::to_string(info.rank) +
                          " needs " + std::to_string(n - info.rank) + " parameter(s), got " +
                          std::to_string(spec.parameters.size()));
    }
    ExprMatrix sub;
    for (int a : info.solvable) {
      std::vector<Expr> row;
      for (int b : info.solvable) row.push_back(info.hessian[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
      sub.push_back(std::move(row));
    }
    if (eliminate(sub, zero).rank != info.rank) {
      throw AnalysisError("irregular Legendre structure: velocities of " + index_list(info.solvable, spec.table) +
                          " cannot be solved for");
    }
  }
  for (int i = 0; i < n; ++i) {
    if (std::find(info.solvable.begin(), info.solvable.end(), i) == info.solvable.end()) info.parameters.push_back(i);
  }
  if (zero.probabilistic()) info.certainty = Certainty::Probabilistic;
  return info;
}

LegendreResult build_constraints(const SystemSpec& spec) {
  const HessianInfo hi = hessian_rank(spec);
  const SymbolTable& table = spec.table;
  const auto& vels = table.velocities();
  LegendreResult res;
  res.momenta = compute_momenta(spec);
  res.hessian = hi.hessian;
  res.rank = hi.rank;
  res.solvable = hi.solvable;
  res.parameters = hi.parameters;
  res.certainty = hi.certainty;

  auto at = [](const auto& v, int i) -> const auto& { return v[static_cast<std::size_t>(i)]; };

  // Velocity-free part of every momentum: p_i = sum_j A_ij v_j + c_i.
  Bindings zero_vel;
  for (Symbol v : vels) zero_vel.emplace(v, Expr());
  std::vector<Expr> offset;
  for (const Expr& p : res.momenta) offset.push_back(substitute(p, zero_vel));

  ExprMatrix a;
  std::vector<Expr> rhs;
  for (int i : res.solvable) {
    std::vector<Expr> row;
    for (int j : res.solvable) row.push_back(at(at(res.hessian, i), j));
    a.push_back(std::move(row));
    Expr r = Expr(table.momentum(i)) - at(offset, i);
    for (int mu : res.parameters) r -= at(at(res.hessian, i), mu) * Expr(table.velocity(mu));
    rhs.push_back(std::move(r));
  }
  ZeroOracle zero;
  auto w = solve(a, rhs, zero);
  if (!w) throw AnalysisError("irregular Legendre structure: singular velocity block");

  Bindings vel_sub;
  for (std::size_t k = 0; k < res.solvable.size(); ++k) {
    res.velocities.emplace(res.solvable[k], (*w)[k]);
    vel_sub.emplace(table.velocity(res.solvable[k]), (*w)[k]);
  }
  for (int mu : res.parameters) {
    const Expr h = -substitute(at(res.momenta, mu), vel_sub);
    if (depends_on_any(h, vels)) {
      throw AnalysisError("non-projectable constraint for " + table.momentum(mu).name() + ": " + h.str());
    }
    res.h_mu.emplace(mu, h);
    res.constraints.emplace(mu, Expr(table.momentum(mu)) + h);
  }

  Expr h0 = -substitute(spec.lagrangian, vel_sub);
  for (int i : res.solvable) h0 += Expr(table.momentum(i)) * res.velocities.at(i);
  for (int mu : res.parameters) h0 -= res.h_mu.at(mu) * Expr(table.velocity(mu));
  for (Symbol v : vels) {
    if (!zero(differentiate(h0, v))) {
      throw AnalysisError("non-projectable constraint: H0 depends on " + v.name());
    }
  }
  // Probabilistically velocity-free: remove any residual dependence.
  h0 = substitute(h0, zero_vel);
  res.h0 = h0;
  if (zero.probabilistic()) res.certainty = Certainty::Probabilistic;
  return res;
}

}  // namespace hjc
