#pragma once

#include <map>
#include <vector>

#include "hjc/linalg.hpp"
#include "hjc/system.hpp"

namespace hjc {

/// p_i = dL/d(q_i_dot), in coordinate order.
std::vector<Expr> compute_momenta(const SystemSpec& spec);

struct HessianInfo {
  ExprMatrix hessian;
  int rank = 0;
  std::vector<int> solvable;    // indices a, ascending
  std::vector<int> parameters;  // indices mu, ascending
  Certainty certainty = Certainty::Proven;
};

/// Velocity Hessian, its rank, and the split into solvable velocities and
/// parameters. Pivot columns are chosen lowest index first unless the system
/// names its parameters explicitly.
HessianInfo hessian_rank(const SystemSpec& spec);

struct LegendreResult {
  std::vector<Expr> momenta;
  ExprMatrix hessian;
  int rank = 0;
  std::vector<int> solvable;
  std::vector<int> parameters;
  std::map<int, Expr> velocities;  // a -> w_a(q, p_a, q_mu_dot, t)
  Expr h0;
  std::map<int, Expr> h_mu;         // mu -> H_mu
  std::map<int, Expr> constraints;  // mu -> H'_mu = p_mu + H_mu
  Certainty certainty = Certainty::Proven;

  /// Number of parameter coordinates (the Hessian's nullity).
  [[nodiscard]] int parameter_count() const { return static_cast<int>(parameters.size()); }
};

/// Solves the momentum relations for the solvable velocities and assembles
/// H0 and the primary constraints. Throws AnalysisError for Lagrangians that
/// are not quadratic in the velocities ("irregular Legendre structure") or
/// whose unsolvable momentum relations keep a velocity ("non-projectable
/// constraint").
LegendreResult build_constraints(const SystemSpec& spec);

}  // namespace hjc
