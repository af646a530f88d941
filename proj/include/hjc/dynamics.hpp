#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjc/error.hpp"
#include "hjc/hjanalysis.hpp"

namespace hjc {

/// Numeric definition of an abstract function: name(param) = body.
struct FunctionDefinition {
  std::string name;
  Symbol param;
  Expr body;
};

/// Everything needed to turn symbolic constraint expressions into numbers.
struct NumericContext {
  Bindings constants;
  std::vector<FunctionDefinition> functions;

  /// Substitutes constants and function bodies; throws EvalError when an
  /// abstract function or constant is still unresolved.
  [[nodiscard]] Expr bind(const Expr& e, const PhaseSpace& ps) const;
};

/// Path of one parameter coordinate: an explicit expression in t, or
/// `expression == nullopt` to follow the closure loop's determination.
struct ParameterPath {
  Symbol parameter;
  std::optional<Expr> expression;
};

struct IntegrateOptions {
  double t0 = 0.0;
  double t1 = 1.0;
  double step = 1e-3;
  double ic_tolerance = 1e-9;
  double drift_tolerance = 1e-8;
  bool estimate_error = true;
};

/// Initial condition violating a constraint.
class OffSurfaceError : public Error {
 public:
  OffSurfaceError(std::string label, double residual);
  [[nodiscard]] const std::string& label() const noexcept { return label_; }
  [[nodiscard]] double residual() const noexcept { return residual_; }

 private:
  std::string label_;
  double residual_;
};

struct Trajectory {
  std::vector<std::string> columns;       // t, parameters, reduced q, momenta, p0, Z
  std::vector<std::vector<double>> rows;  // one row per sample
  std::map<std::string, double> drift;    // max |constraint| per label
  double drift_tolerance = 0.0;
  bool flagged = false;
  std::string method = "rk4";
  double step = 0.0;
  int steps = 0;
  double estimated_error = 0.0;  // max state difference against a doubled step, / 15

  [[nodiscard]] std::vector<double> column(const std::string& name) const;
  [[nodiscard]] double action() const;
  /// Header line plus one whitespace-separated row per sample.
  [[nodiscard]] std::string to_text() const;
};

/// Fixed-step RK4 on the total differential system with dt_alpha/dt taken
/// from `paths`. Missing p0 and p_mu in `ic` are filled from their constraints.
Trajectory integrate(const IntegrabilityReport& report, const std::vector<ParameterPath>& paths,
                     const std::map<std::string, double>& ic, const NumericContext& ctx,
                     const IntegrateOptions& opts = {});

/// Z(t1) - Z(t0).
double action(const Trajectory& traj);

}  // namespace hjc
