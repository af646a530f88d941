#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjc/legendre.hpp"

namespace hjc {

/// Canonical pairs of the extended phase space, (t, p0) first.
struct PhaseSpace {
  std::vector<std::pair<Symbol, Symbol>> pairs;
  std::vector<Symbol> velocities;
  std::vector<Symbol> constants;
  std::map<std::string, int> functions;

  [[nodiscard]] Symbol time() const { return pairs.front().first; }
  [[nodiscard]] Symbol time_momentum() const { return pairs.front().second; }
  /// Momentum conjugate to `q`, if `q` is a coordinate (or t).
  [[nodiscard]] std::optional<Symbol> momentum_of(Symbol q) const;
  [[nodiscard]] std::optional<Symbol> coordinate_of(Symbol p) const;

  static PhaseSpace from_table(const SymbolTable& table);
};

/// Extended Poisson bracket over every pair in `ps`. Throws AnalysisError if
/// either argument contains a velocity.
Expr poisson_bracket(const Expr& f, const Expr& g, const PhaseSpace& ps);

struct ConstraintEntry {
  std::string label;                // H'_0, H'_2, ...
  Expr expr;                        // H'_alpha
  std::optional<Symbol> parameter;  // t or q_mu; empty for generated entries
  std::string provenance;           // how a generated entry arose

  [[nodiscard]] bool generated() const { return !parameter.has_value(); }
};

struct ConstraintSet {
  PhaseSpace space;
  std::vector<ConstraintEntry> entries;

  [[nodiscard]] std::vector<const ConstraintEntry*> parameterized() const;
  /// Coordinates that are not parameters, with their momenta.
  [[nodiscard]] std::vector<std::pair<Symbol, Symbol>> reduced_pairs() const;
  [[nodiscard]] const ConstraintEntry* find(Symbol parameter) const;
  /// H_alpha = H'_alpha - p_alpha for a parameterized entry.
  [[nodiscard]] Expr body(const ConstraintEntry& e) const;
};

/// H'_0 = p0 + H0 with parameter t, then H'_mu with parameter q_mu.
ConstraintSet make_constraint_set(const SystemSpec& spec, const LegendreResult& lr);

struct TotalDiffRow {
  Symbol variable;                // q_a, p_a, p_mu, p0, or empty for dZ
  std::vector<Expr> coefficients;  // one per parameter, in ConstraintSet::parameterized() order
};

struct TotalDiffSystem {
  std::vector<Symbol> parameters;  // t, q_mu...
  std::vector<TotalDiffRow> dq;    // reduced coordinates
  std::vector<TotalDiffRow> dp;    // reduced momenta, then p_mu, then p0
  TotalDiffRow dz;
};

TotalDiffSystem build_total_diff(const ConstraintSet& cs);

enum class Verdict { Integrable, IntegrableAfterDetermination, Inconsistent };
std::string verdict_name(Verdict v);

struct Determination {
  Symbol parameter;
  Expr rate;  // dq_mu = rate * dt
  std::string source;
};

struct IntegrabilityReport {
  ConstraintSet constraints;  // final working set, generated entries appended
  std::vector<std::string> labels;          // row/column labels of `brackets`
  std::vector<std::vector<Expr>> brackets;  // [H'_gamma, H'_alpha], alpha over parameterized entries
  std::vector<Determination> determinations;
  Verdict verdict = Verdict::Integrable;
  int iterations = 0;
  std::vector<std::string> diagnostics;
  Certainty certainty = Certainty::Proven;

  [[nodiscard]] std::vector<ConstraintEntry> generated() const;
  /// t plus every parameter that was not determined.
  [[nodiscard]] std::vector<Symbol> free_parameters() const;
  [[nodiscard]] const Determination* determination(Symbol q) const;
};

/// Integrability and closure loop. Throws AnalysisError when more than
/// `max_iter` passes are needed.
IntegrabilityReport closure_loop(const ConstraintSet& cs, int max_iter = 16);

/// Reduces `e` modulo the constraint expressions (solving each for a variable
/// in which it is linear with a constant coefficient). Exposed for tests and
/// for the transformation module.
class WeakReducer {
 public:
  WeakReducer(const PhaseSpace& ps, const std::vector<Expr>& constraints);
  [[nodiscard]] Expr reduce(const Expr& e) const;
  [[nodiscard]] bool weakly_zero(const Expr& e, ZeroOracle& zero) const;

 private:
  std::vector<std::pair<Symbol, Expr>> solved_;
  std::vector<Expr> unsolved_;
};

}  // namespace hjc
