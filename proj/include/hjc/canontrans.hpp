#pragma once

#include <string>
#include <vector>

#include "hjc/hjanalysis.hpp"

namespace hjc {

struct BracketCheck {
  std::string left, right;
  Expr value;
  int expected;
  bool ok;
};

struct CanonicityCertificate {
  bool passed = false;
  std::vector<BracketCheck> checks;
  /// Principal-branch conditions implied by sqrt/log in the substitutions.
  std::vector<std::string> domain_restrictions;
  Certainty certainty = Certainty::Proven;

  [[nodiscard]] std::vector<std::string> failures() const;
};

/// Brackets of the old coordinates and momenta, written in the new variables
/// and evaluated with the new canonical pairs, must form the canonical table.
CanonicityCertificate check_canonicity(const PhaseSpace& old_space, const TransformationSpec& tr);

struct TransformResult {
  std::string name;
  ConstraintSet constraints;  // K'_alpha over the new phase space
  CanonicityCertificate certificate;
  bool waived = false;
};

/// Substitutes the transformation into every constraint and re-solves each
/// parameterized one for its new momentum. Throws AnalysisError when the
/// certificate fails (unless `waive_canonicity`), when an old symbol survives
/// the substitution, or when a transformed constraint is not linear with
/// constant coefficient in its new momentum.
TransformResult apply_transformation(const ConstraintSet& cs, const TransformationSpec& tr,
                                     bool waive_canonicity = false);

}  // namespace hjc
