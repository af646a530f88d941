#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hjc/canontrans.hpp"

namespace hjc {

struct ReportConstraint {
  std::string label;
  Expr expr;
  std::string parameter;  // empty for generated entries
  std::string provenance;
};

struct ReportRow {
  std::string variable;
  std::vector<Expr> coefficients;  // aligned with the parameter list
};

struct ReportDetermination {
  std::string parameter;
  Expr rate;
  std::string source;
};

/// Closure results for one constraint set (original or transformed).
struct ReportAnalysis {
  std::vector<ReportConstraint> constraints;
  std::vector<std::string> parameters;  // of the total differential system
  std::vector<ReportRow> dq, dp;
  ReportRow dz;
  std::vector<std::string> bracket_labels;
  std::vector<std::vector<Expr>> brackets;
  std::vector<ReportDetermination> determinations;
  std::string verdict;
  int iterations = 0;
  std::vector<std::string> free_parameters;
};

struct ReportTransformation {
  std::string name;
  std::vector<std::string> new_coordinates;
  std::vector<std::string> parameters;
  bool canonical = false;
  bool waived = false;
  std::vector<std::string> failures;
  std::vector<std::string> domain_restrictions;
  ReportAnalysis analysis;
};

struct AnalysisReport {
  std::string system;
  std::vector<std::string> coordinates;
  std::map<std::string, std::optional<Rational>> constants;
  std::map<std::string, int> functions;
  Expr lagrangian;
  std::vector<Expr> momenta;
  std::vector<std::vector<Expr>> hessian;
  int rank = 0;
  std::vector<std::string> solvable;
  std::vector<std::string> parameters;
  Expr h0;
  ReportAnalysis analysis;
  std::optional<ReportTransformation> transformation;
  std::vector<std::string> warnings;
  std::string certainty = "proven";

  [[nodiscard]] int independent_parameters() const {
    const auto& a = transformation ? transformation->analysis : analysis;
    return static_cast<int>(a.free_parameters.size());
  }
};

ReportAnalysis summarize(const IntegrabilityReport& rep);

AnalysisReport make_report(const SystemSpec& spec, const LegendreResult& lr, const IntegrabilityReport& rep,
                           const TransformResult* tr = nullptr, const IntegrabilityReport* trep = nullptr);

/// Deterministic JSON rendering; expressions are grammar strings.
std::string report_to_json(const AnalysisReport& r, int indent = 2);
/// Inverse of report_to_json. Throws ParseError on malformed input.
AnalysisReport report_from_json(std::string_view text);
std::string report_to_text(const AnalysisReport& r);

}  // namespace hjc
