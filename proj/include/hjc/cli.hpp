#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjc/pathint.hpp"
#include "hjc/report.hpp"

namespace hjc {

/// Full symbolic pipeline for one system, optionally followed by a
/// transformation.
struct Pipeline {
  SystemSpec spec;
  LegendreResult legendre;
  IntegrabilityReport report;
  std::optional<TransformResult> transform;
  std::optional<IntegrabilityReport> transformed;

  /// The closure report that dynamics and propagators should use.
  [[nodiscard]] const IntegrabilityReport& active() const { return transformed ? *transformed : report; }
  [[nodiscard]] const SymbolTable& active_table() const;
  [[nodiscard]] AnalysisReport make_report() const;
};

Pipeline run_pipeline(SystemSpec spec, const std::optional<std::string>& transform = std::nullopt,
                      int max_iter = 16, bool waive_canonicity = false);

/// "a=1,b=-0.5" -> {a: 1, b: -0.5}.
std::map<std::string, double> parse_assignments(const std::string& text);
/// "V(u)=u/2" with the system's constants and functions in scope.
FunctionDefinition parse_definition(const std::string& text, const SymbolTable& table);
/// Builds the numeric context from file constants, "--const" overrides, and definitions.
NumericContext make_context(const SystemSpec& spec, const std::vector<std::string>& consts,
                            const std::vector<std::string>& defines);
/// "q2=<expr in t>", "q2=determined", or bare "determined" (every parameter).
std::vector<ParameterPath> parse_paths(const std::vector<std::string>& specs, const IntegrabilityReport& rep,
                                       const SymbolTable& table);

/// Command-line entry point. Exit codes: 0 success, 1 usage or input error,
/// 2 inconsistent verdict or off-surface initial condition.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hjc
