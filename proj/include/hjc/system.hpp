#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hjc/expr.hpp"
#include "hjc/symbols.hpp"

namespace hjc {

/// A `[transformation <name>]` block: new coordinates (with momenta `P_<name>`),
/// which of them act as parameters, and the old phase-space variables written
/// in terms of the new ones.
struct TransformationSpec {
  std::string name;
  std::vector<std::string> new_coordinates;
  std::vector<std::string> parameters;
  SymbolTable table;  // new coordinates, momenta, t, p0, constants, functions
  std::vector<std::pair<Symbol, Expr>> substitutions;  // old symbol -> expression in new symbols
};

struct SystemSpec {
  std::string name;
  std::vector<std::string> coordinates;
  /// Optional explicit choice of parameter coordinates; empty means automatic.
  std::vector<std::string> parameters;
  SymbolTable table;
  Expr lagrangian;
  std::string lagrangian_source;
  std::map<std::string, std::optional<Rational>> constants;
  std::vector<TransformationSpec> transformations;

  [[nodiscard]] int dimension() const { return static_cast<int>(coordinates.size()); }
  [[nodiscard]] const TransformationSpec* find_transformation(std::string_view name) const;
  /// Constant values known from the file, as substitution bindings.
  [[nodiscard]] Bindings constant_bindings() const;
};

/// Parses the sectioned `.hjs` format:
///
///   [system]
///   name = second_class
///   coordinates = q1 q2 q3
///   parameters = q2            (optional)
///   potential V(1)             (optional, repeatable)
///   lagrangian = <expression>
///   [constants]
///   a1 = 1                     (or a bare `a1` for a symbolic constant)
///   [transformation radial]
///   new = R y z
///   params = y z
///   x = sqrt(R^2 - y^2 - z^2)
///   p_x = ...
///
/// `#` starts a comment line. Unknown sections and keys are errors. Throws
/// ParseError carrying the offending line.
SystemSpec parse_system(std::string_view contents);

/// Reads and parses a file; throws Error("cannot read file ...") when the
/// file is not readable.
SystemSpec load_system(const std::string& path);

}  // namespace hjc
