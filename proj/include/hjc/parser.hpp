#pragma once

#include <optional>
#include <set>
#include <string_view>

#include "hjc/expr.hpp"
#include "hjc/symbols.hpp"

namespace hjc {

/// Parses an expression of the form
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?          (right associative)
///   primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Numbers are integers or decimals (with optional exponent) and are read
/// exactly. Exponents must fold to an integer or half-integer constant.
/// Identifiers resolve through `table`; an abstract function name may carry
/// trailing primes for its derivatives (`V'(u)`). Juxtaposition is an error.
///
/// When `allowed` is given, symbols whose role is not listed are rejected as
/// undeclared. Errors are ParseError with a 1-based byte offset.
Expr parse_expression(std::string_view src, const SymbolTable& table,
                      const std::optional<std::set<Role>>& allowed = std::nullopt);

}  // namespace hjc
