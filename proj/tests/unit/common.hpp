#pragma once

#include <string>

#include "hjc/cli.hpp"
#include "hjc/parser.hpp"

namespace testing {

inline std::string system_path(const std::string& name) { return std::string(HJC_SYSTEMS_DIR) + "/" + name + ".hjs"; }

inline hjc::Pipeline pipeline(const std::string& name, const std::optional<std::string>& transform = std::nullopt) {
  return hjc::run_pipeline(hjc::load_system(system_path(name)), transform);
}

inline hjc::Expr parse(const std::string& text, const hjc::SymbolTable& table) {
  return hjc::parse_expression(text, table);
}

inline bool proven_zero(const hjc::Expr& e) {
  const auto z = hjc::is_zero(e);
  return z.zero && z.certainty == hjc::Certainty::Proven;
}

}  // namespace testing
