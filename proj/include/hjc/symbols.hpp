#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hjc/expr.hpp"

namespace hjc {

enum class Role { Coordinate, Velocity, Momentum, Time, TimeMomentum, Constant };

std::string_view role_name(Role r);

struct SymbolInfo {
  Symbol symbol;
  Role role;
  int index = -1;  // coordinate index for coordinate/velocity/momentum, else -1
};

/// Ordered registry of the symbols a system may mention. Every coordinate
/// brings a velocity and a momentum partner; time `t` and its conjugate `p0`
/// are always present. Abstract functions are tracked by name and arity.
class SymbolTable {
 public:
  SymbolTable();

  /// Adds coordinate `name` with velocity `<name>_dot` and the given momentum
  /// name (defaults to `momentum_name_for(name)`). Returns the index.
  int add_coordinate(const std::string& name, std::optional<std::string> momentum = std::nullopt);
  void add_constant(const std::string& name);
  void add_function(const std::string& name, int arity);

  [[nodiscard]] std::optional<SymbolInfo> find(std::string_view name) const;
  [[nodiscard]] std::optional<SymbolInfo> info(Symbol s) const;
  [[nodiscard]] bool contains(Symbol s) const { return info(s).has_value(); }
  /// Throws SymbolError naming `name` when absent.
  [[nodiscard]] Symbol lookup(std::string_view name) const;

  [[nodiscard]] int dimension() const { return static_cast<int>(coords_.size()); }
  [[nodiscard]] Symbol coordinate(int i) const { return coords_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] Symbol velocity(int i) const { return vels_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] Symbol momentum(int i) const { return moms_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] Symbol time() const { return time_; }
  [[nodiscard]] Symbol time_momentum() const { return time_momentum_; }
  [[nodiscard]] const std::vector<Symbol>& coordinates() const { return coords_; }
  [[nodiscard]] const std::vector<Symbol>& velocities() const { return vels_; }
  [[nodiscard]] const std::vector<Symbol>& momenta() const { return moms_; }
  [[nodiscard]] const std::vector<Symbol>& constants() const { return consts_; }
  [[nodiscard]] const std::map<std::string, int>& functions() const { return functions_; }
  [[nodiscard]] std::optional<int> function_arity(std::string_view name) const;
  [[nodiscard]] const std::vector<SymbolInfo>& entries() const { return entries_; }

 private:
  void add_entry(const std::string& name, Role role, int index);

  std::vector<SymbolInfo> entries_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
  std::vector<Symbol> coords_, vels_, moms_, consts_;
  Symbol time_, time_momentum_;
  std::map<std::string, int> functions_;
};

/// `q3` -> `p3`; any other name `x` -> `p_x`.
std::string momentum_name_for(const std::string& coordinate);
std::string velocity_name_for(const std::string& coordinate);

/// Builtin unary functions of the expression grammar.
bool is_builtin_function(std::string_view name);

/// Name-checked front ends: unknown names raise SymbolError naming the symbol.
Expr differentiate(const Expr& e, std::string_view name, const SymbolTable& table);
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings,
                const SymbolTable& table);

}  // namespace hjc
