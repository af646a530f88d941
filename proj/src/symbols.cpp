#include "hjc/symbols.hpp"

#include <cctype>

#include "hjc/error.hpp"

namespace hjc {

std::string_view role_name(Role r) {
  switch (r) {
    case Role::Coordinate: return "coordinate";
    case Role::Velocity: return "velocity";
    case Role::Momentum: return "momentum";
    case Role::Time: return "time";
    case Role::TimeMomentum: return "time-momentum";
    case Role::Constant: return "constant";
  }
  return "unknown";
}

std::string momentum_name_for(const std::string& coordinate) {
  if (coordinate.size() > 1 && coordinate[0] == 'q') {
    bool digits = true;
    for (std::size_t i = 1; i < coordinate.size(); ++i) {
      digits = digits && std::isdigit(static_cast<unsigned char>(coordinate[i])) != 0;
    }
    if (digits) return "p" + coordinate.substr(1);
  }
  return "p_" + coordinate;
}

std::string velocity_name_for(const std::string& coordinate) { return coordinate + "_dot"; }

bool is_builtin_function(std::string_view name) {
  return name == "sin" || name == "cos" || name == "exp" || name == "sqrt" || name == "log";
}

SymbolTable::SymbolTable() {
  add_entry("t", Role::Time, -1);
  time_ = Symbol::intern("t");
  add_entry("p0", Role::TimeMomentum, -1);
  time_momentum_ = Symbol::intern("p0");
}

void SymbolTable::add_entry(const std::string& name, Role role, int index) {
  if (name.empty()) throw SymbolError("empty symbol name");
  if (by_name_.count(name) || functions_.count(name) || is_builtin_function(name)) {
    throw SymbolError("duplicate symbol " + name);
  }
  by_name_.emplace(name, entries_.size());
  entries_.push_back(SymbolInfo{Symbol::intern(name), role, index});
}

int SymbolTable::add_coordinate(const std::string& name, std::optional<std::string> momentum) {
  const int idx = dimension();
  const std::string mom = momentum ? *momentum : momentum_name_for(name);
  add_entry(name, Role::Coordinate, idx);
  add_entry(velocity_name_for(name), Role::Velocity, idx);
  add_entry(mom, Role::Momentum, idx);
  coords_.push_back(Symbol::intern(name));
  vels_.push_back(Symbol::intern(velocity_name_for(name)));
  moms_.push_back(Symbol::intern(mom));
  return idx;
}

void SymbolTable::add_constant(const std::string& name) {
  add_entry(name, Role::Constant, -1);
  consts_.push_back(Symbol::intern(name));
}

void SymbolTable::add_function(const std::string& name, int arity) {
  if (by_name_.count(name) || functions_.count(name) || is_builtin_function(name)) {
    throw SymbolError("duplicate symbol " + name);
  }
  if (arity != 1) throw SymbolError("abstract function " + name + ": only unary functions are supported");
  functions_.emplace(name, arity);
}

std::optional<SymbolInfo> SymbolTable::find(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return entries_[it->second];
}

std::optional<SymbolInfo> SymbolTable::info(Symbol s) const { return find(s.name()); }

Symbol SymbolTable::lookup(std::string_view name) const {
  auto e = find(name);
  if (!e) throw SymbolError("unknown symbol " + std::string(name));
  return e->symbol;
}

std::optional<int> SymbolTable::function_arity(std::string_view name) const {
  if (is_builtin_function(name)) return 1;
  auto it = functions_.find(std::string(name));
  if (it == functions_.end()) return std::nullopt;
  return it->second;
}

Expr differentiate(const Expr& e, std::string_view name, const SymbolTable& table) {
  return differentiate(e, table.lookup(name));
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings,
                const SymbolTable& table) {
  Bindings b;
  for (const auto& [name, value] : bindings) b.emplace(table.lookup(name), value);
  return substitute(e, b);
}

}  // namespace hjc
