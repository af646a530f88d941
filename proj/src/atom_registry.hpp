#pragma once

#include <string>

#include "hjc/expr.hpp"

namespace hjc {

/// Returns the unique interned atom for (kind, name, order, arg).
Atom intern_atom(AtomKind kind, const std::string& name, int order, const Expr& arg);

}  // namespace hjc
