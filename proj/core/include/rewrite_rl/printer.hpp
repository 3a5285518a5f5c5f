#pragma once

#include <string>

#include "rewrite_rl/ast.hpp"

namespace rewrite_rl {

/// Renders a unit back to source. Four-space indentation, braces on their own
/// line for functions, `#pragma stml` lines directly above their loop.
/// parse(print(u)) == u for every unit produced by parse or by a rewrite.
std::string print(const TranslationUnit& unit);

std::string print(const Expr& expr);

}  // namespace rewrite_rl
