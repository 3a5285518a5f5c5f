#pragma once

#include <string_view>

#include "rewrite_rl/ast.hpp"

namespace rewrite_rl {

/// Parses a source file in the restricted C subset (see docs/grammar.md).
///
/// Declarations are checked while parsing: every identifier must be declared
/// before use, array accesses must match the declared rank, and array
/// extents must be positive literals or global `const int` names.
/// `#pragma stml <kind>` lines attach to the for loop that follows them.
///
/// Throws SyntaxError or SemanticError, both carrying a line/column.
TranslationUnit parse(std::string_view source);

}  // namespace rewrite_rl
