#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "rewrite_rl/ast.hpp"

namespace rewrite_rl {

/// A scalar, or a whole array flattened row-major.
using Value = std::variant<std::int64_t, std::vector<std::int64_t>>;
using Bindings = std::map<std::string, Value>;

struct InterpretOptions {
    std::uint64_t step_budget = 10'000'000;
    std::size_t max_call_depth = 256;
};

/// Runs `entry` with 64-bit wrapping integer arithmetic and C division.
///
/// `inputs` must bind every parameter of `entry` (arrays by element count);
/// globals may be bound too, otherwise they start at their initializer or 0.
/// Returns the final contents of every array parameter and every global
/// written during the run.
///
/// Units calling functions that are not defined in the unit are rejected
/// before execution. Throws InterpretError.
Bindings interpret(const TranslationUnit& unit, const std::string& entry, const Bindings& inputs,
                   const InterpretOptions& options = {});

}  // namespace rewrite_rl
