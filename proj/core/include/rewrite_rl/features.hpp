#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rewrite_rl/ast.hpp"

namespace rewrite_rl {

/// Indices of the code-abstraction vector.
enum class Feature : std::size_t {
    MaxNestedLoopDepth = 0,
    FunctionCalls,
    ShiftedArrayWrites,
    IrregularLoops,
    GlobalWrites,
    IfStatements,
    NonStaticLoopLimits,
    IterationIndependentLoops,
    LoopSchedule,
    LoopInvariantVars,
    HoistedVarModifications,
    NonOneDimArrays,
    AuxIndexVars,
    ForLoops,
    NonNormalizedLoops,
};

inline constexpr std::size_t kFeatureCount = 15;

std::string_view feature_name(Feature f);

/// Fifteen non-negative integer features describing a unit. Flags
/// (irregular loops, global writes, non-static limits, loop schedule) are 0/1.
class FeatureVector {
public:
    FeatureVector() { values_.fill(0); }
    explicit FeatureVector(const std::array<std::int64_t, kFeatureCount>& values) : values_(values) {}

    std::int64_t operator[](Feature f) const { return values_[static_cast<std::size_t>(f)]; }
    std::int64_t& operator[](Feature f) { return values_[static_cast<std::size_t>(f)]; }
    std::int64_t operator[](std::size_t i) const { return values_[i]; }
    std::int64_t& operator[](std::size_t i) { return values_[i]; }

    const std::array<std::int64_t, kFeatureCount>& values() const { return values_; }

    /// Structural invariants: non-negative, flags binary, loop counts bounded by the loop total.
    bool valid() const;

    bool operator==(const FeatureVector&) const = default;
    auto operator<=>(const FeatureVector&) const = default;

private:
    std::array<std::int64_t, kFeatureCount> values_;
};

/// Canonical comma-joined decimal form of a feature vector; the RL state key.
class StateKey {
public:
    StateKey() = default;
    explicit StateKey(std::string text) : text_(std::move(text)) {}

    const std::string& str() const { return text_; }

    bool operator==(const StateKey&) const = default;
    auto operator<=>(const StateKey&) const = default;

private:
    std::string text_;
};

/// Abstraction of a whole translation unit (all functions).
FeatureVector extract(const TranslationUnit& unit);

StateKey state_key(const FeatureVector& fv);

/// Inverse of state_key; nullopt for anything that is not 15 comma-separated naturals.
std::optional<FeatureVector> parse_state_key(std::string_view key);

}  // namespace rewrite_rl
