#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rewrite_rl/classify.hpp"
#include "rewrite_rl/features.hpp"
#include "rewrite_rl/qlearning.hpp"
#include "rewrite_rl/rules.hpp"

namespace rewrite_rl {

enum class Terminal { Final, BudgetExhausted, NoApplicableRule };

/// "final", "budget_exhausted", "no_applicable_rule"
std::string_view to_string(Terminal t);

struct DriveStep {
    RuleId rule;
    Site site;
    FeatureVector after;
};

struct DriveResult {
    TranslationUnit unit;
    FeatureVector initial;
    std::vector<DriveStep> steps;
    Terminal terminal = Terminal::NoApplicableRule;
};

/// Rule selection loop: stop when the classifier accepts the current vector
/// for `target`, otherwise pick the best-scoring rule among those with at
/// least one site and apply it at its first site. Q ties are broken with an
/// mt19937_64 seeded by `seed`.
DriveResult transform_greedy(const TranslationUnit& unit, const QTable& q, const RuleRegistry& rules,
                             const DecisionTree& tree, Platform target, std::size_t max_steps,
                             std::uint64_t seed = 0);

/// Training graph of one transformation sequence: each rule of `sequence` is
/// applied at its first site, states are the extracted keys, and the last
/// state is final with `reward`. Throws RuleError(SiteMismatch) when a rule
/// does not apply.
TrainingGraph sequence_graph(const TranslationUnit& unit, const RuleRegistry& rules,
                             const std::vector<RuleId>& sequence, double reward);

}  // namespace rewrite_rl
