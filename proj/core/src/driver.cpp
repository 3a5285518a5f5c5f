#include "rewrite_rl/driver.hpp"

#include "rewrite_rl/errors.hpp"
#include "rewrite_rl/log.hpp"

namespace rewrite_rl {

std::string_view to_string(Terminal t) {
    switch (t) {
    case Terminal::Final: return "final";
    case Terminal::BudgetExhausted: return "budget_exhausted";
    case Terminal::NoApplicableRule: return "no_applicable_rule";
    }
    return "?";
}

DriveResult transform_greedy(const TranslationUnit& unit, const QTable& q, const RuleRegistry& rules,
                             const DecisionTree& tree, Platform target, std::size_t max_steps, std::uint64_t seed) {
    Rng rng(seed);
    DriveResult result;
    result.unit = unit;
    result.initial = extract(unit);
    FeatureVector current = result.initial;
    for (;;) {
        if (is_final(tree, current, target)) {
            result.terminal = Terminal::Final;
            break;
        }
        if (result.steps.size() >= max_steps) {
            result.terminal = Terminal::BudgetExhausted;
            break;
        }
        std::vector<RuleId> applicable;
        std::map<RuleId, Site> first_site;
        for (auto id : rules.ids()) {
            auto sites = rules.find_sites(result.unit, id);
            if (sites.empty()) continue;
            applicable.push_back(id);
            first_site.emplace(id, sites.front());
        }
        if (applicable.empty()) {
            result.terminal = Terminal::NoApplicableRule;
            break;
        }
        StateKey key = state_key(current);
        RuleId chosen = select_action(q, key, applicable, rng);
        const Site& site = first_site.at(chosen);
        result.unit = rules.get(chosen).rewrite(result.unit, site);
        current = extract(result.unit);
        result.steps.push_back({chosen, site, current});
        log_info("applied " + std::string(rules.get(chosen).name()) + " at " + to_string(site) + " -> " +
                 state_key(current).str());
    }
    return result;
}

TrainingGraph sequence_graph(const TranslationUnit& unit, const RuleRegistry& rules,
                             const std::vector<RuleId>& sequence, double reward) {
    TrainingGraph graph;
    TranslationUnit current = unit;
    StateKey key = state_key(extract(current));
    graph.add_state(key);
    for (auto id : sequence) {
        auto sites = rules.find_sites(current, id);
        if (sites.empty()) {
            throw RuleError(RuleError::Kind::SiteMismatch,
                            std::string(rules.get(id).name()) + " does not apply at state " + key.str());
        }
        current = rules.get(id).rewrite(current, sites.front());
        StateKey next = state_key(extract(current));
        graph.add_transition(key, id, next);
        key = next;
    }
    graph.add_final(key, reward);
    return graph;
}

}  // namespace rewrite_rl
