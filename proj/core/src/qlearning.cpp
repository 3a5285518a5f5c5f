#include "rewrite_rl/qlearning.hpp"

#include <algorithm>
#include <cmath>

#include "rewrite_rl/errors.hpp"
#include "rewrite_rl/log.hpp"

namespace rewrite_rl {

std::vector<std::string> validate(const LearnConfig& cfg) {
    auto bad = [](const std::string& msg) { return LearnError(LearnError::Kind::BadConfig, msg); };
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw bad("alpha must be in (0, 1]");
    if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) throw bad("gamma must be in (0, 1]");
    if (!std::isfinite(cfg.q_init)) throw bad("q_init must be finite");
    if (cfg.max_steps < 1) throw bad("max_steps must be at least 1");
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) throw bad("epsilon must be in [0, 1]");
    std::vector<std::string> warnings;
    if (cfg.gamma >= 1.0) warnings.push_back("gamma >= 1: Q values may diverge");
    return warnings;
}

// ---------------------------------------------------------------------------

double QTable::get(const StateKey& s, RuleId a) const {
    auto row = entries_.find(s);
    if (row == entries_.end()) return q_init_;
    auto it = row->second.find(a);
    return it == row->second.end() ? q_init_ : it->second;
}

void QTable::set(const StateKey& s, RuleId a, double value) {
    if (is_final(s)) {
        throw LearnError(LearnError::Kind::FinalStateUpdate, "final state " + s.str() + " cannot be updated");
    }
    states_.insert(s);
    actions_.insert(a);
    entries_[s][a] = value;
}

void QTable::mark_final(const StateKey& s) {
    states_.insert(s);
    finals_.insert(s);
    entries_.erase(s);
}

std::map<RuleId, double> QTable::row(const StateKey& s) const {
    std::map<RuleId, double> out;
    for (auto a : actions_) out[a] = get(s, a);
    return out;
}

// ---------------------------------------------------------------------------

void TrainingGraph::add_transition(const StateKey& from, RuleId action, const StateKey& to) {
    if (auto known = next(from, action); known && *known != to) {
        throw LearnError(LearnError::Kind::BadGraph, "state " + from.str() + " has two targets for action " +
                                                         std::to_string(action.value));
    }
    states_.insert(from);
    states_.insert(to);
    edges_[from].emplace(action, to);
}

void TrainingGraph::add_final(const StateKey& s, double reward) {
    states_.insert(s);
    finals_[s] = reward;
}

std::optional<double> TrainingGraph::reward(const StateKey& s) const {
    auto it = finals_.find(s);
    if (it == finals_.end()) return std::nullopt;
    return it->second;
}

std::vector<RuleId> TrainingGraph::available(const StateKey& s) const {
    std::vector<RuleId> out;
    auto it = edges_.find(s);
    if (it != edges_.end()) {
        for (const auto& [a, _] : it->second) out.push_back(a);
    }
    return out;
}

std::optional<StateKey> TrainingGraph::next(const StateKey& s, RuleId a) const {
    auto it = edges_.find(s);
    if (it == edges_.end()) return std::nullopt;
    auto e = it->second.find(a);
    if (e == it->second.end()) return std::nullopt;
    return e->second;
}

std::vector<Transition> TrainingGraph::transitions() const {
    std::vector<Transition> out;
    for (const auto& [s, row] : edges_) {
        for (const auto& [a, t] : row) out.push_back({s, a, t});
    }
    return out;
}

std::vector<StateKey> TrainingGraph::start_states() const {
    std::vector<StateKey> out;
    for (const auto& s : states_) {
        if (!is_final(s)) out.push_back(s);
    }
    return out;
}

void TrainingGraph::validate() const {
    for (const auto& s : states_) {
        if (!is_final(s) && available(s).empty()) {
            throw LearnError(LearnError::Kind::BadGraph, "non-final state " + s.str() + " has no outgoing transition");
        }
    }
}

// ---------------------------------------------------------------------------

RuleId select_action(const QTable& q, const StateKey& s, const std::vector<RuleId>& available, Rng& rng,
                     double epsilon) {
    if (available.empty()) throw LearnError(LearnError::Kind::NoActions, "no action available at " + s.str());
    if (epsilon > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < epsilon) return available[rng() % available.size()];
    }
    double best = q.get(s, available.front());
    for (auto a : available) best = std::max(best, q.get(s, a));
    std::vector<RuleId> ties;
    for (auto a : available) {
        if (q.get(s, a) == best) ties.push_back(a);
    }
    if (ties.size() == 1) return ties.front();
    return ties[rng() % ties.size()];
}

double sarsa_update(QTable& q, const StateKey& s, RuleId a, double reward, const StateKey& next, RuleId next_action,
                    const LearnConfig& cfg) {
    double old = q.get(s, a);
    double value = old + cfg.alpha * (reward + cfg.gamma * q.get(next, next_action) - old);
    q.set(s, a, value);
    return value;
}

namespace {

// q(s', a') for the last step of an episode: the frozen row at a final state,
// otherwise the best available action (the one the walk would have taken).
double bootstrap_value(const QTable& q, const TrainingGraph& graph, const StateKey& s) {
    if (graph.is_final(s)) return q.q_init();
    auto actions = graph.available(s);
    if (actions.empty()) return q.q_init();
    double best = q.get(s, actions.front());
    for (auto a : actions) best = std::max(best, q.get(s, a));
    return best;
}

}  // namespace

std::vector<EpisodeStep> run_episode(QTable& q, const TrainingGraph& graph, const StateKey& start,
                                     const LearnConfig& cfg, Rng& rng) {
    if (!graph.states().count(start)) throw LearnError(LearnError::Kind::BadStart, "unknown start state " + start.str());
    if (graph.is_final(start)) throw LearnError(LearnError::Kind::BadStart, "start state " + start.str() + " is final");

    std::vector<EpisodeStep> steps;
    StateKey s = start;
    while (steps.size() < cfg.max_steps && !graph.is_final(s)) {
        RuleId a = select_action(q, s, graph.available(s), rng, cfg.epsilon);
        StateKey next = *graph.next(s, a);
        steps.push_back({s, a, graph.reward(next).value_or(0.0), next});
        s = next;
    }

    for (std::size_t i = steps.size(); i-- > 0;) {
        const auto& st = steps[i];
        double target;
        if (i + 1 < steps.size()) {
            target = q.get(st.next, steps[i + 1].action);
        } else {
            target = bootstrap_value(q, graph, st.next);
        }
        double old = q.get(st.state, st.action);
        q.set(st.state, st.action, old + cfg.alpha * (st.reward + cfg.gamma * target - old));
    }
    if (log_level() >= LogLevel::Debug) {
        log_debug("episode from " + start.str() + ": " + std::to_string(steps.size()) + " steps");
    }
    return steps;
}

QTable train(const TrainingGraph& graph, const LearnConfig& cfg) {
    for (const auto& w : validate(cfg)) log_info("warning: " + w);
    graph.validate();
    QTable q(cfg.q_init);
    for (const auto& s : graph.states()) q.add_state(s);
    for (const auto& t : graph.transitions()) q.add_action(t.action);
    for (const auto& [s, _] : graph.finals()) q.mark_final(s);

    auto starts = graph.start_states();
    if (cfg.episodes > 0 && starts.empty()) throw LearnError(LearnError::Kind::BadGraph, "graph has no non-final state");
    Rng rng(cfg.seed);
    for (std::size_t e = 0; e < cfg.episodes; ++e) {
        const StateKey& start = starts[rng() % starts.size()];
        run_episode(q, graph, start, cfg, rng);
    }
    log_info("trained " + std::to_string(cfg.episodes) + " episodes over " + std::to_string(graph.states().size()) +
             " states");
    return q;
}

std::vector<RuleId> greedy_path(const QTable& q, const TrainingGraph& graph, const StateKey& start,
                                std::size_t max_steps, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<RuleId> out;
    StateKey s = start;
    while (out.size() < max_steps && !graph.is_final(s)) {
        auto actions = graph.available(s);
        if (actions.empty()) break;
        RuleId a = select_action(q, s, actions, rng);
        out.push_back(a);
        s = *graph.next(s, a);
    }
    return out;
}

}  // namespace rewrite_rl
