#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rewrite_rl/features.hpp"
#include "rewrite_rl/rules.hpp"

namespace rewrite_rl {

using Rng = std::mt19937_64;

struct LearnConfig {
    double alpha = 0.5;
    double gamma = 0.6;
    double q_init = 1.0;
    std::size_t episodes = 500;
    std::size_t max_steps = 50;
    std::uint64_t seed = 0;
    /// Probability of a uniformly random action instead of the greedy one.
    double epsilon = 0.0;
};

/// Throws LearnError(BadConfig) on out-of-range values; returns warnings
/// (currently only gamma >= 1, under which Q may diverge).
std::vector<std::string> validate(const LearnConfig& cfg);

/// State-action table. Missing entries read as q_init; rows of final states
/// are frozen at q_init.
class QTable {
public:
    explicit QTable(double q_init = 1.0) : q_init_(q_init) {}

    double q_init() const { return q_init_; }

    double get(const StateKey& s, RuleId a) const;

    /// Throws LearnError(FinalStateUpdate) when `s` is final.
    void set(const StateKey& s, RuleId a, double value);

    void add_state(const StateKey& s) { states_.insert(s); }
    void add_action(RuleId a) { actions_.insert(a); }
    void mark_final(const StateKey& s);

    bool is_final(const StateKey& s) const { return finals_.count(s) != 0; }
    const std::set<StateKey>& states() const { return states_; }
    const std::set<RuleId>& actions() const { return actions_; }
    const std::set<StateKey>& finals() const { return finals_; }

    /// Value of every known action at `s`.
    std::map<RuleId, double> row(const StateKey& s) const;

    bool operator==(const QTable&) const = default;

private:
    double q_init_;
    std::map<StateKey, std::map<RuleId, double>> entries_;
    std::set<StateKey> states_;
    std::set<RuleId> actions_;
    std::set<StateKey> finals_;
};

struct Transition {
    StateKey from;
    RuleId action;
    StateKey to;
};

/// Deterministic transition system with terminal rewards.
class TrainingGraph {
public:
    void add_state(const StateKey& s) { states_.insert(s); }

    /// Adds both endpoints as states. Throws LearnError(BadGraph) when (from, action)
    /// already leads somewhere else.
    void add_transition(const StateKey& from, RuleId action, const StateKey& to);

    void add_final(const StateKey& s, double reward);

    const std::set<StateKey>& states() const { return states_; }
    const std::map<StateKey, double>& finals() const { return finals_; }
    bool is_final(const StateKey& s) const { return finals_.count(s) != 0; }
    std::optional<double> reward(const StateKey& s) const;

    /// Actions leaving `s`, in id order.
    std::vector<RuleId> available(const StateKey& s) const;
    std::optional<StateKey> next(const StateKey& s, RuleId a) const;
    std::vector<Transition> transitions() const;

    /// Non-final states in key order; the pool episodes start from.
    std::vector<StateKey> start_states() const;

    /// Throws LearnError(BadGraph) when a non-final state has no outgoing transition.
    void validate() const;

private:
    std::set<StateKey> states_;
    std::map<StateKey, std::map<RuleId, StateKey>> edges_;
    std::map<StateKey, double> finals_;
};

/// Argmax of q(s, .) over `available`. Ties are broken by one draw
/// `rng() % ties`; a unique maximum consumes no randomness. With epsilon > 0
/// a uniform real is drawn first and, below epsilon, `available[rng() % n]`
/// is returned instead. Throws LearnError(NoActions).
RuleId select_action(const QTable& q, const StateKey& s, const std::vector<RuleId>& available, Rng& rng,
                     double epsilon = 0.0);

/// q(s,a) += alpha * (r + gamma * q(s',a') - q(s,a)); returns the new value.
double sarsa_update(QTable& q, const StateKey& s, RuleId a, double reward, const StateKey& next, RuleId next_action,
                    const LearnConfig& cfg);

struct EpisodeStep {
    StateKey state;
    RuleId action;
    double reward = 0.0;
    StateKey next;
};

/// Greedy walk from `start` until a final state or cfg.max_steps steps, then
/// updates the visited pairs in reverse order. Throws LearnError(BadStart).
std::vector<EpisodeStep> run_episode(QTable& q, const TrainingGraph& graph, const StateKey& start,
                                     const LearnConfig& cfg, Rng& rng);

/// Runs cfg.episodes episodes, each from `start_states()[rng() % n]`, with
/// one generator seeded by cfg.seed.
QTable train(const TrainingGraph& graph, const LearnConfig& cfg);

/// Actions the greedy policy takes from `start` on the graph, up to `max_steps`.
std::vector<RuleId> greedy_path(const QTable& q, const TrainingGraph& graph, const StateKey& start,
                                std::size_t max_steps, std::uint64_t seed = 0);

}  // namespace rewrite_rl
