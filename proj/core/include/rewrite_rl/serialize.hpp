#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rewrite_rl/classify.hpp"
#include "rewrite_rl/features.hpp"
#include "rewrite_rl/qlearning.hpp"

// JSON forms of every artifact. Each document carries "schema": 1. Readers
// throw FormatError on malformed input.

namespace rewrite_rl {

inline constexpr int kSchemaVersion = 1;

/// Whole file as text. Throws FormatError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// [c0, ..., c14]
std::string features_to_json(const FeatureVector& fv);

/// {"schema", "states", "transitions": [{"s","a","s'"}], "finals": [{"state","reward"}]}
std::string graph_to_json(const TrainingGraph& graph);
TrainingGraph graph_from_json(std::string_view text);

/// {"schema", "q_init", "rows": {key: {"<rule id>": value}}, "finals": [key]}
/// Every known state gets a row over every known action. Values use 17
/// significant digits so a reload is exact.
std::string qtable_to_json(const QTable& q);
QTable qtable_from_json(std::string_view text);

/// {"schema", "nodes": [{"id", "kind": "split", "feature", "threshold", "left", "right"}
///                      | {"id", "kind": "leaf", "class": [names], "counts": [{"class", "count"}]}]}
std::string tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(std::string_view text);

/// Either a bare array of {"features": [15 ints], "classes": [names]} or
/// {"schema": 1, "samples": [...]}.
std::vector<LabeledSample> corpus_from_json(std::string_view text);
std::string corpus_to_json(const std::vector<LabeledSample>& samples);

}  // namespace rewrite_rl
