#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rewrite_rl/features.hpp"

namespace rewrite_rl {

enum class Platform : std::uint8_t { FPGA = 0, GPU = 1, SM_CPU = 2, DM_CPU = 3 };

inline constexpr std::size_t kPlatformCount = 4;

std::string_view platform_name(Platform p);

/// Accepts the canonical names case-insensitively, with `-` or `_` ("sm-cpu", "SM_CPU").
std::optional<Platform> parse_platform(std::string_view text);

/// Subset of platforms stored as a bit mask. Ordered canonically: by size,
/// then lexicographically over the member lists in enum order.
class PlatformSet {
public:
    constexpr PlatformSet() = default;
    PlatformSet(std::initializer_list<Platform> members);

    static PlatformSet from_mask(std::uint8_t mask);

    std::uint8_t mask() const { return mask_; }
    bool empty() const { return mask_ == 0; }
    std::size_t size() const;
    bool contains(Platform p) const { return (mask_ >> static_cast<unsigned>(p)) & 1u; }
    void insert(Platform p) { mask_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(p)); }
    std::vector<Platform> members() const;

    /// "{FPGA,GPU}"
    std::string to_string() const;

    bool operator==(const PlatformSet&) const = default;
    std::strong_ordering operator<=>(const PlatformSet& other) const;

private:
    std::uint8_t mask_ = 0;
};

/// The 15 non-empty subsets in canonical order.
std::vector<PlatformSet> platform_classes();

struct LabeledSample {
    FeatureVector x;
    PlatformSet y;
};

struct FitParams {
    /// Minimum number of samples on each side of a split.
    std::size_t min_samples = 1;
    std::optional<std::size_t> max_depth;
};

struct TreeNode {
    bool leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    PlatformSet label;
    std::map<PlatformSet, std::size_t> counts;
};

/// Binary CART tree; node 0 is the root. Routing sends x[feature] <= threshold left.
class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes);

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& root() const { return nodes_.at(0); }

    /// Index of the leaf reached by `x`.
    std::size_t leaf_index(const FeatureVector& x) const;
    std::size_t depth() const;

    /// Structural check used after deserialisation; throws ClassifyError(BadTree).
    void validate() const;

    bool operator==(const DecisionTree&) const;

private:
    std::vector<TreeNode> nodes_;
};

/// Gini-impurity recursive partitioning. Throws ClassifyError(EmptyInput) and
/// ClassifyError(AmbiguousData) when two samples share x but not y.
DecisionTree fit(const std::vector<LabeledSample>& samples, const FitParams& params = {});

PlatformSet predict(const DecisionTree& tree, const FeatureVector& x);

bool is_final(const DecisionTree& tree, const FeatureVector& x, Platform target);

}  // namespace rewrite_rl
