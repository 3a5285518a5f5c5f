#include "rewrite_rl/classify.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numeric>

#include "rewrite_rl/errors.hpp"

namespace rewrite_rl {

std::string_view platform_name(Platform p) {
    switch (p) {
    case Platform::FPGA: return "FPGA";
    case Platform::GPU: return "GPU";
    case Platform::SM_CPU: return "SM_CPU";
    case Platform::DM_CPU: return "DM_CPU";
    }
    return "?";
}

std::optional<Platform> parse_platform(std::string_view text) {
    std::string norm;
    for (char c : text) norm.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    for (std::size_t i = 0; i < kPlatformCount; ++i) {
        auto p = static_cast<Platform>(i);
        if (norm == platform_name(p)) return p;
    }
    return std::nullopt;
}

PlatformSet::PlatformSet(std::initializer_list<Platform> members) {
    for (auto p : members) insert(p);
}

PlatformSet PlatformSet::from_mask(std::uint8_t mask) {
    PlatformSet s;
    s.mask_ = mask & 0x0f;
    return s;
}

std::size_t PlatformSet::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<Platform> PlatformSet::members() const {
    std::vector<Platform> out;
    for (std::size_t i = 0; i < kPlatformCount; ++i) {
        if (contains(static_cast<Platform>(i))) out.push_back(static_cast<Platform>(i));
    }
    return out;
}

std::string PlatformSet::to_string() const {
    std::string out = "{";
    for (auto p : members()) {
        if (out.size() > 1) out += ',';
        out += platform_name(p);
    }
    return out + "}";
}

std::strong_ordering PlatformSet::operator<=>(const PlatformSet& other) const {
    if (auto c = size() <=> other.size(); c != 0) return c;
    auto a = members();
    auto b = other.members();
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<PlatformSet> platform_classes() {
    std::vector<PlatformSet> out;
    for (unsigned m = 1; m < 16; ++m) out.push_back(PlatformSet::from_mask(static_cast<std::uint8_t>(m)));
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

std::size_t DecisionTree::leaf_index(const FeatureVector& x) const {
    std::size_t i = 0;
    while (!nodes_.at(i).leaf) {
        const auto& n = nodes_[i];
        i = static_cast<double>(x[n.feature]) <= n.threshold ? n.left : n.right;
    }
    return i;
}

std::size_t DecisionTree::depth() const {
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes_[i].leaf) {
            d[nodes_[i].left] = d[i] + 1;
            d[nodes_[i].right] = d[i] + 1;
        }
    }
    return best;
}

void DecisionTree::validate() const {
    if (nodes_.empty()) throw ClassifyError(ClassifyError::Kind::BadTree, "tree has no nodes");
    // Children must point forward so routing always terminates, and each node has one parent.
    std::vector<int> parents(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.leaf) {
            if (n.label.empty()) throw ClassifyError(ClassifyError::Kind::BadTree, "leaf " + std::to_string(i) + " has no class");
            continue;
        }
        if (n.feature >= kFeatureCount || !std::isfinite(n.threshold)) {
            throw ClassifyError(ClassifyError::Kind::BadTree, "node " + std::to_string(i) + " has an invalid split");
        }
        for (auto c : {n.left, n.right}) {
            if (c <= i || c >= nodes_.size()) {
                throw ClassifyError(ClassifyError::Kind::BadTree, "node " + std::to_string(i) + " has an invalid child");
            }
            ++parents[c];
        }
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (parents[i] != 1) throw ClassifyError(ClassifyError::Kind::BadTree, "node " + std::to_string(i) + " is not a tree node");
    }
}

bool DecisionTree::operator==(const DecisionTree& other) const {
    if (nodes_.size() != other.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& a = nodes_[i];
        const auto& b = other.nodes_[i];
        if (a.leaf != b.leaf || a.counts != b.counts || a.label != b.label) return false;
        if (!a.leaf && (a.feature != b.feature || a.threshold != b.threshold || a.left != b.left || a.right != b.right)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

namespace {

using Counts = std::map<PlatformSet, std::size_t>;

// n * gini(counts) = n - sum(c^2) / n
double weighted_gini(const Counts& counts, std::size_t n) {
    if (n == 0) return 0.0;
    double sq = 0.0;
    for (const auto& [_, c] : counts) sq += static_cast<double>(c) * static_cast<double>(c);
    return static_cast<double>(n) - sq / static_cast<double>(n);
}

PlatformSet majority(const Counts& counts) {
    PlatformSet best;
    std::size_t best_count = 0;
    for (const auto& [cls, c] : counts) {  // canonical order, so the first maximum wins ties
        if (c > best_count) {
            best = cls;
            best_count = c;
        }
    }
    return best;
}

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double child_impurity = 0.0;  // weighted, times node size
};

class Builder {
public:
    Builder(const std::vector<LabeledSample>& samples, const FitParams& params) : samples_(samples), params_(params) {}

    std::vector<TreeNode> build() {
        std::vector<std::size_t> all(samples_.size());
        std::iota(all.begin(), all.end(), 0);
        grow(all, 0);
        return std::move(nodes_);
    }

private:
    std::size_t grow(const std::vector<std::size_t>& idx, std::size_t depth) {
        std::size_t id = nodes_.size();
        nodes_.emplace_back();
        Counts counts;
        for (auto i : idx) ++counts[samples_[i].y];
        nodes_[id].counts = counts;
        nodes_[id].label = majority(counts);

        bool pure = counts.size() == 1;
        bool depth_hit = params_.max_depth && depth >= *params_.max_depth;
        if (pure || depth_hit) return id;
        auto split = best_split(idx);
        if (!split) return id;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto i : idx) {
            (static_cast<double>(samples_[i].x[split->feature]) <= split->threshold ? left : right).push_back(i);
        }
        nodes_[id].leaf = false;
        nodes_[id].label = {};
        nodes_[id].feature = split->feature;
        nodes_[id].threshold = split->threshold;
        std::size_t l = grow(left, depth + 1);
        std::size_t r = grow(right, depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    // Lowest weighted child impurity; ties keep the lowest feature, then the lowest threshold.
    // A split that does not lower impurity is still taken at an impure node, since
    // otherwise XOR-like data could never be separated.
    std::optional<Split> best_split(const std::vector<std::size_t>& idx) const {
        const std::size_t n = idx.size();
        const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_samples);
        std::optional<Split> best;
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            std::vector<std::size_t> order = idx;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return samples_[a].x[f] < samples_[b].x[f]; });
            Counts left;
            Counts right;
            for (auto i : order) ++right[samples_[i].y];
            for (std::size_t k = 0; k + 1 < n; ++k) {
                const auto& s = samples_[order[k]];
                ++left[s.y];
                if (--right[s.y] == 0) right.erase(s.y);
                std::int64_t v = s.x[f];
                std::int64_t next = samples_[order[k + 1]].x[f];
                if (v == next) continue;
                std::size_t nl = k + 1;
                std::size_t nr = n - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                double impurity = weighted_gini(left, nl) + weighted_gini(right, nr);
                if (!best || impurity < best->child_impurity - 1e-12) {
                    best = Split{f, (static_cast<double>(v) + static_cast<double>(next)) / 2.0, impurity};
                }
            }
        }
        return best;
    }

    const std::vector<LabeledSample>& samples_;
    FitParams params_;
    std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree fit(const std::vector<LabeledSample>& samples, const FitParams& params) {
    if (samples.empty()) throw ClassifyError(ClassifyError::Kind::EmptyInput, "no training samples");
    std::map<FeatureVector, PlatformSet> seen;
    for (const auto& s : samples) {
        if (s.y.empty()) throw ClassifyError(ClassifyError::Kind::EmptyInput, "sample with an empty class");
        auto [it, inserted] = seen.emplace(s.x, s.y);
        if (!inserted && it->second != s.y) {
            throw ClassifyError(ClassifyError::Kind::AmbiguousData,
                                "samples " + state_key(s.x).str() + " labelled both " + it->second.to_string() +
                                    " and " + s.y.to_string());
        }
    }
    return DecisionTree(Builder(samples, params).build());
}

PlatformSet predict(const DecisionTree& tree, const FeatureVector& x) {
    return tree.nodes()[tree.leaf_index(x)].label;
}

bool is_final(const DecisionTree& tree, const FeatureVector& x, Platform target) {
    return predict(tree, x).contains(target);
}

}  // namespace rewrite_rl
