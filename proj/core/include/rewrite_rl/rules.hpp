#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rewrite_rl/ast.hpp"

namespace rewrite_rl {

/// Dense rule identifier. The RL action for a rule is its id.
struct RuleId {
    std::uint32_t value = 0;

    constexpr RuleId() = default;
    constexpr explicit RuleId(std::uint32_t v) : value(v) {}

    bool operator==(const RuleId&) const = default;
    auto operator<=>(const RuleId&) const = default;
};

inline constexpr RuleId kFlattenArray{0};
inline constexpr RuleId kCollapseLoops{1};

/// A source-to-source rewrite. Implementations are stateless.
class Rule {
public:
    virtual ~Rule() = default;

    virtual std::string_view name() const = 0;

    /// Every site where the rule applies, in pre-order (leftmost-outermost first).
    virtual std::vector<Site> find_sites(const TranslationUnit& unit) const = 0;

    /// Rewrites at `site`. Only called with a site returned by find_sites.
    virtual TranslationUnit rewrite(const TranslationUnit& unit, const Site& site) const = 0;
};

struct RewriteResult {
    TranslationUnit unit;
    RuleId rule;
    Site site;
};

/// Rules keyed by id, iterated in id order.
class RuleRegistry {
public:
    /// flatten_array (id 0) and collapse_loops (id 1).
    static RuleRegistry with_defaults();

    /// Throws RuleError(Registration) when `id` is taken.
    void add(RuleId id, std::shared_ptr<const Rule> rule);

    std::vector<RuleId> ids() const;
    std::size_t size() const { return rules_.size(); }
    bool contains(RuleId id) const { return rules_.count(id) != 0; }

    /// Throws RuleError(UnknownRule).
    const Rule& get(RuleId id) const;

    std::vector<Site> find_sites(const TranslationUnit& unit, RuleId id) const;

    /// Throws RuleError(SiteMismatch) when `site` is not a current match.
    RewriteResult apply(const TranslationUnit& unit, RuleId id, const Site& site) const;

private:
    std::map<RuleId, std::shared_ptr<const Rule>> rules_;
};

/// Rewrites a multi-dimensional array and all its accesses to row-major 1-D form.
///
/// Matches a declaration with two or more dimensions whose array is never
/// passed whole to a call. `int a[4][8]` becomes `int a[32]` and `a[i][j]`
/// becomes `a[i * 8 + j]`.
class FlattenArrayRule final : public Rule {
public:
    std::string_view name() const override { return "flatten_array"; }
    std::vector<Site> find_sites(const TranslationUnit& unit) const override;
    TranslationUnit rewrite(const TranslationUnit& unit, const Site& site) const override;
};

/// Collapses a two-level perfect nest into one loop over the product space.
///
/// Both loops must start at 0, step by 1, test `var < limit` with a
/// non-negative constant limit, carry no pragmas and contain no
/// break/continue. Neither loop variable may be a global, written in the
/// body, or read after the nest before being reassigned.
///
///     for (i = 0; i < N; i++)             int __k0;
///         for (j = 0; j < M; j++)   =>    for (__k0 = 0; __k0 < N * M; __k0++) {
///             B                               int i = __k0 / M;
///                                             int j = __k0 % M;
///                                             B
///                                         }
class CollapseLoopsRule final : public Rule {
public:
    std::string_view name() const override { return "collapse_loops"; }
    std::vector<Site> find_sites(const TranslationUnit& unit) const override;
    TranslationUnit rewrite(const TranslationUnit& unit, const Site& site) const override;
};

}  // namespace rewrite_rl
