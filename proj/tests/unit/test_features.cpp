#include <gtest/gtest.h>

#include "data_path.hpp"
#include "program_gen.hpp"
#include "reference_features.hpp"
#include "rewrite_rl/features.hpp"
#include "rewrite_rl/parser.hpp"
#include "rewrite_rl/rules.hpp"
#include "rewrite_rl/serialize.hpp"

using namespace rewrite_rl;
using rewrite_rl::testing::data_path;
using rewrite_rl::testing::reference_extract;

namespace {

using Values = std::array<std::int64_t, kFeatureCount>;

FeatureVector of_file(const std::string& relative) { return extract(parse(read_file(data_path(relative)))); }
FeatureVector of_source(const std::string& src) { return extract(parse(src)); }

}  // namespace

// ---------------------------------------------------------------------------
// Illustrative snippets

TEST(Snippets, ShiftedWritesLeftCountsOne) {
    auto fv = of_file("snippets/shifted_writes_left.c");
    EXPECT_EQ(fv[Feature::ShiftedArrayWrites], 1);
    EXPECT_EQ(fv.values(), (Values{0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1}));
}

TEST(Snippets, ShiftedWritesRightCountsZero) {
    auto fv = of_file("snippets/shifted_writes_right.c");
    EXPECT_EQ(fv[Feature::ShiftedArrayWrites], 0);
    EXPECT_EQ(fv.values(), (Values{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0}));
}

TEST(Snippets, NonStaticLimit) {
    auto fv = of_file("snippets/non_static_limits.c");
    EXPECT_EQ(fv[Feature::NonStaticLoopLimits], 1);
    EXPECT_EQ(fv.values(), (Values{1, 3, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 2, 0}));
}

TEST(Snippets, LoopSchedule) {
    auto fv = of_file("snippets/loop_schedule.c");
    EXPECT_EQ(fv[Feature::LoopSchedule], 1);
    EXPECT_EQ(fv.values(), (Values{1, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 2, 0}));
}

TEST(Snippets, AuxIndex) {
    auto fv = of_file("snippets/aux_index.c");
    EXPECT_EQ(fv[Feature::AuxIndexVars], 1);
    EXPECT_EQ(fv[Feature::ForLoops], 1);
    EXPECT_EQ(fv[Feature::NonNormalizedLoops], 0);
    EXPECT_EQ(fv.values(), (Values{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 1, 0}));
}

TEST(Snippets, EmptyFunctionIsZero) { EXPECT_EQ(of_source("void f() {}"), FeatureVector{}); }

// ---------------------------------------------------------------------------
// Individual components on small programs

TEST(Components, NestingDepthIsZeroBased) {
    EXPECT_EQ(of_source("void f() { int i; for (i = 0; i < 2; i++) {} }")[Feature::MaxNestedLoopDepth], 0);
    auto fv = of_source("void f() { int i; int j; int k; for (i = 0; i < 2; i++) for (j = 0; j < 2; j++) for (k = 0; k < 2; k++) {} }");
    EXPECT_EQ(fv[Feature::MaxNestedLoopDepth], 2);
    EXPECT_EQ(fv[Feature::ForLoops], 3);
}

TEST(Components, IrregularAndIfs) {
    auto fv = of_source("void f() { int i; for (i = 0; i < 4; i++) { if (i == 2) { continue; } if (i > 2) break; } }");
    EXPECT_EQ(fv[Feature::IrregularLoops], 1);
    EXPECT_EQ(fv[Feature::IfStatements], 2);
}

TEST(Components, GlobalWriteRespectsShadowing) {
    EXPECT_EQ(of_source("int g; void f() { g = 1; }")[Feature::GlobalWrites], 1);
    EXPECT_EQ(of_source("int g; void f() { int g; g = 1; }")[Feature::GlobalWrites], 0);
    EXPECT_EQ(of_source("int g; void f(int g) { g = 1; }")[Feature::GlobalWrites], 0);
    EXPECT_EQ(of_source("int g; void f() { { int g = 0; g = 1; } }")[Feature::GlobalWrites], 0);
    EXPECT_EQ(of_source("int g; void f() { { int g = 0; } g = 1; }")[Feature::GlobalWrites], 1);
}

TEST(Components, LimitWrittenInEnclosingLoopIsNonStatic) {
    EXPECT_EQ(of_source("void f() { int i; int j; int n; n = 3; for (i = 0; i < 4; i++) { for (j = 0; j < n; j++) {} n = n + 1; } }")
                  [Feature::NonStaticLoopLimits],
              1);
    EXPECT_EQ(of_source("void f() { int i; int j; int n; n = 3; for (i = 0; i < 4; i++) { for (j = 0; j < n; j++) {} } }")
                  [Feature::NonStaticLoopLimits],
              0);
}

TEST(Components, PragmaCounts) {
    auto fv = of_source(
        "void f() { int i; int j;\n"
        "#pragma stml iteration_independent\nfor (i = 0; i < 2; i++) {\n"
        "#pragma stml iteration_independent\nfor (j = 0; j < 2; j++) {} } }");
    EXPECT_EQ(fv[Feature::IterationIndependentLoops], 2);
    EXPECT_EQ(fv[Feature::LoopSchedule], 0);
}

TEST(Components, InvariantAndHoisted) {
    // a: assigned before, read inside -> invariant. b: assigned before and inside -> hoisted.
    auto fv = of_source("void f(int v[4]) { int i; int a; int b; a = 2; b = 0; for (i = 0; i < 4; i++) { b = b + a; v[i] = b; } }");
    EXPECT_EQ(fv[Feature::LoopInvariantVars], 1);
    EXPECT_EQ(fv[Feature::HoistedVarModifications], 1);
}

TEST(Components, NonOneDimArraysCountsEveryDeclaration) {
    auto fv = of_source("int g[2][2]; void f(int a[2][3], int b[4]) { int c[2][2][2]; int d[3]; }");
    EXPECT_EQ(fv[Feature::NonOneDimArrays], 3);
}

TEST(Components, NonNormalizedSteps) {
    auto fv = of_source(
        "void f() { int i; for (i = 0; i < 4; i++) {} for (i = 0; i < 4; i = 1 + i) {} "
        "for (i = 0; i < 4; i += 2) {} for (i = 0; i < 4; i = i + 1) {} }");
    EXPECT_EQ(fv[Feature::NonNormalizedLoops], 1);
    EXPECT_EQ(fv[Feature::ForLoops], 4);
}

TEST(Components, ShiftedWritesNeedTwoWritesToOneArray) {
    // Two writes, but to different arrays.
    EXPECT_EQ(of_source("void f(int a[9], int b[9]) { int i; for (i = 0; i < 8; i++) { a[i + 1] = 0; b[i] = 0; } }")
                  [Feature::ShiftedArrayWrites],
              0);
    // Writes in a nested loop belong to that loop only.
    EXPECT_EQ(of_source("void f(int a[9]) { int i; int j; for (i = 0; i < 4; i++) for (j = 0; j < 4; j++) { a[j + 1] = 0; a[j] = 1; } }")
                  [Feature::ShiftedArrayWrites],
              1);
}

// ---------------------------------------------------------------------------
// Convolution sequence

TEST(Convolution, VectorsAlongTheSequence) {
    EXPECT_EQ(of_file("convolution.c").values(), (Values{3, 0, 0, 0, 0, 0, 0, 0, 0, 6, 2, 3, 0, 4, 0}));
    EXPECT_EQ(of_file("convolution_steps/c1.c").values(), (Values{3, 0, 0, 0, 0, 0, 0, 0, 0, 6, 2, 2, 0, 4, 0}));
    EXPECT_EQ(of_file("convolution_steps/c2.c").values(), (Values{3, 0, 0, 0, 0, 0, 0, 0, 0, 6, 2, 1, 0, 4, 0}));
    EXPECT_EQ(of_file("convolution_steps/c3.c").values(), (Values{3, 0, 0, 0, 0, 0, 0, 0, 0, 6, 2, 0, 0, 4, 0}));
    EXPECT_EQ(of_file("convolution_steps/c4.c").values(), (Values{2, 0, 0, 0, 0, 0, 0, 0, 0, 5, 2, 0, 2, 3, 0}));
}

TEST(Convolution, ShippedStepsMatchRuleApplication) {
    auto registry = RuleRegistry::with_defaults();
    auto unit = parse(read_file(data_path("convolution.c")));
    const RuleId sequence[] = {kFlattenArray, kFlattenArray, kFlattenArray, kCollapseLoops};
    for (int step = 0; step < 4; ++step) {
        auto sites = registry.find_sites(unit, sequence[step]);
        ASSERT_FALSE(sites.empty());
        unit = registry.apply(unit, sequence[step], sites.front()).unit;
        auto shipped = parse(read_file(data_path("convolution_steps/c" + std::to_string(step + 1) + ".c")));
        EXPECT_EQ(unit, shipped) << "step " << step + 1;
    }
}

// ---------------------------------------------------------------------------
// State keys

TEST(StateKeys, ZeroVector) { EXPECT_EQ(state_key(FeatureVector{}).str(), "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0"); }

TEST(StateKeys, DeterministicAndInjective) {
    auto unit = parse(read_file(data_path("convolution.c")));
    EXPECT_EQ(state_key(extract(unit)), state_key(extract(unit)));
    FeatureVector a;
    FeatureVector b;
    b[Feature::NonNormalizedLoops] = 1;
    EXPECT_NE(state_key(a), state_key(b));
    // Multi-digit components cannot collide through concatenation.
    FeatureVector c;
    c[0] = 11;
    FeatureVector d;
    d[0] = 1;
    d[1] = 1;
    EXPECT_NE(state_key(c), state_key(d));
}

TEST(StateKeys, ParseInverts) {
    FeatureVector fv(Values{3, 0, 12, 0, 1, 0, 0, 0, 0, 6, 2, 3, 0, 4, 0});
    auto back = parse_state_key(state_key(fv).str());
    ASSERT_TRUE(back);
    EXPECT_EQ(*back, fv);
    EXPECT_FALSE(parse_state_key("1,2,3"));
    EXPECT_FALSE(parse_state_key("0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,"));
    EXPECT_FALSE(parse_state_key("0,0,0,0,0,0,0,0,0,0,0,0,0,0,-1"));
    EXPECT_FALSE(parse_state_key("0,0,0,0,0,0,0,0,0,0,0,0,0,0,x"));
}

// ---------------------------------------------------------------------------
// Properties over generated programs

TEST(FeatureProperties, AgreesWithReferenceExtractor) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        auto unit = parse(rewrite_rl::testing::random_program(seed));
        auto fv = extract(unit);
        auto ref = reference_extract(unit);
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            EXPECT_EQ(fv[i], ref[i]) << "component " << i << " (" << feature_name(static_cast<Feature>(i))
                                     << "), seed " << seed << "\n"
                                     << rewrite_rl::testing::random_program(seed);
        }
    }
}

TEST(FeatureProperties, InvariantsHoldOnGeneratedPrograms) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        auto fv = extract(parse(rewrite_rl::testing::random_program(seed)));
        EXPECT_TRUE(fv.valid()) << "seed " << seed << ": " << state_key(fv).str();
    }
}

TEST(FeatureProperties, PureFunctionOfTheAst) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto a = parse(rewrite_rl::testing::random_program(seed));
        auto b = parse(rewrite_rl::testing::random_program(seed));
        ASSERT_EQ(a, b);
        EXPECT_EQ(extract(a), extract(b));
    }
}

TEST(FeatureProperties, ReferenceAgreesOnShippedSources) {
    for (const char* path : {"convolution.c", "snippets/shifted_writes_left.c", "snippets/shifted_writes_right.c",
                             "snippets/non_static_limits.c", "snippets/loop_schedule.c", "snippets/aux_index.c",
                             "convolution_steps/c4.c"}) {
        auto unit = parse(read_file(data_path(path)));
        EXPECT_EQ(extract(unit), reference_extract(unit)) << path;
    }
}
