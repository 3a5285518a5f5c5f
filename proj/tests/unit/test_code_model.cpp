#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "data_path.hpp"
#include "program_gen.hpp"
#include "rewrite_rl/errors.hpp"
#include "rewrite_rl/interpreter.hpp"
#include "rewrite_rl/parser.hpp"
#include "rewrite_rl/printer.hpp"
#include "rewrite_rl/serialize.hpp"

using namespace rewrite_rl;
using rewrite_rl::testing::data_path;

namespace {

std::vector<std::filesystem::path> corpus_sources() {
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(data_path(""))) {
        if (entry.path().extension() == ".c") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::int64_t> array_of(const Bindings& b, const std::string& name) {
    return std::get<std::vector<std::int64_t>>(b.at(name));
}

}  // namespace

// ---------------------------------------------------------------------------
// parse

TEST(Parse, EmptyFunction) {
    auto unit = parse("void f() {}");
    ASSERT_EQ(unit.functions.size(), 1u);
    EXPECT_EQ(unit.functions[0].name, "f");
    EXPECT_TRUE(unit.functions[0].params.empty());
    EXPECT_TRUE(unit.functions[0].body.children.empty());
}

TEST(Parse, ShiftedWritesLoop) {
    auto unit = parse(
        "const int N = 63;\n"
        "void f(int v[64]) { int i; for(i=1;i<N;i+=2){ v[i]=v[i-1]; v[i+1]=v[i-1]*i; } }");
    const Stmt& loop = unit.functions[0].body.children[1];
    ASSERT_EQ(loop.kind, Stmt::Kind::For);
    EXPECT_EQ(loop.loop_var(), "i");
    const Stmt& body = loop.for_body();
    ASSERT_EQ(body.kind, Stmt::Kind::Block);
    ASSERT_EQ(body.children.size(), 2u);
    EXPECT_EQ(body.children[0].kind, Stmt::Kind::Assign);
    EXPECT_EQ(body.children[1].kind, Stmt::Kind::Assign);
    // `i += 2` is stored as `i = i + 2`.
    const Stmt& step = loop.for_step();
    EXPECT_TRUE(step.lhs.is_var("i"));
    EXPECT_EQ(step.expr, Expr::binary(BinaryOp::Add, Expr::var("i"), Expr::lit(2)));
}

TEST(Parse, UndeclaredIdentifierIsSemanticError) {
    EXPECT_THROW(parse("void f() { x = 1; }"), SemanticError);
}

TEST(Parse, IndexArityMismatchIsSemanticError) {
    EXPECT_THROW(parse("void f(int a[4][4]) { a[1] = 0; }"), SemanticError);
    EXPECT_THROW(parse("void f(int a[4]) { a[1][2] = 0; }"), SemanticError);
}

TEST(Parse, SyntaxErrorCarriesPosition) {
    try {
        parse("void f() {\n  int x;\n  x = ;\n}");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.pos().line, 3u);
        EXPECT_EQ(e.pos().column, 7u);
    }
}

TEST(Parse, BreakOutsideLoopRejected) {
    EXPECT_THROW(parse("void f() { break; }"), SemanticError);
    EXPECT_NO_THROW(parse("void f() { int i; for (i = 0; i < 3; i++) { if (i == 1) break; } }"));
}

TEST(Parse, DimensionMustBeConstant) {
    EXPECT_THROW(parse("void f(int n) { int a[n]; }"), SemanticError);
    EXPECT_THROW(parse("void f() { int a[0]; }"), SemanticError);
    EXPECT_NO_THROW(parse("const int N = 4; void f() { int a[N][2]; }"));
}

TEST(Parse, ConstantsEvaluateIntoExtents) {
    auto unit = parse("const int N = 4; const int M = 3; void f(int a[N][M]) {}");
    const VarDecl& a = unit.functions[0].params[0];
    EXPECT_EQ(a.extents, (std::vector<std::int64_t>{4, 3}));
    EXPECT_EQ(a.element_count(), 12);
    EXPECT_EQ(a.dims[0], Expr::var("N"));
}

TEST(Parse, DuplicateParameterRejected) {
    EXPECT_THROW(parse("void f(int a, int a) {}"), SemanticError);
}

TEST(Parse, PragmasAttachToNextLoop) {
    auto unit = parse(
        "void f(int v[8]) {\n"
        "  int i;\n"
        "  #pragma stml loop_schedule\n"
        "  #pragma stml iteration_independent\n"
        "  for (i = 0; i < 8; i++) v[i] = 0;\n"
        "  #pragma stml unroll 2\n"
        "  for (i = 0; i < 8; i++) v[i] = 1;\n"
        "}");
    const auto& body = unit.functions[0].body.children;
    ASSERT_EQ(body[1].pragmas.size(), 2u);
    EXPECT_EQ(body[1].pragmas[0].kind, Pragma::Kind::LoopSchedule);
    EXPECT_EQ(body[1].pragmas[1].kind, Pragma::Kind::IterationIndependent);
    ASSERT_EQ(body[2].pragmas.size(), 1u);
    EXPECT_EQ(body[2].pragmas[0].kind, Pragma::Kind::Other);
    EXPECT_EQ(body[2].pragmas[0].text, "unroll 2");
}

TEST(Parse, PragmaWithoutLoopRejected) {
    EXPECT_THROW(parse("void f() { int x;\n#pragma stml loop_schedule\n x = 1; }"), Error);
}

TEST(Parse, ForHeaderMustUseOneScalar) {
    EXPECT_THROW(parse("void f() { int i; int j; for (i = 0; i < 3; j++) {} }"), SemanticError);
    EXPECT_THROW(parse("void f(int a[3]) { int i; for (a[0] = 0; i < 3; i++) {} }"), Error);
}

TEST(Parse, CommentsIgnored) {
    auto unit = parse("// leading\nvoid f() { /* block\n comment */ int x; x = 1; // tail\n }");
    EXPECT_EQ(unit.functions[0].body.children.size(), 2u);
}

TEST(Parse, ShadowingInNestedBlock) {
    EXPECT_NO_THROW(parse("void f() { int x; x = 1; { int x = 2; x = x + 1; } }"));
    EXPECT_THROW(parse("void f() { int x; int x; }"), SemanticError);
}

TEST(Parse, CallsAreOpaque) {
    auto unit = parse("void f(int v[4]) { int i; for (i = 0; i < size(v); i++) update(v[i]); clean(v); }");
    const auto& loop = unit.functions[0].body.children[1];
    EXPECT_EQ(loop.expr.rhs().kind, Expr::Kind::Call);
    EXPECT_EQ(loop.for_body().kind, Stmt::Kind::Call);
}

// ---------------------------------------------------------------------------
// print

TEST(Print, EmptyFunction) { EXPECT_EQ(print(parse("void f() {}")), "void f()\n{\n}\n"); }

TEST(Print, PragmaDirectlyAboveLoop) {
    std::string text = print(parse("void f(int v[8]) { int i;\n#pragma stml loop_schedule\nfor (i = 0; i < 8; i++) v[i] = 0; }"));
    EXPECT_NE(text.find("    #pragma stml loop_schedule\n    for (i = 0; i < 8; i++)\n"), std::string::npos) << text;
}

TEST(Print, ParenthesesFollowStructure) {
    auto unit = parse("void f(int a, int b, int c) { a = (a - b) - c; b = a - (b - c); c = (a + b) * c; }");
    std::string text = print(unit);
    EXPECT_NE(text.find("a = a - b - c;"), std::string::npos) << text;
    EXPECT_NE(text.find("b = a - (b - c);"), std::string::npos) << text;
    EXPECT_NE(text.find("c = (a + b) * c;"), std::string::npos) << text;
    EXPECT_EQ(parse(text), unit);
}

TEST(Print, RoundTripOverShippedSources) {
    auto sources = corpus_sources();
    ASSERT_GE(sources.size(), 10u);
    for (const auto& path : sources) {
        auto unit = parse(read_file(path));
        EXPECT_EQ(parse(print(unit)), unit) << path;
    }
}

TEST(Print, RoundTripOverGeneratedPrograms) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        std::string src = rewrite_rl::testing::random_program(seed);
        TranslationUnit unit;
        ASSERT_NO_THROW(unit = parse(src)) << src;
        std::string printed = print(unit);
        EXPECT_EQ(parse(printed), unit) << "seed " << seed << "\n" << src << "\n---\n" << printed;
        EXPECT_EQ(print(parse(printed)), printed) << "seed " << seed;
    }
}

TEST(Print, PragmaCountAndOrderPreserved) {
    auto unit = parse(
        "void f(int v[8]) { int i; int j;\n"
        "#pragma stml iteration_independent\n#pragma stml loop_schedule\n"
        "for (i = 0; i < 2; i++) {\n#pragma stml unroll 2\nfor (j = 0; j < 4; j++) v[i * 4 + j] = 0; } }");
    auto again = parse(print(unit));
    const auto& outer = again.functions[0].body.children[2];
    ASSERT_EQ(outer.pragmas.size(), 2u);
    EXPECT_EQ(outer.pragmas[0].kind, Pragma::Kind::IterationIndependent);
    EXPECT_EQ(outer.pragmas[1].kind, Pragma::Kind::LoopSchedule);
    EXPECT_EQ(outer.for_body().children[0].pragmas.size(), 1u);
}

// ---------------------------------------------------------------------------
// interpret

TEST(Interpret, IdentityFill) {
    auto unit = parse("void f(int a[4]) { int i; for(i=0;i<4;i++) a[i]=i; }");
    auto out = interpret(unit, "f", {{"a", std::vector<std::int64_t>(4, 0)}});
    EXPECT_EQ(array_of(out, "a"), (std::vector<std::int64_t>{0, 1, 2, 3}));
}

TEST(Interpret, OutOfBounds) {
    auto unit = parse("void f(int a[4]) { a[4] = 1; }");
    try {
        interpret(unit, "f", {{"a", std::vector<std::int64_t>(4, 0)}});
        FAIL();
    } catch (const InterpretError& e) {
        EXPECT_EQ(e.kind(), InterpretError::Kind::OutOfBounds);
    }
    auto neg = parse("void f(int a[4]) { a[0 - 1] = 1; }");
    EXPECT_THROW(interpret(neg, "f", {{"a", std::vector<std::int64_t>(4, 0)}}), InterpretError);
}

TEST(Interpret, DivisionByZero) {
    auto unit = parse("void f(int a[1], int d) { a[0] = 7 % d; }");
    try {
        interpret(unit, "f", {{"a", std::vector<std::int64_t>(1, 0)}, {"d", std::int64_t{0}}});
        FAIL();
    } catch (const InterpretError& e) {
        EXPECT_EQ(e.kind(), InterpretError::Kind::DivisionByZero);
    }
}

TEST(Interpret, StepBudget) {
    auto unit = parse("void f(int a[1]) { int i; for (i = 0; i < 1; i = i + 0) a[0] = a[0] + 1; }");
    InterpretOptions opts;
    opts.step_budget = 1000;
    try {
        interpret(unit, "f", {{"a", std::vector<std::int64_t>(1, 0)}}, opts);
        FAIL();
    } catch (const InterpretError& e) {
        EXPECT_EQ(e.kind(), InterpretError::Kind::StepBudgetExceeded);
    }
}

TEST(Interpret, UndefinedCallRejected) {
    auto unit = parse("void f(int v[4]) { clean(v); }");
    try {
        interpret(unit, "f", {{"v", std::vector<std::int64_t>(4, 0)}});
        FAIL();
    } catch (const InterpretError& e) {
        EXPECT_EQ(e.kind(), InterpretError::Kind::UndefinedFunction);
    }
}

TEST(Interpret, CDivisionAndWrapping) {
    auto unit = parse("void f(int a[4], int big) { a[0] = -7 / 2; a[1] = -7 % 2; a[2] = big * big; a[3] = (3 < 4) + (4 == 4); }");
    auto out = interpret(unit, "f", {{"a", std::vector<std::int64_t>(4, 0)}, {"big", std::int64_t{1} << 40}});
    auto a = array_of(out, "a");
    EXPECT_EQ(a[0], -3);
    EXPECT_EQ(a[1], -1);
    EXPECT_EQ(a[2], 0);  // 2^80 wraps to 0
    EXPECT_EQ(a[3], 2);
}

TEST(Interpret, BreakContinueAndCalls) {
    auto unit = parse(
        "void bump(int v[8], int k) { v[k] = v[k] + 100; }\n"
        "void f(int v[8]) {\n"
        "  int i;\n"
        "  for (i = 0; i < 8; i++) {\n"
        "    if (i == 1) continue;\n"
        "    if (i == 5) break;\n"
        "    v[i] = i;\n"
        "  }\n"
        "  bump(v, 7);\n"
        "}");
    auto out = interpret(unit, "f", {{"v", std::vector<std::int64_t>(8, -1)}});
    EXPECT_EQ(array_of(out, "v"), (std::vector<std::int64_t>{0, -1, 2, 3, 4, -1, -1, 99}));
}

TEST(Interpret, GlobalsWrittenAreReported) {
    auto unit = parse("int g; int h; void f(int a[1]) { g = a[0] + 1; }");
    auto out = interpret(unit, "f", {{"a", std::vector<std::int64_t>{41}}});
    EXPECT_EQ(std::get<std::int64_t>(out.at("g")), 42);
    EXPECT_EQ(out.count("h"), 0u);
}

TEST(Interpret, Deterministic) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto unit = parse(rewrite_rl::testing::random_flatten_program(seed));
        auto inputs = rewrite_rl::testing::random_inputs(unit, "kernel", seed);
        EXPECT_EQ(interpret(unit, "kernel", inputs), interpret(unit, "kernel", inputs));
    }
}

// The collapsed form of a two-level nest, written by hand, must agree with the
// original nest on random inputs.
TEST(Interpret, LoopCollapsePairAgreesOnRandomInputs) {
    const char* original =
        "const int N = 5;\nconst int M = 7;\n"
        "void k(int in[35], int out[35], int acc[1]) {\n"
        "  int i; int j;\n"
        "  for (i = 0; i < N; i++)\n"
        "    for (j = 0; j < M; j++) {\n"
        "      out[i * M + j] = in[i * M + j] * (i + 1) - j;\n"
        "      acc[0] = acc[0] + out[i * M + j] % 3;\n"
        "    }\n"
        "}";
    const char* collapsed =
        "const int N = 5;\nconst int M = 7;\n"
        "void k(int in[35], int out[35], int acc[1]) {\n"
        "  int i; int j; int __k0;\n"
        "  for (__k0 = 0; __k0 < N * M; __k0++) {\n"
        "    int i = __k0 / M;\n"
        "    int j = __k0 % M;\n"
        "    out[i * M + j] = in[i * M + j] * (i + 1) - j;\n"
        "    acc[0] = acc[0] + out[i * M + j] % 3;\n"
        "  }\n"
        "}";
    auto a = parse(original);
    auto b = parse(collapsed);
    for (std::uint64_t seed = 0; seed < 128; ++seed) {
        auto inputs = rewrite_rl::testing::random_inputs(a, "k", seed);
        EXPECT_EQ(interpret(a, "k", inputs), interpret(b, "k", inputs)) << "seed " << seed;
    }
}
