#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "data_path.hpp"
#include "rewrite_rl/serialize.hpp"

using rewrite_rl::testing::data_path;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = rewrite_rl::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("rewrite_rl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

    std::string trained_table() {
        auto q = tmp("q.json");
        auto r = run({"train", "--graph", data_path("convolution_graph.json"), "--episodes", "500", "--seed", "3",
                      "-o", q});
        EXPECT_EQ(r.code, 0) << r.err;
        return q;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, ExtractJsonIsTheVector) {
    auto r = run({"extract", data_path("convolution.c"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "[3,0,0,0,0,0,0,0,0,6,2,3,0,4,0]\n");
}

TEST_F(Cli, ExtractTableNamesComponents) {
    auto r = run({"extract", data_path("snippets/loop_schedule.c")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("loop_schedule_flag"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"train"}).code, 2);
    EXPECT_EQ(run({"train", "--graph", "g.json", "--alpha", "abc"}).code, 2);
    EXPECT_EQ(run({"run", data_path("convolution.c"), "--qtable", "q", "--tree", "t", "--target", "tpu"}).code, 2);
}

TEST_F(Cli, MissingGraphExitsOneNamingTheFile) {
    auto missing = tmp("absent.json");
    auto r = run({"train", "--graph", missing, "-o", tmp("q.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(tmp("q.json")));
}

TEST_F(Cli, DomainErrorsExitOne) {
    auto bad = tmp("bad.c");
    rewrite_rl::write_file(bad, "void f() { x = 1; }");
    auto r = run({"extract", bad});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("1:"), std::string::npos) << r.err;
    EXPECT_EQ(run({"apply", data_path("convolution.c"), "--rule", "9"}).code, 1);
    EXPECT_EQ(run({"apply", data_path("convolution.c"), "--rule", "0", "--site", "3"}).code, 1);
}

TEST_F(Cli, ApplyMatchesShippedStep) {
    auto r = run({"apply", data_path("convolution.c"), "--rule", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, rewrite_rl::read_file(data_path("convolution_steps/c1.c")));
}

TEST_F(Cli, TrainIsByteIdentical) {
    auto a = tmp("a.json");
    auto b = tmp("b.json");
    for (const auto& out : {a, b}) {
        auto r = run({"train", "--graph", data_path("convolution_graph.json"), "--seed", "11", "-o", out});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    EXPECT_EQ(rewrite_rl::read_file(a), rewrite_rl::read_file(b));
}

TEST_F(Cli, RunReachesFinalInFourSteps) {
    auto q = trained_table();
    auto r = run({"run", data_path("convolution.c"), "--qtable", q, "--tree", data_path("tree.json"), "--target",
                  "fpga", "--max-steps", "10", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc.at("schema"), 1);
    EXPECT_EQ(doc.at("terminal"), "final");
    ASSERT_EQ(doc.at("steps").size(), 4u);
    std::vector<int> rules;
    for (const auto& s : doc.at("steps")) rules.push_back(s.at("rule"));
    EXPECT_EQ(rules, (std::vector<int>{0, 0, 0, 1}));
    EXPECT_FALSE(doc.contains("elapsed_ms"));
}

TEST_F(Cli, RunJsonIsByteIdentical) {
    auto q = trained_table();
    std::vector<std::string> args{"run", data_path("convolution.c"), "--qtable", q, "--tree", data_path("tree.json"),
                                  "--target", "fpga", "--json"};
    auto first = run(args);
    auto second = run(args);
    ASSERT_EQ(first.code, 0) << first.err;
    EXPECT_EQ(first.out, second.out);
}

TEST_F(Cli, RunWritesTheTransformedUnit) {
    auto q = trained_table();
    auto out = tmp("out.c");
    auto r = run({"run", data_path("convolution.c"), "--qtable", q, "--tree", data_path("tree.json"), "--target",
                  "fpga", "-o", out});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(rewrite_rl::read_file(out), rewrite_rl::read_file(data_path("convolution_steps/c4.c")));
}

TEST_F(Cli, ClassifyFitAndPredict) {
    auto tree = tmp("tree.json");
    auto fit = run({"classify", "fit", "--corpus", data_path("corpus.json"), "-o", tree});
    ASSERT_EQ(fit.code, 0) << fit.err;
    EXPECT_EQ(rewrite_rl::read_file(tree), rewrite_rl::read_file(data_path("tree.json")));
    auto predict = run({"classify", "predict", "--tree", tree, "--features", "2,0,0,0,0,0,0,0,0,5,2,0,2,3,0"});
    ASSERT_EQ(predict.code, 0) << predict.err;
    EXPECT_NE(predict.out.find("FPGA"), std::string::npos) << predict.out;
    EXPECT_EQ(run({"classify", "predict", "--tree", tree, "--features", "1,2,3"}).code, 2);
    EXPECT_EQ(run({"classify", "predict", "--tree", tmp("none.json"), "--features", "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0"}).code,
              1);
}

TEST_F(Cli, SequenceBuildsTheShippedGraph) {
    auto g = tmp("g.json");
    auto r = run({"sequence", data_path("convolution.c"), "--rules", "0,0,0,1", "--reward", "100", "-o", g});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(rewrite_rl::read_file(g), rewrite_rl::read_file(data_path("convolution_graph.json")));
}

TEST_F(Cli, QTableShow) {
    auto q = trained_table();
    auto r = run({"qtable-show", q});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("3,0,0,0,0,0,0,0,0,6,2,3,0,4,0"), std::string::npos) << r.out;
}
