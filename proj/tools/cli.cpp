#include "cli.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rewrite_rl/classify.hpp"
#include "rewrite_rl/driver.hpp"
#include "rewrite_rl/errors.hpp"
#include "rewrite_rl/features.hpp"
#include "rewrite_rl/log.hpp"
#include "rewrite_rl/parser.hpp"
#include "rewrite_rl/printer.hpp"
#include "rewrite_rl/qlearning.hpp"
#include "rewrite_rl/rules.hpp"
#include "rewrite_rl/serialize.hpp"

namespace rewrite_rl::cli {
namespace {

using nlohmann::ordered_json;

/// Usage problem detected after CLI11 parsing (bad CSV, unknown platform, ...).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string file;
    std::string output;
    bool json = false;

    // apply
    std::uint32_t rule = 0;
    std::size_t site = 0;

    // classify
    std::string corpus;
    std::string tree;
    std::string features;
    std::size_t min_samples = 1;
    std::size_t max_depth = 0;

    // train
    std::string graph;
    LearnConfig learn;

    // run
    std::string qtable;
    std::string target;
    std::size_t max_steps = 50;
    std::uint64_t seed = 0;
    bool timing = false;

    // sequence
    std::string rules;
    double reward = 100.0;
};

TranslationUnit load_unit(const std::string& path) { return parse(read_file(path)); }

void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.output.empty()) {
        out << text;
    } else {
        write_file(o.output, text);
    }
}

ordered_json site_json(const Site& s) { return s.path; }

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, ',')) parts.push_back(cur);
    if (!text.empty() && text.back() == ',') parts.emplace_back();
    return parts;
}

std::int64_t parse_natural(const std::string& s, const char* what) {
    std::size_t used = 0;
    long long v = -1;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || v < 0) throw UsageError(std::string("bad ") + what + " \"" + s + "\"");
    return v;
}

FeatureVector parse_features(const std::string& csv) {
    auto parts = split_csv(csv);
    if (parts.size() != kFeatureCount) {
        throw UsageError("--features needs " + std::to_string(kFeatureCount) + " comma-separated values, got " +
                         std::to_string(parts.size()));
    }
    FeatureVector fv;
    for (std::size_t i = 0; i < kFeatureCount; ++i) fv[i] = parse_natural(parts[i], "feature value");
    return fv;
}

Platform parse_target(const std::string& text) {
    auto p = parse_platform(text);
    if (!p) throw UsageError("unknown target platform \"" + text + "\" (fpga, gpu, sm_cpu, dm_cpu)");
    return *p;
}

// ---------------------------------------------------------------------------

int cmd_extract(const Options& o, std::ostream& out) {
    FeatureVector fv = extract(load_unit(o.file));
    if (o.json) {
        out << features_to_json(fv) << '\n';
        return 0;
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        out << std::setw(2) << i << "  " << std::left << std::setw(32) << feature_name(static_cast<Feature>(i))
            << std::right << fv[i] << '\n';
    }
    return 0;
}

int cmd_apply(const Options& o, std::ostream& out) {
    TranslationUnit unit = load_unit(o.file);
    auto registry = RuleRegistry::with_defaults();
    RuleId id(o.rule);
    auto sites = registry.find_sites(unit, id);
    if (o.site >= sites.size()) {
        throw RuleError(RuleError::Kind::SiteMismatch, std::string(registry.get(id).name()) + " has " +
                                                           std::to_string(sites.size()) + " site(s); index " +
                                                           std::to_string(o.site) + " is out of range");
    }
    auto result = registry.apply(unit, id, sites[o.site]);
    std::string source = print(result.unit);
    if (o.json) {
        ordered_json doc;
        doc["schema"] = kSchemaVersion;
        doc["rule"] = id.value;
        doc["site"] = site_json(result.site);
        doc["features"] = extract(result.unit).values();
        doc["source"] = source;
        emit(o, out, doc.dump(2) + "\n");
    } else {
        emit(o, out, source);
    }
    return 0;
}

int cmd_classify_fit(const Options& o, std::ostream& out) {
    auto samples = corpus_from_json(read_file(o.corpus));
    FitParams params;
    params.min_samples = o.min_samples;
    if (o.max_depth > 0) params.max_depth = o.max_depth;
    DecisionTree tree = fit(samples, params);
    std::size_t correct = 0;
    for (const auto& s : samples) correct += predict(tree, s.x) == s.y;
    std::string doc = tree_to_json(tree);
    if (o.output.empty()) {
        out << doc;
        return 0;
    }
    write_file(o.output, doc);
    if (o.json) {
        ordered_json summary;
        summary["schema"] = kSchemaVersion;
        summary["samples"] = samples.size();
        summary["nodes"] = tree.nodes().size();
        summary["depth"] = tree.depth();
        summary["training_correct"] = correct;
        out << summary.dump() << '\n';
    } else {
        out << "fitted " << tree.nodes().size() << " nodes (depth " << tree.depth() << ") on " << samples.size()
            << " samples; training accuracy " << correct << "/" << samples.size() << '\n';
    }
    return 0;
}

int cmd_classify_predict(const Options& o, std::ostream& out) {
    DecisionTree tree = tree_from_json(read_file(o.tree));
    FeatureVector fv = parse_features(o.features);
    PlatformSet cls = predict(tree, fv);
    if (o.json) {
        ordered_json doc;
        ordered_json names = ordered_json::array();
        for (auto p : cls.members()) names.push_back(std::string(platform_name(p)));
        doc["class"] = names;
        out << doc.dump() << '\n';
    } else {
        out << cls.to_string() << '\n';
    }
    return 0;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
    TrainingGraph graph = graph_from_json(read_file(o.graph));
    for (const auto& w : validate(o.learn)) err << "warning: " << w << '\n';
    QTable q = train(graph, o.learn);
    emit(o, out, qtable_to_json(q));
    return 0;
}

int cmd_run(const Options& o, std::ostream& out) {
    Platform target = parse_target(o.target);
    TranslationUnit unit = load_unit(o.file);
    QTable q = qtable_from_json(read_file(o.qtable));
    DecisionTree tree = tree_from_json(read_file(o.tree));
    auto registry = RuleRegistry::with_defaults();

    auto start = std::chrono::steady_clock::now();
    DriveResult r = transform_greedy(unit, q, registry, tree, target, o.max_steps, o.seed);
    double elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (!o.output.empty()) write_file(o.output, print(r.unit));
    if (o.json) {
        ordered_json doc;
        doc["schema"] = kSchemaVersion;
        doc["target"] = std::string(platform_name(target));
        doc["initial"] = r.initial.values();
        ordered_json steps = ordered_json::array();
        for (const auto& s : r.steps) {
            ordered_json step;
            step["rule"] = s.rule.value;
            step["name"] = std::string(registry.get(s.rule).name());
            step["site"] = site_json(s.site);
            step["features"] = s.after.values();
            steps.push_back(step);
        }
        doc["steps"] = steps;
        doc["terminal"] = std::string(to_string(r.terminal));
        if (o.timing) doc["elapsed_ms"] = elapsed_ms;
        out << doc.dump(2) << '\n';
        return 0;
    }
    out << "target: " << platform_name(target) << '\n';
    out << "start: " << state_key(r.initial).str() << '\n';
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& s = r.steps[i];
        out << "step " << i + 1 << ": R" << s.rule.value << " " << registry.get(s.rule).name() << " at "
            << to_string(s.site) << " -> " << state_key(s.after).str() << '\n';
    }
    out << "terminal: " << to_string(r.terminal) << " after " << r.steps.size() << " step(s)\n";
    out << "elapsed: " << std::fixed << std::setprecision(3) << elapsed_ms << " ms\n";
    if (o.output.empty()) out << "\n" << print(r.unit);
    return 0;
}

int cmd_qtable_show(const Options& o, std::ostream& out) {
    QTable q = qtable_from_json(read_file(o.file));
    if (o.json) {
        out << qtable_to_json(q);
        return 0;
    }
    out << std::left << std::setw(40) << "state";
    for (auto a : q.actions()) out << std::right << std::setw(16) << ("R" + std::to_string(a.value));
    out << '\n';
    for (const auto& s : q.states()) {
        out << std::left << std::setw(40) << s.str();
        for (const auto& [a, v] : q.row(s)) {
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(8) << v;
            out << std::right << std::setw(16) << cell.str();
        }
        if (q.is_final(s)) out << "  (final)";
        out << '\n';
    }
    return 0;
}

int cmd_sequence(const Options& o, std::ostream& out) {
    TranslationUnit unit = load_unit(o.file);
    std::vector<RuleId> seq;
    for (const auto& part : split_csv(o.rules)) {
        seq.emplace_back(static_cast<std::uint32_t>(parse_natural(part, "rule id")));
    }
    auto registry = RuleRegistry::with_defaults();
    for (auto id : seq) registry.get(id);
    emit(o, out, graph_to_json(sequence_graph(unit, registry, seq, o.reward)));
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Learned rule selection for source-to-source rewriting", "rewrite-rl"};
    app.require_subcommand(1);

    auto* extract_cmd = app.add_subcommand("extract", "Print the 15-component feature vector of a source file");
    extract_cmd->add_option("file", o.file, "Source file")->required();
    extract_cmd->add_flag("--json", o.json, "JSON array output");

    auto* apply_cmd = app.add_subcommand("apply", "Apply one rewrite rule");
    apply_cmd->add_option("file", o.file, "Source file")->required();
    apply_cmd->add_option("--rule", o.rule, "Rule id (0 flatten_array, 1 collapse_loops)")->required();
    apply_cmd->add_option("--site", o.site, "Index into the rule's matching sites");
    apply_cmd->add_option("-o,--output", o.output, "Write to file instead of stdout");
    apply_cmd->add_flag("--json", o.json, "JSON output");

    auto* classify_cmd = app.add_subcommand("classify", "Platform classifier");
    classify_cmd->require_subcommand(1);
    auto* fit_cmd = classify_cmd->add_subcommand("fit", "Fit a decision tree on a labelled corpus");
    fit_cmd->add_option("--corpus", o.corpus, "Corpus JSON")->required();
    fit_cmd->add_option("-o,--output", o.output, "Tree JSON destination");
    fit_cmd->add_option("--min-samples", o.min_samples, "Minimum samples per leaf")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--max-depth", o.max_depth, "Depth limit (0 = unlimited)");
    fit_cmd->add_flag("--json", o.json, "JSON summary");
    auto* predict_cmd = classify_cmd->add_subcommand("predict", "Predict the platform class of a feature vector");
    predict_cmd->add_option("--tree", o.tree, "Tree JSON")->required();
    predict_cmd->add_option("--features", o.features, "15 comma-separated integers")->required();
    predict_cmd->add_flag("--json", o.json, "JSON output");

    auto* train_cmd = app.add_subcommand("train", "Train a Q table on a transformation graph");
    train_cmd->add_option("--graph", o.graph, "Training graph JSON")->required();
    train_cmd->add_option("--alpha", o.learn.alpha, "Learning rate")->capture_default_str();
    train_cmd->add_option("--gamma", o.learn.gamma, "Discount factor")->capture_default_str();
    train_cmd->add_option("--episodes", o.learn.episodes, "Number of episodes")->capture_default_str();
    train_cmd->add_option("--seed", o.learn.seed, "RNG seed")->capture_default_str();
    train_cmd->add_option("--q-init", o.learn.q_init, "Initial Q value")->capture_default_str();
    train_cmd->add_option("--max-steps", o.learn.max_steps, "Episode step cap")->capture_default_str();
    train_cmd->add_option("--epsilon", o.learn.epsilon, "Exploration probability")->capture_default_str();
    train_cmd->add_option("-o,--output", o.output, "Q table JSON destination");
    train_cmd->add_flag("--json", o.json, "Accepted for uniformity; output is always JSON");

    auto* run_cmd = app.add_subcommand("run", "Transform a source file with the learned policy");
    run_cmd->add_option("file", o.file, "Source file")->required();
    run_cmd->add_option("--qtable", o.qtable, "Q table JSON")->required();
    run_cmd->add_option("--tree", o.tree, "Tree JSON")->required();
    run_cmd->add_option("--target", o.target, "fpga, gpu, sm_cpu or dm_cpu")->required();
    run_cmd->add_option("--max-steps", o.max_steps, "Step budget")->capture_default_str();
    run_cmd->add_option("--seed", o.seed, "Seed for Q-value tie-breaking")->capture_default_str();
    run_cmd->add_option("-o,--output", o.output, "Write the transformed source here");
    run_cmd->add_flag("--json", o.json, "JSON run report");
    run_cmd->add_flag("--timing", o.timing, "Include wall time in the JSON report");

    auto* show_cmd = app.add_subcommand("qtable-show", "Print a Q table");
    show_cmd->add_option("file", o.file, "Q table JSON")->required();
    show_cmd->add_flag("--json", o.json, "Canonical JSON output");

    auto* seq_cmd = app.add_subcommand("sequence", "Build a training graph from a rule sequence");
    seq_cmd->add_option("file", o.file, "Source file")->required();
    seq_cmd->add_option("--rules", o.rules, "Comma-separated rule ids, e.g. 0,0,0,1")->required();
    seq_cmd->add_option("--reward", o.reward, "Reward of the last state")->capture_default_str();
    seq_cmd->add_option("-o,--output", o.output, "Graph JSON destination");
    seq_cmd->add_flag("--json", o.json, "Accepted for uniformity; output is always JSON");

    std::vector<const char*> argv{"rewrite-rl"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    set_log_sink(&err);
    struct RestoreSink {
        ~RestoreSink() { set_log_sink(nullptr); }
    } restore;

    try {
        if (extract_cmd->parsed()) return cmd_extract(o, out);
        if (apply_cmd->parsed()) return cmd_apply(o, out);
        if (fit_cmd->parsed()) return cmd_classify_fit(o, out);
        if (predict_cmd->parsed()) return cmd_classify_predict(o, out);
        if (train_cmd->parsed()) return cmd_train(o, out, err);
        if (run_cmd->parsed()) return cmd_run(o, out);
        if (show_cmd->parsed()) return cmd_qtable_show(o, out);
        if (seq_cmd->parsed()) return cmd_sequence(o, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    err << app.help();
    return 2;
}

}  // namespace rewrite_rl::cli
