#include "rewrite_rl/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rewrite_rl/errors.hpp"

namespace rewrite_rl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

void check_schema(const json& doc, const char* what) {
    if (!doc.is_object()) throw FormatError(std::string(what) + ": expected a JSON object");
    auto it = doc.find("schema");
    if (it == doc.end()) throw FormatError(std::string(what) + ": missing \"schema\"");
    if (!it->is_number_integer() || it->get<int>() != kSchemaVersion) {
        throw FormatError(std::string(what) + ": unsupported schema " + it->dump());
    }
}

template <typename T>
T field(const json& obj, const char* key, const char* what) {
    auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(std::string(what) + ": missing \"" + key + "\"");
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string(what) + ": bad \"" + key + "\": " + e.what());
    }
}

StateKey state_field(const json& obj, const char* key, const char* what) {
    auto text = field<std::string>(obj, key, what);
    if (!parse_state_key(text)) throw FormatError(std::string(what) + ": \"" + text + "\" is not a state key");
    return StateKey(text);
}

RuleId rule_field(const json& obj, const char* key, const char* what) {
    auto v = field<std::int64_t>(obj, key, what);
    if (v < 0 || v > UINT32_MAX) throw FormatError(std::string(what) + ": rule id out of range");
    return RuleId(static_cast<std::uint32_t>(v));
}

std::string format_double(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

std::string quoted(const std::string& s) { return json(s).dump(); }

PlatformSet classes_from_json(const json& arr, const char* what) {
    if (!arr.is_array() || arr.empty()) throw FormatError(std::string(what) + ": classes must be a non-empty array");
    PlatformSet set;
    for (const auto& name : arr) {
        if (!name.is_string()) throw FormatError(std::string(what) + ": class names must be strings");
        auto p = parse_platform(name.get<std::string>());
        if (!p) throw FormatError(std::string(what) + ": unknown platform \"" + name.get<std::string>() + "\"");
        set.insert(*p);
    }
    return set;
}

ordered_json classes_to_json(const PlatformSet& set) {
    ordered_json arr = ordered_json::array();
    for (auto p : set.members()) arr.push_back(std::string(platform_name(p)));
    return arr;
}

FeatureVector features_from_json(const json& arr, const char* what) {
    if (!arr.is_array() || arr.size() != kFeatureCount) {
        throw FormatError(std::string(what) + ": features must be an array of " + std::to_string(kFeatureCount));
    }
    FeatureVector fv;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (!arr[i].is_number_integer() || arr[i].get<std::int64_t>() < 0) {
            throw FormatError(std::string(what) + ": features must be non-negative integers");
        }
        fv[i] = arr[i].get<std::int64_t>();
    }
    return fv;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << contents;
    if (!out) throw FormatError("failed writing " + path.string());
}

std::string features_to_json(const FeatureVector& fv) {
    return json(fv.values()).dump();
}

// ---------------------------------------------------------------------------

std::string graph_to_json(const TrainingGraph& graph) {
    ordered_json doc;
    doc["schema"] = kSchemaVersion;
    ordered_json states = ordered_json::array();
    for (const auto& s : graph.states()) states.push_back(s.str());
    doc["states"] = states;
    ordered_json transitions = ordered_json::array();
    for (const auto& t : graph.transitions()) {
        ordered_json e;
        e["s"] = t.from.str();
        e["a"] = t.action.value;
        e["s'"] = t.to.str();
        transitions.push_back(e);
    }
    doc["transitions"] = transitions;
    ordered_json finals = ordered_json::array();
    for (const auto& [s, r] : graph.finals()) {
        ordered_json f;
        f["state"] = s.str();
        f["reward"] = r;
        finals.push_back(f);
    }
    doc["finals"] = finals;
    return doc.dump(2) + "\n";
}

TrainingGraph graph_from_json(std::string_view text) {
    const char* what = "training graph";
    json doc = parse_json(text, what);
    check_schema(doc, what);
    TrainingGraph g;
    auto states = doc.find("states");
    if (states != doc.end()) {
        if (!states->is_array()) throw FormatError("training graph: \"states\" must be an array");
        for (const auto& s : *states) {
            if (!s.is_string() || !parse_state_key(s.get<std::string>())) {
                throw FormatError("training graph: bad state " + s.dump());
            }
            g.add_state(StateKey(s.get<std::string>()));
        }
    }
    for (const auto& t : field<std::vector<json>>(doc, "transitions", what)) {
        g.add_transition(state_field(t, "s", what), rule_field(t, "a", what), state_field(t, "s'", what));
    }
    for (const auto& f : field<std::vector<json>>(doc, "finals", what)) {
        double r = field<double>(f, "reward", what);
        if (!std::isfinite(r)) throw FormatError("training graph: reward must be finite");
        g.add_final(state_field(f, "state", what), r);
    }
    return g;
}

// ---------------------------------------------------------------------------

std::string qtable_to_json(const QTable& q) {
    // Written by hand so every value carries exactly 17 significant digits.
    std::ostringstream os;
    os << "{\n  \"schema\": " << kSchemaVersion << ",\n  \"q_init\": " << format_double(q.q_init())
       << ",\n  \"rows\": {";
    bool first_row = true;
    for (const auto& s : q.states()) {
        os << (first_row ? "\n" : ",\n") << "    " << quoted(s.str()) << ": {";
        first_row = false;
        bool first = true;
        for (const auto& [a, v] : q.row(s)) {
            os << (first ? "" : ", ") << quoted(std::to_string(a.value)) << ": " << format_double(v);
            first = false;
        }
        os << "}";
    }
    os << (first_row ? "},\n" : "\n  },\n") << "  \"finals\": [";
    bool first = true;
    for (const auto& s : q.finals()) {
        os << (first ? "" : ", ") << quoted(s.str());
        first = false;
    }
    os << "]\n}\n";
    return os.str();
}

QTable qtable_from_json(std::string_view text) {
    const char* what = "Q table";
    json doc = parse_json(text, what);
    check_schema(doc, what);
    QTable q(field<double>(doc, "q_init", what));
    auto rows = doc.find("rows");
    if (rows == doc.end() || !rows->is_object()) throw FormatError("Q table: \"rows\" must be an object");
    std::vector<StateKey> finals;
    if (auto f = doc.find("finals"); f != doc.end()) {
        if (!f->is_array()) throw FormatError("Q table: \"finals\" must be an array");
        for (const auto& s : *f) {
            if (!s.is_string() || !parse_state_key(s.get<std::string>())) throw FormatError("Q table: bad final " + s.dump());
            finals.emplace_back(s.get<std::string>());
        }
    }
    std::set<StateKey> final_set(finals.begin(), finals.end());
    for (const auto& [key, row] : rows->items()) {
        if (!parse_state_key(key)) throw FormatError("Q table: \"" + key + "\" is not a state key");
        StateKey s(key);
        q.add_state(s);
        if (!row.is_object()) throw FormatError("Q table: row " + key + " must be an object");
        for (const auto& [id, value] : row.items()) {
            std::size_t used = 0;
            unsigned long a = 0;
            try {
                a = std::stoul(id, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != id.size() || a > UINT32_MAX) throw FormatError("Q table: bad rule id \"" + id + "\"");
            if (!value.is_number()) throw FormatError("Q table: value for " + key + "/" + id + " is not a number");
            RuleId rule(static_cast<std::uint32_t>(a));
            q.add_action(rule);
            double v = value.get<double>();
            if (final_set.count(s)) {
                if (v != q.q_init()) throw FormatError("Q table: final row " + key + " differs from q_init");
            } else if (v != q.q_init()) {
                q.set(s, rule, v);
            }
        }
    }
    for (const auto& s : finals) q.mark_final(s);
    return q;
}

// ---------------------------------------------------------------------------

std::string tree_to_json(const DecisionTree& tree) {
    ordered_json doc;
    doc["schema"] = kSchemaVersion;
    ordered_json nodes = ordered_json::array();
    for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
        const auto& n = tree.nodes()[i];
        ordered_json node;
        node["id"] = i;
        if (n.leaf) {
            node["kind"] = "leaf";
            node["class"] = classes_to_json(n.label);
        } else {
            node["kind"] = "split";
            node["feature"] = n.feature;
            node["threshold"] = n.threshold;
            node["left"] = n.left;
            node["right"] = n.right;
        }
        ordered_json counts = ordered_json::array();
        for (const auto& [cls, c] : n.counts) {
            ordered_json entry;
            entry["class"] = classes_to_json(cls);
            entry["count"] = c;
            counts.push_back(entry);
        }
        node["counts"] = counts;
        nodes.push_back(node);
    }
    doc["nodes"] = nodes;
    return doc.dump(2) + "\n";
}

DecisionTree tree_from_json(std::string_view text) {
    const char* what = "decision tree";
    json doc = parse_json(text, what);
    check_schema(doc, what);
    auto nodes_json = field<std::vector<json>>(doc, "nodes", what);
    std::vector<TreeNode> nodes(nodes_json.size());
    std::vector<bool> seen(nodes.size(), false);
    for (const auto& nj : nodes_json) {
        auto id = field<std::size_t>(nj, "id", what);
        if (id >= nodes.size() || seen[id]) throw FormatError("decision tree: bad node id " + std::to_string(id));
        seen[id] = true;
        TreeNode& n = nodes[id];
        auto kind = field<std::string>(nj, "kind", what);
        if (kind == "leaf") {
            n.leaf = true;
            n.label = classes_from_json(nj.at("class"), what);
        } else if (kind == "split") {
            n.leaf = false;
            n.feature = field<std::size_t>(nj, "feature", what);
            n.threshold = field<double>(nj, "threshold", what);
            n.left = field<std::size_t>(nj, "left", what);
            n.right = field<std::size_t>(nj, "right", what);
        } else {
            throw FormatError("decision tree: unknown node kind \"" + kind + "\"");
        }
        if (auto c = nj.find("counts"); c != nj.end()) {
            if (!c->is_array()) throw FormatError("decision tree: \"counts\" must be an array");
            for (const auto& entry : *c) {
                n.counts[classes_from_json(entry.at("class"), what)] = field<std::size_t>(entry, "count", what);
            }
        }
    }
    DecisionTree tree(std::move(nodes));
    try {
        tree.validate();
    } catch (const ClassifyError& e) {
        throw FormatError(std::string("decision tree: ") + e.what());
    }
    return tree;
}

// ---------------------------------------------------------------------------

std::vector<LabeledSample> corpus_from_json(std::string_view text) {
    const char* what = "corpus";
    json doc = parse_json(text, what);
    const json* samples = &doc;
    if (doc.is_object()) {
        check_schema(doc, what);
        auto it = doc.find("samples");
        if (it == doc.end()) throw FormatError("corpus: missing \"samples\"");
        samples = &*it;
    }
    if (!samples->is_array()) throw FormatError("corpus: expected an array of samples");
    std::vector<LabeledSample> out;
    for (const auto& s : *samples) {
        if (!s.is_object() || !s.contains("features") || !s.contains("classes")) {
            throw FormatError("corpus: each sample needs \"features\" and \"classes\"");
        }
        out.push_back({features_from_json(s["features"], what), classes_from_json(s["classes"], what)});
    }
    return out;
}

std::string corpus_to_json(const std::vector<LabeledSample>& samples) {
    ordered_json doc;
    doc["schema"] = kSchemaVersion;
    ordered_json arr = ordered_json::array();
    for (const auto& s : samples) {
        ordered_json e;
        e["features"] = s.x.values();
        e["classes"] = classes_to_json(s.y);
        arr.push_back(e);
    }
    doc["samples"] = arr;
    return doc.dump(2) + "\n";
}

}  // namespace rewrite_rl
