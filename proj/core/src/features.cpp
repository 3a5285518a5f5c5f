#include "rewrite_rl/features.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <vector>

namespace rewrite_rl {
namespace {

using NameSet = std::set<std::string>;

struct LoopRecord {
    const Stmt* loop = nullptr;
    std::size_t begin = 0;  // pre-order index of the For node
    std::size_t end = 0;    // one past its last descendant
    std::size_t depth = 0;  // number of enclosing For loops
    std::vector<const Stmt*> enclosing;  // outermost first
};

/// Pre-order flattening of one function body, with every For's extent.
struct FlatFunction {
    std::vector<const Stmt*> order;
    std::vector<LoopRecord> loops;
};

void flatten(const Stmt& s, std::vector<const Stmt*>& enclosing, FlatFunction& out) {
    std::size_t index = out.order.size();
    out.order.push_back(&s);
    std::size_t record = 0;
    if (s.kind == Stmt::Kind::For) {
        record = out.loops.size();
        out.loops.push_back({&s, index, 0, enclosing.size(), enclosing});
        enclosing.push_back(&s);
    }
    for (const auto& c : s.children) flatten(c, enclosing, out);
    if (s.kind == Stmt::Kind::For) {
        enclosing.pop_back();
        out.loops[record].end = out.order.size();
    }
}

// Scalars given a value by this statement alone (not its children).
void own_scalar_writes(const Stmt& s, NameSet& out) {
    if (s.kind == Stmt::Kind::Assign && s.lhs.kind == Expr::Kind::Var) out.insert(s.lhs.name);
    if (s.kind == Stmt::Kind::Decl && s.decl.init && !s.decl.is_array()) out.insert(s.decl.name);
}

// Names this statement may modify: assignment targets and arrays handed whole to a call.
void own_named_writes(const Stmt& s, NameSet& out) {
    if (s.kind == Stmt::Kind::Assign) out.insert(s.lhs.name);
    own_exprs(s, [&](const Expr& root) {
        walk_expr(root, [&](const Expr& e) {
            if (e.kind != Expr::Kind::Call) return;
            for (const auto& a : e.operands) {
                if (a.kind == Expr::Kind::Var) out.insert(a.name);
            }
        });
    });
}

void expr_vars(const Expr& e, NameSet& out) {
    walk_expr(e, [&](const Expr& x) {
        if (x.kind == Expr::Kind::Var) out.insert(x.name);
    });
}

// Variables read by this statement alone; a scalar assignment target is not a read.
void own_reads(const Stmt& s, NameSet& out) {
    if (s.kind == Stmt::Kind::Assign) {
        if (s.lhs.kind == Expr::Kind::ArrayAccess) {
            for (const auto& i : s.lhs.operands) expr_vars(i, out);
        }
        expr_vars(s.expr, out);
        return;
    }
    own_exprs(s, [&](const Expr& e) { expr_vars(e, out); });
}

bool is_unit_step(const Stmt& step) {
    const std::string& v = step.lhs.name;
    const Expr& rhs = step.expr;
    if (rhs.kind != Expr::Kind::Binary || rhs.op != BinaryOp::Add) return false;
    return (rhs.lhs().is_var(v) && rhs.rhs() == Expr::lit(1)) ||
           (rhs.rhs().is_var(v) && rhs.lhs() == Expr::lit(1));
}

bool is_positive_offset(const Expr& index, const std::string& var) {
    if (index.kind != Expr::Kind::Binary || index.op != BinaryOp::Add) return false;
    const Expr& a = index.lhs();
    const Expr& b = index.rhs();
    return (a.is_var(var) && b.kind == Expr::Kind::IntLit && b.value > 0) ||
           (b.is_var(var) && a.kind == Expr::Kind::IntLit && a.value > 0);
}

// Array writes executed in one iteration of a loop whose body is `s`; nested loops are skipped.
void iteration_array_writes(const Stmt& s, std::vector<const Expr*>& out) {
    if (s.kind == Stmt::Kind::For) return;
    if (s.kind == Stmt::Kind::Assign && s.lhs.kind == Expr::Kind::ArrayAccess) out.push_back(&s.lhs);
    for (const auto& c : s.children) iteration_array_writes(c, out);
}

bool has_shifted_writes(const Stmt& loop) {
    std::vector<const Expr*> writes;
    iteration_array_writes(loop.for_body(), writes);
    std::map<std::string, std::pair<int, bool>> per_array;  // count, any positive offset
    for (const Expr* w : writes) {
        auto& entry = per_array[w->name];
        ++entry.first;
        for (const auto& idx : w->operands) {
            if (is_positive_offset(idx, loop.loop_var())) entry.second = true;
        }
    }
    return std::any_of(per_array.begin(), per_array.end(),
                       [](const auto& kv) { return kv.second.first >= 2 && kv.second.second; });
}

class Extractor {
public:
    explicit Extractor(const TranslationUnit& unit) : unit_(unit) {
        for (const auto& g : unit.globals) globals_.insert(g.name);
    }

    FeatureVector run() {
        for (const auto& g : unit_.globals) count_decl(g);
        for (const auto& fn : unit_.functions) function(fn);
        fv_[Feature::AuxIndexVars] = static_cast<std::int64_t>(aux_vars_.size());
        return fv_;
    }

private:
    void count_decl(const VarDecl& d) {
        if (d.dims.size() >= 2) ++fv_[Feature::NonOneDimArrays];
    }

    void function(const FunctionDef& fn) {
        for (const auto& p : fn.params) count_decl(p);

        // Structural counts plus global-write detection need scoping.
        std::vector<NameSet> scopes(1);
        for (const auto& p : fn.params) scopes.back().insert(p.name);
        scoped_walk(fn.body, scopes, 0);

        FlatFunction flat;
        std::vector<const Stmt*> enclosing;
        flatten(fn.body, enclosing, flat);
        for (const auto& rec : flat.loops) loop_features(flat, rec);
    }

    bool resolves_global(const std::string& name, const std::vector<NameSet>& scopes) const {
        for (const auto& s : scopes) {
            if (s.count(name)) return false;
        }
        return globals_.count(name) != 0;
    }

    void scoped_walk(const Stmt& s, std::vector<NameSet>& scopes, std::size_t loop_depth) {
        switch (s.kind) {
        case Stmt::Kind::For:
            ++fv_[Feature::ForLoops];
            fv_[Feature::MaxNestedLoopDepth] =
                std::max<std::int64_t>(fv_[Feature::MaxNestedLoopDepth], static_cast<std::int64_t>(loop_depth));
            if (s.has_pragma(Pragma::Kind::IterationIndependent)) ++fv_[Feature::IterationIndependentLoops];
            if (s.has_pragma(Pragma::Kind::LoopSchedule)) fv_[Feature::LoopSchedule] = 1;
            if (!is_unit_step(s.for_step())) ++fv_[Feature::NonNormalizedLoops];
            if (has_shifted_writes(s)) ++fv_[Feature::ShiftedArrayWrites];
            break;
        case Stmt::Kind::If:
            ++fv_[Feature::IfStatements];
            break;
        case Stmt::Kind::Break:
        case Stmt::Kind::Continue:
            fv_[Feature::IrregularLoops] = 1;
            break;
        case Stmt::Kind::Assign:
            if (resolves_global(s.lhs.name, scopes)) fv_[Feature::GlobalWrites] = 1;
            break;
        case Stmt::Kind::Decl:
            count_decl(s.decl);
            scopes.back().insert(s.decl.name);
            break;
        default:
            break;
        }
        own_exprs(s, [&](const Expr& root) {
            walk_expr(root, [&](const Expr& e) {
                if (e.kind == Expr::Kind::Call) ++fv_[Feature::FunctionCalls];
            });
        });

        if (s.kind == Stmt::Kind::Block) {
            for (const auto& c : s.children) {
                if (c.kind == Stmt::Kind::Block) scopes.emplace_back();
                scoped_walk(c, scopes, loop_depth);
                if (c.kind == Stmt::Kind::Block) scopes.pop_back();
            }
            return;
        }
        std::size_t child_depth = loop_depth + (s.kind == Stmt::Kind::For ? 1 : 0);
        for (const auto& c : s.children) {
            scopes.emplace_back();
            scoped_walk(c, scopes, child_depth);
            scopes.pop_back();
        }
    }

    void loop_features(const FlatFunction& flat, const LoopRecord& rec) {
        const Stmt& loop = *rec.loop;
        const std::string& var = loop.loop_var();

        // Loop-invariant and hoisted-modification pairs.
        NameSet before;
        for (std::size_t i = 0; i < rec.begin; ++i) own_scalar_writes(*flat.order[i], before);
        NameSet written_inside;
        NameSet read_inside;
        for (std::size_t i = rec.begin; i < rec.end; ++i) {
            own_scalar_writes(*flat.order[i], written_inside);
            own_reads(*flat.order[i], read_inside);
        }
        for (const auto& x : before) {
            if (x == var) continue;
            if (written_inside.count(x)) {
                ++fv_[Feature::HoistedVarModifications];
            } else if (read_inside.count(x)) {
                ++fv_[Feature::LoopInvariantVars];
            }
        }

        // Non-static limits: calls in the condition, or condition inputs modified
        // anywhere inside the outermost loop that contains this one.
        bool dynamic = false;
        walk_expr(loop.expr, [&](const Expr& e) {
            if (e.kind == Expr::Kind::Call) dynamic = true;
        });
        if (!dynamic) {
            NameSet cond_inputs;
            walk_expr(loop.expr, [&](const Expr& e) {
                if (e.kind == Expr::Kind::Var || e.kind == Expr::Kind::ArrayAccess) cond_inputs.insert(e.name);
            });
            cond_inputs.erase(var);
            std::size_t from = rec.enclosing.empty() ? rec.begin : position_of(flat, rec.enclosing.front());
            std::size_t to = rec.enclosing.empty() ? rec.end : end_of(flat, rec.enclosing.front());
            NameSet modified;
            for (std::size_t i = from; i < to; ++i) own_named_writes(*flat.order[i], modified);
            for (const auto& n : cond_inputs) {
                if (modified.count(n)) dynamic = true;
            }
        }
        if (dynamic) fv_[Feature::NonStaticLoopLimits] = 1;

        // Auxiliary index variables: scalars indexing an array inside this loop that
        // are not a loop variable of any enclosing loop but are assigned within one.
        NameSet loop_vars;
        for (const Stmt* e : rec.enclosing) loop_vars.insert(e->loop_var());
        loop_vars.insert(var);
        NameSet assigned_in_nest;
        std::size_t nest_from = rec.enclosing.empty() ? rec.begin : position_of(flat, rec.enclosing.front());
        std::size_t nest_to = rec.enclosing.empty() ? rec.end : end_of(flat, rec.enclosing.front());
        for (std::size_t i = nest_from; i < nest_to; ++i) own_scalar_writes(*flat.order[i], assigned_in_nest);
        // Only accesses whose innermost enclosing loop is this one, so each access is seen once.
        for (std::size_t i = rec.begin; i < rec.end; ++i) {
            if (innermost_loop(flat, i) != rec.loop) continue;
            const Stmt& s = *flat.order[i];
            own_exprs(s, [&](const Expr& root) {
                walk_expr(root, [&](const Expr& e) {
                    if (e.kind != Expr::Kind::ArrayAccess) return;
                    for (const auto& idx : e.operands) {
                        NameSet vars;
                        expr_vars(idx, vars);
                        for (const auto& v : vars) {
                            if (!loop_vars.count(v) && assigned_in_nest.count(v)) aux_vars_.insert(v);
                        }
                    }
                });
            });
        }
    }

    // Innermost For whose body (not header) contains flat.order[i].
    static const Stmt* innermost_loop(const FlatFunction& flat, std::size_t i) {
        const Stmt* best = nullptr;
        std::size_t best_begin = 0;
        for (const auto& rec : flat.loops) {
            if (i > rec.begin && i < rec.end && (!best || rec.begin > best_begin)) {
                best = rec.loop;
                best_begin = rec.begin;
            }
        }
        return best;
    }

    static std::size_t position_of(const FlatFunction& flat, const Stmt* s) {
        for (const auto& rec : flat.loops) {
            if (rec.loop == s) return rec.begin;
        }
        return 0;
    }

    static std::size_t end_of(const FlatFunction& flat, const Stmt* s) {
        for (const auto& rec : flat.loops) {
            if (rec.loop == s) return rec.end;
        }
        return 0;
    }

    const TranslationUnit& unit_;
    NameSet globals_;
    NameSet aux_vars_;
    FeatureVector fv_;
};

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "max_nested_loop_depth",
    "num_function_calls",
    "num_shifted_array_writes",
    "irregular_loops_flag",
    "global_write_flag",
    "num_if_statements",
    "non_static_loop_limits_flag",
    "num_iteration_independent_loops",
    "loop_schedule_flag",
    "num_loop_invariant_vars",
    "num_hoisted_var_modifications",
    "num_non_1d_arrays",
    "num_aux_index_vars",
    "total_for_loops",
    "num_non_normalized_loops",
};

}  // namespace

std::string_view feature_name(Feature f) { return kNames[static_cast<std::size_t>(f)]; }

bool FeatureVector::valid() const {
    for (auto v : values_) {
        if (v < 0) return false;
    }
    for (Feature flag : {Feature::IrregularLoops, Feature::GlobalWrites, Feature::NonStaticLoopLimits,
                         Feature::LoopSchedule}) {
        if ((*this)[flag] > 1) return false;
    }
    auto loops = (*this)[Feature::ForLoops];
    return (*this)[Feature::MaxNestedLoopDepth] <= loops && (*this)[Feature::NonNormalizedLoops] <= loops &&
           (*this)[Feature::IterationIndependentLoops] <= loops;
}

FeatureVector extract(const TranslationUnit& unit) { return Extractor(unit).run(); }

StateKey state_key(const FeatureVector& fv) {
    std::string out;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (i) out += ',';
        out += std::to_string(fv[i]);
    }
    return StateKey(std::move(out));
}

std::optional<FeatureVector> parse_state_key(std::string_view key) {
    FeatureVector fv;
    std::size_t i = 0;
    const char* p = key.data();
    const char* end = key.data() + key.size();
    while (i < kFeatureCount) {
        std::int64_t v = 0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc() || next == p || v < 0) return std::nullopt;
        fv[i++] = v;
        p = next;
        if (i < kFeatureCount) {
            if (p == end || *p != ',') return std::nullopt;
            ++p;
        }
    }
    if (p != end) return std::nullopt;
    return fv;
}

}  // namespace rewrite_rl
