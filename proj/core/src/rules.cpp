#include "rewrite_rl/rules.hpp"

#include <algorithm>
#include <set>

#include "rewrite_rl/errors.hpp"

namespace rewrite_rl {
namespace {

// ---------------------------------------------------------------------------
// Site plumbing

Stmt* mutable_stmt(TranslationUnit& unit, const Site& site) {
    const auto& p = site.path;
    std::size_t fi = p[0] - unit.globals.size();
    Stmt* s = &unit.functions[fi].body;
    for (std::size_t i = 2; i < p.size(); ++i) s = &s->children[p[i]];
    return s;
}

Site child_site(const Site& parent, std::size_t index) {
    Site s = parent;
    s.path.push_back(index);
    return s;
}

Site parent_site(const Site& site) {
    Site s = site;
    s.path.pop_back();
    return s;
}

/// Pre-order visit of every statement of every function body together with its site.
template <typename Fn>
void visit_sites(const Stmt& s, const Site& site, Fn& fn) {
    fn(s, site);
    for (std::size_t i = 0; i < s.children.size(); ++i) visit_sites(s.children[i], child_site(site, i), fn);
}

// ---------------------------------------------------------------------------
// Scope-aware reference visiting: every expression naming `name` that resolves
// to the declaration under consideration.

template <typename Fn>
void refs_in_stmt(Stmt& s, const std::string& name, Fn& fn);

template <typename Fn>
void refs_in_seq(std::vector<Stmt>& stmts, std::size_t from, const std::string& name, Fn& fn) {
    for (std::size_t i = from; i < stmts.size(); ++i) {
        if (stmts[i].kind == Stmt::Kind::Decl && stmts[i].decl.name == name) return;  // shadowed
        refs_in_stmt(stmts[i], name, fn);
    }
}

template <typename Fn>
void refs_in_stmt(Stmt& s, const std::string& name, Fn& fn) {
    if (s.kind == Stmt::Kind::Decl && s.decl.name == name) return;
    own_exprs(s, [&](Expr& root) {
        walk_expr(root, [&](Expr& e) {
            if ((e.kind == Expr::Kind::Var || e.kind == Expr::Kind::ArrayAccess) && e.name == name) fn(e);
        });
    });
    if (s.kind == Stmt::Kind::Block) {
        refs_in_seq(s.children, 0, name, fn);
        return;
    }
    for (auto& c : s.children) {
        if (c.kind == Stmt::Kind::Block) {
            refs_in_seq(c.children, 0, name, fn);
        } else {
            refs_in_stmt(c, name, fn);
        }
    }
}

/// Calls fn(Expr&) for each reference to the declaration at `decl_site`.
template <typename Fn>
void for_each_reference(TranslationUnit& unit, const Site& decl_site, const std::string& name, Fn&& fn) {
    const auto& p = decl_site.path;
    if (p[0] < unit.globals.size()) {
        for (auto& f : unit.functions) {
            bool shadowed = false;
            for (const auto& param : f.params) shadowed = shadowed || param.name == name;
            if (!shadowed) refs_in_seq(f.body.children, 0, name, fn);
        }
        return;
    }
    auto& fn_def = unit.functions[p[0] - unit.globals.size()];
    if (p.size() == 2 && p[1] < fn_def.params.size()) {
        refs_in_seq(fn_def.body.children, 0, name, fn);
        return;
    }
    Stmt* parent = mutable_stmt(unit, parent_site(decl_site));
    if (parent->kind == Stmt::Kind::Block) refs_in_seq(parent->children, p.back() + 1, name, fn);
}

// ---------------------------------------------------------------------------
// Flatten array

struct DeclSite {
    Site site;
    const VarDecl* decl;
};

std::vector<DeclSite> declarations(const TranslationUnit& unit) {
    std::vector<DeclSite> out;
    for (std::size_t g = 0; g < unit.globals.size(); ++g) out.push_back({Site{{g}}, &unit.globals[g]});
    for (std::size_t f = 0; f < unit.functions.size(); ++f) {
        const auto& fn = unit.functions[f];
        std::size_t root = unit.globals.size() + f;
        for (std::size_t p = 0; p < fn.params.size(); ++p) out.push_back({Site{{root, p}}, &fn.params[p]});
        auto visit = [&](const Stmt& s, const Site& site) {
            if (s.kind == Stmt::Kind::Decl) out.push_back({site, &s.decl});
        };
        visit_sites(fn.body, Site{{root, fn.params.size()}}, visit);
    }
    return out;
}

Expr linear_index(const std::vector<Expr>& indices, const std::vector<std::int64_t>& extents) {
    std::vector<std::int64_t> strides(extents.size(), 1);
    for (std::size_t d = extents.size() - 1; d-- > 0;) strides[d] = strides[d + 1] * extents[d + 1];
    std::optional<Expr> sum;
    for (std::size_t d = 0; d < indices.size(); ++d) {
        Expr term = indices[d];
        if (strides[d] != 1) {
            term = term.kind == Expr::Kind::IntLit ? Expr::lit(term.value * strides[d])
                                                   : Expr::binary(BinaryOp::Mul, std::move(term), Expr::lit(strides[d]));
        }
        sum = sum ? Expr::binary(BinaryOp::Add, std::move(*sum), std::move(term)) : std::move(term);
    }
    return *sum;
}

// ---------------------------------------------------------------------------
// Collapse loops

bool reads_var(const Expr& e, const std::string& v) {
    bool found = false;
    walk_expr(e, [&](const Expr& x) { found = found || x.is_var(v); });
    return found;
}

bool stmt_reads_var(const Stmt& s, const std::string& v) {
    if (s.kind == Stmt::Kind::Assign) {
        for (const auto& i : s.lhs.operands) {
            if (reads_var(i, v)) return true;
        }
        return reads_var(s.expr, v);
    }
    bool found = false;
    own_exprs(s, [&](const Expr& e) { found = found || reads_var(e, v); });
    return found;
}

enum class Liveness { Live, Dead, Unknown };

Liveness scan_stmt(const Stmt& s, const std::string& v);

Liveness scan_seq(const std::vector<Stmt>& stmts, std::size_t from, const std::string& v) {
    for (std::size_t i = from; i < stmts.size(); ++i) {
        if (stmts[i].kind == Stmt::Kind::Decl && stmts[i].decl.name == v) {
            if (stmts[i].decl.init && reads_var(*stmts[i].decl.init, v)) return Liveness::Live;
            return Liveness::Unknown;  // rest of this block sees a different variable
        }
        Liveness r = scan_stmt(stmts[i], v);
        if (r != Liveness::Unknown) return r;
    }
    return Liveness::Unknown;
}

// Whether `v` is read before being overwritten when execution continues with `s`.
Liveness scan_stmt(const Stmt& s, const std::string& v) {
    switch (s.kind) {
    case Stmt::Kind::Assign:
        if (stmt_reads_var(s, v)) return Liveness::Live;
        return s.lhs.is_var(v) ? Liveness::Dead : Liveness::Unknown;
    case Stmt::Kind::Call:
    case Stmt::Kind::Decl:
        return stmt_reads_var(s, v) ? Liveness::Live : Liveness::Unknown;
    case Stmt::Kind::Break:
    case Stmt::Kind::Continue:
        return Liveness::Live;  // control leaves the straight-line path; give up
    case Stmt::Kind::Block:
        return scan_seq(s.children, 0, v);
    case Stmt::Kind::If: {
        if (reads_var(s.expr, v)) return Liveness::Live;
        Liveness a = scan_stmt(s.children[0], v);
        Liveness b = s.has_else() ? scan_stmt(s.children[1], v) : Liveness::Unknown;
        if (a == Liveness::Live || b == Liveness::Live) return Liveness::Live;
        if (a == Liveness::Dead && b == Liveness::Dead) return Liveness::Dead;
        return Liveness::Unknown;
    }
    case Stmt::Kind::For: {
        const Stmt& init = s.for_init();
        if (stmt_reads_var(init, v)) return Liveness::Live;
        if (init.lhs.is_var(v)) return Liveness::Dead;
        if (reads_var(s.expr, v)) return Liveness::Live;
        if (scan_stmt(s.for_body(), v) == Liveness::Live) return Liveness::Live;
        if (stmt_reads_var(s.for_step(), v)) return Liveness::Live;
        return Liveness::Unknown;
    }
    }
    return Liveness::Unknown;
}

/// True when `v`'s value after the statement at `site` can be observed.
bool live_after(const FunctionDef& fn, const Site& site, const std::string& v) {
    std::vector<const Stmt*> chain{&fn.body};
    for (std::size_t i = 2; i < site.path.size(); ++i) chain.push_back(&chain.back()->children[site.path[i]]);
    for (std::size_t level = chain.size() - 1; level-- > 0;) {
        const Stmt& parent = *chain[level];
        std::size_t idx = site.path[level + 2];
        if (parent.kind == Stmt::Kind::Block) {
            Liveness r = scan_seq(parent.children, idx + 1, v);
            if (r != Liveness::Unknown) return r == Liveness::Live;
        } else if (parent.kind == Stmt::Kind::For) {
            // Next iteration: step, condition, then the whole body again.
            if (stmt_reads_var(parent.for_step(), v) || reads_var(parent.expr, v)) return true;
            if (scan_stmt(parent.for_body(), v) == Liveness::Live) return true;
        }
    }
    return false;
}

struct LoopHeader {
    std::string var;
    Expr limit;
};

std::optional<LoopHeader> normalized_header(const TranslationUnit& unit, const Stmt& loop) {
    if (loop.kind != Stmt::Kind::For || !loop.pragmas.empty()) return std::nullopt;
    const std::string& v = loop.loop_var();
    auto start = constant_value(unit, loop.for_init().expr);
    if (!start || *start != 0) return std::nullopt;
    const Stmt& step = loop.for_step();
    const Expr& inc = step.expr;
    bool unit_step = inc.kind == Expr::Kind::Binary && inc.op == BinaryOp::Add &&
                     ((inc.lhs().is_var(v) && inc.rhs() == Expr::lit(1)) ||
                      (inc.rhs().is_var(v) && inc.lhs() == Expr::lit(1)));
    if (!unit_step) return std::nullopt;
    const Expr& cond = loop.expr;
    if (cond.kind != Expr::Kind::Binary || cond.op != BinaryOp::Lt || !cond.lhs().is_var(v)) return std::nullopt;
    auto limit = constant_value(unit, cond.rhs());
    if (!limit || *limit < 0) return std::nullopt;
    return LoopHeader{v, cond.rhs()};
}

const Stmt* perfect_inner(const Stmt& outer) {
    const Stmt& body = outer.for_body();
    if (body.kind == Stmt::Kind::For) return &body;
    if (body.kind == Stmt::Kind::Block && body.children.size() == 1 && body.children[0].kind == Stmt::Kind::For) {
        return &body.children[0];
    }
    return nullptr;
}

bool declared_locally(const FunctionDef& fn, const std::string& v) {
    for (const auto& p : fn.params) {
        if (p.name == v) return !p.is_array();
    }
    bool found = false;
    walk_stmt(fn.body, [&](const Stmt& s) {
        if (s.kind == Stmt::Kind::Decl && s.decl.name == v && !s.decl.is_array()) found = true;
    });
    return found;
}

bool collapsible(const TranslationUnit& unit, const FunctionDef& fn, const Stmt& outer, const Site& site) {
    auto oh = normalized_header(unit, outer);
    if (!oh) return false;
    const Stmt* inner = perfect_inner(outer);
    if (!inner) return false;
    auto ih = normalized_header(unit, *inner);
    if (!ih || ih->var == oh->var) return false;

    bool unsafe = false;
    walk_stmt(inner->for_body(), [&](const Stmt& s) {
        switch (s.kind) {
        case Stmt::Kind::Break:
        case Stmt::Kind::Continue:
            unsafe = true;
            break;
        case Stmt::Kind::Assign:
            if (s.lhs.is_var(oh->var) || s.lhs.is_var(ih->var)) unsafe = true;
            break;
        case Stmt::Kind::For:
            if (s.loop_var() == oh->var || s.loop_var() == ih->var) unsafe = true;
            break;
        case Stmt::Kind::Decl:
            if (s.decl.name == oh->var || s.decl.name == ih->var) unsafe = true;
            break;
        default:
            break;
        }
    });
    if (unsafe) return false;
    for (const auto* v : {&oh->var, &ih->var}) {
        if (!declared_locally(fn, *v)) return false;
        if (live_after(fn, site, *v)) return false;
    }
    return true;
}

std::string fresh_name(const TranslationUnit& unit) {
    std::set<std::string> used;
    auto note_expr = [&](const Expr& root) {
        walk_expr(root, [&](const Expr& e) {
            if (!e.name.empty()) used.insert(e.name);
        });
    };
    for (const auto& g : unit.globals) used.insert(g.name);
    for (const auto& f : unit.functions) {
        used.insert(f.name);
        for (const auto& p : f.params) used.insert(p.name);
        walk_stmt(f.body, [&](const Stmt& s) {
            if (s.kind == Stmt::Kind::Decl) used.insert(s.decl.name);
            own_exprs(s, note_expr);
        });
    }
    for (std::size_t n = 0;; ++n) {
        std::string candidate = "__k" + std::to_string(n);
        if (!used.count(candidate)) return candidate;
    }
}

VarDecl scalar_local(std::string name, std::optional<Expr> init) {
    VarDecl d;
    d.name = std::move(name);
    d.scope = DeclScope::Local;
    d.init = std::move(init);
    return d;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<Site> FlattenArrayRule::find_sites(const TranslationUnit& unit) const {
    std::vector<Site> out;
    for (const auto& ds : declarations(unit)) {
        if (ds.decl->dims.size() < 2) continue;
        // The visitor mutates nothing here; it needs a mutable unit only for its signature.
        TranslationUnit scratch = unit;
        bool passed_whole = false;
        for_each_reference(scratch, ds.site, ds.decl->name, [&](Expr& e) {
            if (e.kind == Expr::Kind::Var) passed_whole = true;
        });
        if (!passed_whole) out.push_back(ds.site);
    }
    return out;
}

TranslationUnit FlattenArrayRule::rewrite(const TranslationUnit& unit, const Site& site) const {
    TranslationUnit out = unit;
    SiteTarget target = resolve(unit, site);
    VarDecl* decl = nullptr;
    const auto& p = site.path;
    if (p[0] < out.globals.size()) {
        decl = &out.globals[p[0]];
    } else if (p.size() == 2) {
        decl = &out.functions[target.function].params[p[1]];
    } else {
        decl = &mutable_stmt(out, site)->decl;
    }
    const std::vector<std::int64_t> extents = decl->extents;
    std::int64_t total = decl->element_count();
    decl->dims = {Expr::lit(total)};
    decl->extents = {total};
    for_each_reference(out, site, decl->name, [&](Expr& e) {
        if (e.kind != Expr::Kind::ArrayAccess) return;
        Expr flat = linear_index(e.operands, extents);
        e.operands.clear();
        e.operands.push_back(std::move(flat));
    });
    return out;
}

std::vector<Site> CollapseLoopsRule::find_sites(const TranslationUnit& unit) const {
    std::vector<Site> out;
    for (std::size_t f = 0; f < unit.functions.size(); ++f) {
        const auto& fn = unit.functions[f];
        auto visit = [&](const Stmt& s, const Site& site) {
            if (s.kind == Stmt::Kind::For && collapsible(unit, fn, s, site)) out.push_back(site);
        };
        visit_sites(fn.body, Site{{unit.globals.size() + f, fn.params.size()}}, visit);
    }
    return out;
}

TranslationUnit CollapseLoopsRule::rewrite(const TranslationUnit& unit, const Site& site) const {
    TranslationUnit out = unit;
    const std::string k = fresh_name(unit);
    const Stmt& outer = *resolve(unit, site).stmt;
    const Stmt& inner = *perfect_inner(outer);
    auto oh = *normalized_header(unit, outer);
    auto ih = *normalized_header(unit, inner);

    Expr count;
    if (oh.limit.kind == Expr::Kind::IntLit && ih.limit.kind == Expr::Kind::IntLit) {
        count = Expr::lit(oh.limit.value * ih.limit.value);
    } else {
        count = Expr::binary(BinaryOp::Mul, oh.limit, ih.limit);
    }

    std::vector<Stmt> body;
    body.push_back(Stmt::declare(scalar_local(oh.var, Expr::binary(BinaryOp::Div, Expr::var(k), ih.limit))));
    body.push_back(Stmt::declare(scalar_local(ih.var, Expr::binary(BinaryOp::Mod, Expr::var(k), ih.limit))));
    const Stmt& inner_body = inner.for_body();
    if (inner_body.kind == Stmt::Kind::Block) {
        body.insert(body.end(), inner_body.children.begin(), inner_body.children.end());
    } else {
        body.push_back(inner_body);
    }

    Stmt collapsed = Stmt::for_loop(Stmt::assign(Expr::var(k), Expr::lit(0)),
                                    Expr::binary(BinaryOp::Lt, Expr::var(k), std::move(count)),
                                    Stmt::assign(Expr::var(k), Expr::binary(BinaryOp::Add, Expr::var(k), Expr::lit(1))),
                                    Stmt::block(std::move(body)));
    Stmt counter = Stmt::declare(scalar_local(k, std::nullopt));

    Stmt* parent = mutable_stmt(out, parent_site(site));
    std::size_t idx = site.path.back();
    if (parent->kind == Stmt::Kind::Block) {
        parent->children[idx] = std::move(collapsed);
        parent->children.insert(parent->children.begin() + static_cast<std::ptrdiff_t>(idx), std::move(counter));
    } else {
        std::vector<Stmt> wrapped;
        wrapped.push_back(std::move(counter));
        wrapped.push_back(std::move(collapsed));
        parent->children[idx] = Stmt::block(std::move(wrapped));
    }
    return out;
}

// ---------------------------------------------------------------------------

RuleRegistry RuleRegistry::with_defaults() {
    RuleRegistry r;
    r.add(kFlattenArray, std::make_shared<FlattenArrayRule>());
    r.add(kCollapseLoops, std::make_shared<CollapseLoopsRule>());
    return r;
}

void RuleRegistry::add(RuleId id, std::shared_ptr<const Rule> rule) {
    if (!rule) throw RuleError(RuleError::Kind::Registration, "null rule");
    if (!rules_.emplace(id, std::move(rule)).second) {
        throw RuleError(RuleError::Kind::Registration, "rule id " + std::to_string(id.value) + " already registered");
    }
}

std::vector<RuleId> RuleRegistry::ids() const {
    std::vector<RuleId> out;
    for (const auto& [id, _] : rules_) out.push_back(id);
    return out;
}

const Rule& RuleRegistry::get(RuleId id) const {
    auto it = rules_.find(id);
    if (it == rules_.end()) throw RuleError(RuleError::Kind::UnknownRule, "unknown rule id " + std::to_string(id.value));
    return *it->second;
}

std::vector<Site> RuleRegistry::find_sites(const TranslationUnit& unit, RuleId id) const {
    return get(id).find_sites(unit);
}

RewriteResult RuleRegistry::apply(const TranslationUnit& unit, RuleId id, const Site& site) const {
    const Rule& rule = get(id);
    auto sites = rule.find_sites(unit);
    if (std::find(sites.begin(), sites.end(), site) == sites.end()) {
        throw RuleError(RuleError::Kind::SiteMismatch,
                        std::string(rule.name()) + " does not match at site " + to_string(site));
    }
    return RewriteResult{rule.rewrite(unit, site), id, site};
}

}  // namespace rewrite_rl
