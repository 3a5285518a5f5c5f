#include "rewrite_rl/ast.hpp"

#include <algorithm>
#include <sstream>

namespace rewrite_rl {

const char* to_string(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    }
    return "?";
}

Expr Expr::var(std::string name) {
    Expr e;
    e.kind = Kind::Var;
    e.name = std::move(name);
    return e;
}

Expr Expr::lit(std::int64_t value) {
    Expr e;
    e.kind = Kind::IntLit;
    e.value = value;
    return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::Binary;
    e.op = op;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
}

Expr Expr::access(std::string base, std::vector<Expr> indices) {
    Expr e;
    e.kind = Kind::ArrayAccess;
    e.name = std::move(base);
    e.operands = std::move(indices);
    return e;
}

Expr Expr::call(std::string callee, std::vector<Expr> args) {
    Expr e;
    e.kind = Kind::Call;
    e.name = std::move(callee);
    e.operands = std::move(args);
    return e;
}

std::int64_t VarDecl::element_count() const {
    std::int64_t n = 1;
    for (auto x : extents) n *= x;
    return n;
}

Pragma Pragma::from_text(std::string text) {
    Pragma p;
    if (text == "loop_schedule") {
        p.kind = Kind::LoopSchedule;
    } else if (text == "iteration_independent") {
        p.kind = Kind::IterationIndependent;
    }
    p.text = std::move(text);
    return p;
}

Stmt Stmt::block(std::vector<Stmt> stmts) {
    Stmt s;
    s.kind = Kind::Block;
    s.children = std::move(stmts);
    return s;
}

Stmt Stmt::for_loop(Stmt init, Expr cond, Stmt step, Stmt body, std::vector<Pragma> pragmas) {
    Stmt s;
    s.kind = Kind::For;
    s.children.push_back(std::move(init));
    s.children.push_back(std::move(step));
    s.children.push_back(std::move(body));
    s.expr = std::move(cond);
    s.pragmas = std::move(pragmas);
    return s;
}

Stmt Stmt::if_stmt(Expr cond, Stmt then_branch, std::optional<Stmt> else_branch) {
    Stmt s;
    s.kind = Kind::If;
    s.expr = std::move(cond);
    s.children.push_back(std::move(then_branch));
    if (else_branch) s.children.push_back(std::move(*else_branch));
    return s;
}

Stmt Stmt::assign(Expr target, Expr value) {
    Stmt s;
    s.kind = Kind::Assign;
    s.lhs = std::move(target);
    s.expr = std::move(value);
    return s;
}

Stmt Stmt::call(Expr call_expr) {
    Stmt s;
    s.kind = Kind::Call;
    s.expr = std::move(call_expr);
    return s;
}

Stmt Stmt::brk() {
    Stmt s;
    s.kind = Kind::Break;
    return s;
}

Stmt Stmt::cont() {
    Stmt s;
    s.kind = Kind::Continue;
    return s;
}

Stmt Stmt::declare(VarDecl decl) {
    Stmt s;
    s.kind = Kind::Decl;
    s.decl = std::move(decl);
    return s;
}

bool Stmt::has_pragma(Pragma::Kind k) const {
    return std::any_of(pragmas.begin(), pragmas.end(), [k](const Pragma& p) { return p.kind == k; });
}

const FunctionDef* TranslationUnit::find_function(const std::string& name) const {
    for (const auto& f : functions) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

const VarDecl* TranslationUnit::find_global(const std::string& name) const {
    for (const auto& g : globals) {
        if (g.name == name) return &g;
    }
    return nullptr;
}

std::string to_string(const Site& site) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < site.path.size(); ++i) {
        if (i) os << ',';
        os << site.path[i];
    }
    os << ']';
    return os.str();
}

SiteTarget resolve(const TranslationUnit& unit, const Site& site) {
    SiteTarget out;
    const auto& p = site.path;
    if (p.empty()) return out;
    if (p[0] < unit.globals.size()) {
        if (p.size() == 1) out.decl = &unit.globals[p[0]];
        return out;
    }
    std::size_t fi = p[0] - unit.globals.size();
    if (fi >= unit.functions.size() || p.size() < 2) return out;
    const auto& fn = unit.functions[fi];
    out.function = fi;
    if (p[1] < fn.params.size()) {
        if (p.size() == 2) out.decl = &fn.params[p[1]];
        return out;
    }
    if (p[1] != fn.params.size()) return out;
    const Stmt* s = &fn.body;
    for (std::size_t i = 2; i < p.size(); ++i) {
        if (p[i] >= s->children.size()) return out;
        s = &s->children[p[i]];
    }
    out.stmt = s;
    return out;
}

std::optional<std::int64_t> constant_value(const TranslationUnit& unit, const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::IntLit:
        return e.value;
    case Expr::Kind::Var: {
        const VarDecl* g = unit.find_global(e.name);
        if (!g || !g->is_const || !g->init) return std::nullopt;
        return constant_value(unit, *g->init);
    }
    case Expr::Kind::Binary: {
        auto a = constant_value(unit, e.lhs());
        auto b = constant_value(unit, e.rhs());
        if (!a || !b) return std::nullopt;
        switch (e.op) {
        case BinaryOp::Add: return *a + *b;
        case BinaryOp::Sub: return *a - *b;
        case BinaryOp::Mul: return *a * *b;
        case BinaryOp::Div:
            if (*b == 0) return std::nullopt;
            return *a / *b;
        case BinaryOp::Mod:
            if (*b == 0) return std::nullopt;
            return *a % *b;
        default:
            return std::nullopt;
        }
    }
    default:
        return std::nullopt;
    }
}

}  // namespace rewrite_rl
