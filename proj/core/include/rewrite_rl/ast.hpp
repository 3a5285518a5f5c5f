#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace rewrite_rl {

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne };

const char* to_string(BinaryOp op);

/// Expression node. `operands` holds the two sides of a binary node, the
/// indices of an array access, or the arguments of a call.
struct Expr {
    enum class Kind { Var, IntLit, Binary, ArrayAccess, Call };

    Kind kind = Kind::IntLit;
    std::string name;
    std::int64_t value = 0;
    BinaryOp op = BinaryOp::Add;
    std::vector<Expr> operands;

    static Expr var(std::string name);
    static Expr lit(std::int64_t value);
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
    static Expr access(std::string base, std::vector<Expr> indices);
    static Expr call(std::string callee, std::vector<Expr> args);

    const Expr& lhs() const { return operands[0]; }
    const Expr& rhs() const { return operands[1]; }

    bool is_var(const std::string& n) const { return kind == Kind::Var && name == n; }

    bool operator==(const Expr&) const = default;
};

enum class DeclScope { Global, Param, Local };

struct VarDecl {
    std::string name;
    bool is_const = false;
    DeclScope scope = DeclScope::Local;
    std::vector<Expr> dims;              // as written: literals or named constants
    std::vector<std::int64_t> extents;   // evaluated dims, same length
    std::optional<Expr> init;

    bool is_array() const { return !dims.empty(); }
    std::int64_t element_count() const;

    bool operator==(const VarDecl&) const = default;
};

struct Pragma {
    enum class Kind { LoopSchedule, IterationIndependent, Other };

    Kind kind = Kind::Other;
    std::string text;  // everything after `#pragma stml `

    static Pragma from_text(std::string text);

    bool operator==(const Pragma&) const = default;
};

/// Statement node.
///
/// Child layout by kind:
///   Block    children = statements
///   For      children = {init, step, body}, expr = condition, pragmas attached
///   If       children = {then} or {then, else}, expr = condition
///   Assign   lhs = target, expr = value
///   Call     expr = the call expression
///   Decl     decl
struct Stmt {
    enum class Kind { Block, For, If, Assign, Call, Break, Continue, Decl };

    Kind kind = Kind::Block;
    std::vector<Stmt> children;
    Expr lhs;
    Expr expr;
    VarDecl decl;
    std::vector<Pragma> pragmas;

    static Stmt block(std::vector<Stmt> stmts);
    static Stmt for_loop(Stmt init, Expr cond, Stmt step, Stmt body, std::vector<Pragma> pragmas = {});
    static Stmt if_stmt(Expr cond, Stmt then_branch, std::optional<Stmt> else_branch = std::nullopt);
    static Stmt assign(Expr target, Expr value);
    static Stmt call(Expr call_expr);
    static Stmt brk();
    static Stmt cont();
    static Stmt declare(VarDecl decl);

    const Stmt& for_init() const { return children[0]; }
    const Stmt& for_step() const { return children[1]; }
    const Stmt& for_body() const { return children[2]; }
    Stmt& for_body() { return children[2]; }
    bool has_else() const { return kind == Kind::If && children.size() == 2; }

    /// Loop variable of a For (the target of its init assignment).
    const std::string& loop_var() const { return children[0].lhs.name; }
    bool has_pragma(Pragma::Kind k) const;

    bool operator==(const Stmt&) const = default;
};

struct FunctionDef {
    std::string name;
    std::vector<VarDecl> params;
    Stmt body = Stmt::block({});

    bool operator==(const FunctionDef&) const = default;
};

struct TranslationUnit {
    std::vector<VarDecl> globals;
    std::vector<FunctionDef> functions;

    const FunctionDef* find_function(const std::string& name) const;
    const VarDecl* find_global(const std::string& name) const;

    bool operator==(const TranslationUnit&) const = default;
};

/// Path from the unit root to a node.
///
/// path[0] indexes globals first, then functions. Inside a function, index
/// p < params.size() selects a parameter and p == params.size() the body;
/// deeper indices walk Stmt::children.
struct Site {
    std::vector<std::size_t> path;

    bool operator==(const Site&) const = default;
    auto operator<=>(const Site&) const = default;
};

std::string to_string(const Site& site);

/// Node a site resolves to. Exactly one pointer is set when valid.
struct SiteTarget {
    const VarDecl* decl = nullptr;
    const Stmt* stmt = nullptr;
    std::size_t function = 0;
};

SiteTarget resolve(const TranslationUnit& unit, const Site& site);

/// Evaluates an expression built from literals and global `const int` names.
std::optional<std::int64_t> constant_value(const TranslationUnit& unit, const Expr& e);

template <typename E>
concept ExprNode = std::same_as<std::remove_const_t<E>, Expr>;
template <typename S>
concept StmtNode = std::same_as<std::remove_const_t<S>, Stmt>;

/// Calls `fn` on `e` and every nested expression, pre-order.
template <ExprNode E, typename Fn>
void walk_expr(E& e, Fn&& fn) {
    fn(e);
    for (auto& op : e.operands) walk_expr(op, fn);
}

/// Calls `fn` on `s` and every nested statement, pre-order.
template <StmtNode S, typename Fn>
void walk_stmt(S& s, Fn&& fn) {
    fn(s);
    for (auto& c : s.children) walk_stmt(c, fn);
}

/// Every expression directly owned by `s` (not by its child statements).
template <StmtNode S, typename Fn>
void own_exprs(S& s, Fn&& fn) {
    switch (s.kind) {
    case Stmt::Kind::For:
    case Stmt::Kind::If:
    case Stmt::Kind::Call:
        fn(s.expr);
        break;
    case Stmt::Kind::Assign:
        fn(s.lhs);
        fn(s.expr);
        break;
    case Stmt::Kind::Decl:
        for (auto& d : s.decl.dims) fn(d);
        if (s.decl.init) fn(*s.decl.init);
        break;
    default:
        break;
    }
}

}  // namespace rewrite_rl
