#include "rewrite_rl/printer.hpp"

#include <sstream>

namespace rewrite_rl {
namespace {

int precedence(BinaryOp op) {
    switch (op) {
    case BinaryOp::Eq:
    case BinaryOp::Ne:
        return 1;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
        return 2;
    case BinaryOp::Add:
    case BinaryOp::Sub:
        return 3;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod:
        return 4;
    }
    return 0;
}

void emit(std::ostream& os, const Expr& e);

void emit_operand(std::ostream& os, const Expr& e, int parent, bool right) {
    bool parens = e.kind == Expr::Kind::Binary &&
                  (precedence(e.op) < parent || (right && precedence(e.op) == parent));
    if (parens) os << '(';
    emit(os, e);
    if (parens) os << ')';
}

void emit_list(std::ostream& os, const std::vector<Expr>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ", ";
        emit(os, xs[i]);
    }
}

void emit(std::ostream& os, const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Var:
        os << e.name;
        break;
    case Expr::Kind::IntLit:
        os << e.value;
        break;
    case Expr::Kind::Binary: {
        int p = precedence(e.op);
        emit_operand(os, e.lhs(), p, false);
        os << ' ' << to_string(e.op) << ' ';
        emit_operand(os, e.rhs(), p, true);
        break;
    }
    case Expr::Kind::ArrayAccess:
        os << e.name;
        for (const auto& i : e.operands) {
            os << '[';
            emit(os, i);
            os << ']';
        }
        break;
    case Expr::Kind::Call:
        os << e.name << '(';
        emit_list(os, e.operands);
        os << ')';
        break;
    }
}

void emit_decl(std::ostream& os, const VarDecl& d) {
    if (d.is_const) os << "const ";
    os << "int " << d.name;
    for (const auto& dim : d.dims) {
        os << '[';
        emit(os, dim);
        os << ']';
    }
    if (d.init) {
        os << " = ";
        emit(os, *d.init);
    }
}

// `x = x + 1` prints as `x++`, `x = x op e` as `x op= e`; both reparse to the same tree.
void emit_assign(std::ostream& os, const Stmt& s) {
    emit(os, s.lhs);
    const Expr& v = s.expr;
    if (v.kind == Expr::Kind::Binary && v.lhs() == s.lhs) {
        bool arith = v.op == BinaryOp::Add || v.op == BinaryOp::Sub || v.op == BinaryOp::Mul ||
                     v.op == BinaryOp::Div || v.op == BinaryOp::Mod;
        if ((v.op == BinaryOp::Add || v.op == BinaryOp::Sub) && v.rhs() == Expr::lit(1)) {
            os << (v.op == BinaryOp::Add ? "++" : "--");
            return;
        }
        if (arith) {
            os << ' ' << to_string(v.op) << "= ";
            emit(os, v.rhs());
            return;
        }
    }
    os << " = ";
    emit(os, v);
}

class StmtPrinter {
public:
    explicit StmtPrinter(std::ostream& os) : os_(os) {}

    void block_body(const Stmt& b, int depth) {
        for (const auto& s : b.children) stmt(s, depth);
    }

    void stmt(const Stmt& s, int depth) {
        switch (s.kind) {
        case Stmt::Kind::Block:
            indent(depth);
            os_ << "{\n";
            block_body(s, depth + 1);
            indent(depth);
            os_ << "}\n";
            break;
        case Stmt::Kind::For:
            for (const auto& p : s.pragmas) {
                indent(depth);
                os_ << "#pragma stml " << p.text << '\n';
            }
            indent(depth);
            os_ << "for (";
            emit_assign(os_, s.for_init());
            os_ << "; ";
            emit(os_, s.expr);
            os_ << "; ";
            emit_assign(os_, s.for_step());
            os_ << ')';
            branch(s.for_body(), depth);
            break;
        case Stmt::Kind::If:
            indent(depth);
            os_ << "if (";
            emit(os_, s.expr);
            os_ << ')';
            branch(s.children[0], depth);
            if (s.has_else()) {
                indent(depth);
                os_ << "else";
                branch(s.children[1], depth);
            }
            break;
        case Stmt::Kind::Assign:
            indent(depth);
            emit_assign(os_, s);
            os_ << ";\n";
            break;
        case Stmt::Kind::Call:
            indent(depth);
            emit(os_, s.expr);
            os_ << ";\n";
            break;
        case Stmt::Kind::Break:
            indent(depth);
            os_ << "break;\n";
            break;
        case Stmt::Kind::Continue:
            indent(depth);
            os_ << "continue;\n";
            break;
        case Stmt::Kind::Decl:
            indent(depth);
            emit_decl(os_, s.decl);
            os_ << ";\n";
            break;
        }
    }

private:
    // Body of a for/if/else: a block opens on the same line, anything else goes
    // on the next line one level deeper.
    void branch(const Stmt& body, int depth) {
        if (body.kind == Stmt::Kind::Block) {
            os_ << " {\n";
            block_body(body, depth + 1);
            indent(depth);
            os_ << "}\n";
        } else {
            os_ << '\n';
            stmt(body, depth + 1);
        }
    }

    void indent(int depth) {
        for (int i = 0; i < depth; ++i) os_ << "    ";
    }

    std::ostream& os_;
};

}  // namespace

std::string print(const Expr& expr) {
    std::ostringstream os;
    emit(os, expr);
    return os.str();
}

std::string print(const TranslationUnit& unit) {
    std::ostringstream os;
    for (const auto& g : unit.globals) {
        emit_decl(os, g);
        os << ";\n";
    }
    StmtPrinter sp(os);
    for (std::size_t i = 0; i < unit.functions.size(); ++i) {
        const auto& fn = unit.functions[i];
        if (i > 0 || !unit.globals.empty()) os << '\n';
        os << "void " << fn.name << '(';
        for (std::size_t p = 0; p < fn.params.size(); ++p) {
            if (p) os << ", ";
            emit_decl(os, fn.params[p]);
        }
        os << ")\n{\n";
        sp.block_body(fn.body, 1);
        os << "}\n";
    }
    return os.str();
}

}  // namespace rewrite_rl
