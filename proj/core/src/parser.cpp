#include "rewrite_rl/parser.hpp"

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rewrite_rl/errors.hpp"

namespace rewrite_rl {
namespace {

enum class Tok { Ident, Int, Punct, Pragma, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
    SourcePos pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            Token t;
            t.pos = pos_;
            if (at_end()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            char c = peek();
            if (c == '#') {
                t.kind = Tok::Pragma;
                t.text = lex_pragma();
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
                    t.text += advance();
                }
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                t.kind = Tok::Int;
                while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) t.text += advance();
                if (!at_end() && (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) {
                    throw SyntaxError(t.pos, "malformed integer literal");
                }
                try {
                    t.value = std::stoll(t.text);
                } catch (const std::out_of_range&) {
                    throw SyntaxError(t.pos, "integer literal out of range");
                }
            } else {
                t.kind = Tok::Punct;
                t.text = lex_punct(t.pos);
            }
            out.push_back(std::move(t));
        }
    }

private:
    bool at_end() const { return i_ >= src_.size(); }
    char peek(std::size_t k = 0) const { return i_ + k < src_.size() ? src_[i_ + k] : '\0'; }

    char advance() {
        char c = src_[i_++];
        if (c == '\n') {
            ++pos_.line;
            pos_.column = 1;
        } else {
            ++pos_.column;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (!at_end()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                SourcePos start = pos_;
                advance();
                advance();
                while (!at_end() && !(peek() == '*' && peek(1) == '/')) advance();
                if (at_end()) throw SyntaxError(start, "unterminated comment");
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    std::string lex_pragma() {
        SourcePos start = pos_;
        std::string line;
        while (!at_end() && peek() != '\n') line += advance();
        // Split into words; expect "#pragma stml <kind...>".
        std::vector<std::string> words;
        std::string w;
        for (char c : line) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!w.empty()) words.push_back(std::move(w));
                w.clear();
            } else {
                w += c;
            }
        }
        if (!w.empty()) words.push_back(std::move(w));
        if (words.size() < 3 || words[0] != "#pragma" || words[1] != "stml") {
            throw SyntaxError(start, "only '#pragma stml <kind>' directives are supported");
        }
        std::string kind = words[2];
        for (std::size_t k = 3; k < words.size(); ++k) kind += " " + words[k];
        return kind;
    }

    std::string lex_punct(SourcePos at) {
        static const char* const two[] = {"<=", ">=", "==", "!=", "++", "--", "+=", "-=", "*=", "/=", "%="};
        for (const char* p : two) {
            if (peek() == p[0] && peek(1) == p[1]) {
                advance();
                advance();
                return p;
            }
        }
        char c = peek();
        static const std::string single = "+-*/%<>=(){}[];,";
        if (single.find(c) == std::string::npos) {
            throw SyntaxError(at, std::string("unexpected character '") + c + "'");
        }
        advance();
        return std::string(1, c);
    }

    std::string_view src_;
    std::size_t i_ = 0;
    SourcePos pos_;
};

struct Symbol {
    bool is_array = false;
    bool is_const = false;
    std::size_t rank = 0;
};

const std::set<std::string> kKeywords = {"int", "void", "const", "for", "if", "else", "break", "continue"};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    TranslationUnit run() {
        TranslationUnit unit;
        scopes_.emplace_back();
        while (cur().kind != Tok::End) {
            if (cur().kind == Tok::Pragma) {
                throw SyntaxError(cur().pos, "pragma must precede a for loop");
            }
            if (is_word("void")) {
                unit.functions.push_back(function());
                if (!function_names_.insert(unit.functions.back().name).second) {
                    throw SemanticError(last_name_pos_, "duplicate function '" + unit.functions.back().name + "'");
                }
            } else if (is_word("int") || is_word("const")) {
                unit.globals.push_back(global_decl());
            } else {
                throw SyntaxError(cur().pos, "expected declaration or function definition");
            }
        }
        return unit;
    }

private:
    const Token& cur() const { return toks_[k_]; }
    const Token& peek_tok(std::size_t n = 1) const {
        return toks_[std::min(k_ + n, toks_.size() - 1)];
    }
    bool is_word(const char* w) const { return cur().kind == Tok::Ident && cur().text == w; }
    bool is_punct(const char* p) const { return cur().kind == Tok::Punct && cur().text == p; }

    Token take() { return toks_[k_++]; }

    void expect_punct(const char* p) {
        if (!is_punct(p)) throw SyntaxError(cur().pos, std::string("expected '") + p + "'" + found());
        ++k_;
    }

    void expect_word(const char* w) {
        if (!is_word(w)) throw SyntaxError(cur().pos, std::string("expected '") + w + "'" + found());
        ++k_;
    }

    std::string found() const {
        if (cur().kind == Tok::End) return ", found end of input";
        return ", found '" + cur().text + "'";
    }

    std::string identifier() {
        if (cur().kind != Tok::Ident || kKeywords.count(cur().text)) {
            throw SyntaxError(cur().pos, "expected identifier" + found());
        }
        last_name_pos_ = cur().pos;
        return take().text;
    }

    // -- scopes ---------------------------------------------------------

    const Symbol* lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        return nullptr;
    }

    void declare(const VarDecl& d, SourcePos at) {
        Symbol sym{d.is_array(), d.is_const, d.dims.size()};
        if (!scopes_.back().emplace(d.name, sym).second) {
            throw SemanticError(at, "redeclaration of '" + d.name + "'");
        }
    }

    // -- declarations ---------------------------------------------------

    std::vector<Expr> dims(std::vector<std::int64_t>& extents) {
        std::vector<Expr> out;
        while (is_punct("[")) {
            SourcePos at = cur().pos;
            ++k_;
            if (cur().kind == Tok::Int) {
                auto v = take().value;
                if (v < 1) throw SemanticError(at, "array extent must be positive");
                out.push_back(Expr::lit(v));
                extents.push_back(v);
            } else {
                std::string n = identifier();
                auto c = constants_.find(n);
                if (c == constants_.end()) {
                    throw SemanticError(at, "array extent '" + n + "' is not a global constant");
                }
                if (c->second < 1) throw SemanticError(at, "array extent must be positive");
                out.push_back(Expr::var(n));
                extents.push_back(c->second);
            }
            expect_punct("]");
        }
        return out;
    }

    VarDecl global_decl() {
        VarDecl d;
        d.scope = DeclScope::Global;
        if (is_word("const")) {
            ++k_;
            d.is_const = true;
        }
        expect_word("int");
        SourcePos at = cur().pos;
        d.name = identifier();
        d.dims = dims(d.extents);
        if (is_punct("=")) {
            ++k_;
            if (d.is_array()) throw SyntaxError(cur().pos, "array initializers are not supported");
            SourcePos init_at = cur().pos;
            d.init = expr();
            if (d.is_const) {
                auto v = const_value(*d.init);
                if (!v) throw SemanticError(init_at, "initializer of const '" + d.name + "' is not constant");
                constants_[d.name] = *v;
            }
        } else if (d.is_const) {
            throw SemanticError(at, "const '" + d.name + "' needs an initializer");
        }
        if (d.is_const && d.is_array()) throw SemanticError(at, "const arrays are not supported");
        expect_punct(";");
        declare(d, at);
        return d;
    }

    std::optional<std::int64_t> const_value(const Expr& e) const {
        switch (e.kind) {
        case Expr::Kind::IntLit:
            return e.value;
        case Expr::Kind::Var: {
            auto c = constants_.find(e.name);
            if (c == constants_.end()) return std::nullopt;
            return c->second;
        }
        case Expr::Kind::Binary: {
            auto a = const_value(e.lhs());
            auto b = const_value(e.rhs());
            if (!a || !b) return std::nullopt;
            switch (e.op) {
            case BinaryOp::Add: return *a + *b;
            case BinaryOp::Sub: return *a - *b;
            case BinaryOp::Mul: return *a * *b;
            case BinaryOp::Div: return *b == 0 ? std::nullopt : std::optional<std::int64_t>(*a / *b);
            case BinaryOp::Mod: return *b == 0 ? std::nullopt : std::optional<std::int64_t>(*a % *b);
            default: return std::nullopt;
            }
        }
        default:
            return std::nullopt;
        }
    }

    FunctionDef function() {
        FunctionDef fn;
        expect_word("void");
        fn.name = identifier();
        SourcePos name_at = last_name_pos_;
        expect_punct("(");
        scopes_.emplace_back();
        if (!is_punct(")")) {
            for (;;) {
                expect_word("int");
                SourcePos at = cur().pos;
                VarDecl p;
                p.scope = DeclScope::Param;
                p.name = identifier();
                p.dims = dims(p.extents);
                declare(p, at);
                fn.params.push_back(std::move(p));
                if (!is_punct(",")) break;
                ++k_;
            }
        }
        expect_punct(")");
        if (lookup(fn.name) && lookup(fn.name)->is_array) {
            throw SemanticError(name_at, "function name '" + fn.name + "' collides with a variable");
        }
        fn.body = block(/*new_scope=*/false);
        scopes_.pop_back();
        return fn;
    }

    // -- statements -----------------------------------------------------

    Stmt block(bool new_scope) {
        expect_punct("{");
        if (new_scope) scopes_.emplace_back();
        std::vector<Stmt> stmts;
        while (!is_punct("}")) {
            if (cur().kind == Tok::End) throw SyntaxError(cur().pos, "unterminated block");
            stmts.push_back(statement());
        }
        ++k_;
        if (new_scope) scopes_.pop_back();
        return Stmt::block(std::move(stmts));
    }

    Stmt statement() {
        if (cur().kind == Tok::Pragma) {
            std::vector<Pragma> pragmas;
            while (cur().kind == Tok::Pragma) pragmas.push_back(Pragma::from_text(take().text));
            if (!is_word("for")) throw SyntaxError(cur().pos, "pragma must precede a for loop");
            return for_stmt(std::move(pragmas));
        }
        if (is_punct("{")) return block(true);
        if (is_word("for")) return for_stmt({});
        if (is_word("if")) return if_stmt();
        if (is_word("break") || is_word("continue")) {
            SourcePos at = cur().pos;
            bool is_break = cur().text == "break";
            ++k_;
            expect_punct(";");
            if (loop_depth_ == 0) {
                throw SemanticError(at, std::string(is_break ? "break" : "continue") + " outside a for loop");
            }
            return is_break ? Stmt::brk() : Stmt::cont();
        }
        if (is_word("int")) return local_decl();
        if (is_word("const")) throw SyntaxError(cur().pos, "const declarations are only allowed at global scope");
        if (cur().kind == Tok::Ident && peek_tok().kind == Tok::Punct && peek_tok().text == "(") {
            Expr c = primary();
            expect_punct(";");
            return Stmt::call(std::move(c));
        }
        Stmt s = assignment();
        expect_punct(";");
        return s;
    }

    Stmt local_decl() {
        expect_word("int");
        SourcePos at = cur().pos;
        VarDecl d;
        d.scope = DeclScope::Local;
        d.name = identifier();
        d.dims = dims(d.extents);
        if (is_punct("=")) {
            ++k_;
            if (d.is_array()) throw SyntaxError(cur().pos, "array initializers are not supported");
            d.init = expr();
        }
        expect_punct(";");
        declare(d, at);
        return Stmt::declare(std::move(d));
    }

    Stmt for_stmt(std::vector<Pragma> pragmas) {
        expect_word("for");
        expect_punct("(");
        SourcePos init_at = cur().pos;
        Stmt init = assignment();
        expect_punct(";");
        Expr cond = expr();
        expect_punct(";");
        SourcePos step_at = cur().pos;
        Stmt step = assignment();
        expect_punct(")");
        if (init.lhs.kind != Expr::Kind::Var) {
            throw SemanticError(init_at, "for-loop initializer must assign a scalar loop variable");
        }
        if (!step.lhs.is_var(init.lhs.name)) {
            throw SemanticError(step_at, "for-loop step must update the loop variable '" + init.lhs.name + "'");
        }
        ++loop_depth_;
        Stmt body = statement();
        --loop_depth_;
        return Stmt::for_loop(std::move(init), std::move(cond), std::move(step), std::move(body), std::move(pragmas));
    }

    Stmt if_stmt() {
        expect_word("if");
        expect_punct("(");
        Expr cond = expr();
        expect_punct(")");
        Stmt then_branch = statement();
        std::optional<Stmt> else_branch;
        if (is_word("else")) {
            ++k_;
            else_branch = statement();
        }
        return Stmt::if_stmt(std::move(cond), std::move(then_branch), std::move(else_branch));
    }

    Stmt assignment() {
        SourcePos at = cur().pos;
        Expr target = lvalue();
        if (is_punct("++") || is_punct("--")) {
            BinaryOp op = cur().text == "++" ? BinaryOp::Add : BinaryOp::Sub;
            ++k_;
            Expr value = Expr::binary(op, target, Expr::lit(1));
            return Stmt::assign(std::move(target), std::move(value));
        }
        if (cur().kind != Tok::Punct) throw SyntaxError(cur().pos, "expected assignment" + found());
        static const std::map<std::string, BinaryOp> compound = {
            {"+=", BinaryOp::Add}, {"-=", BinaryOp::Sub}, {"*=", BinaryOp::Mul},
            {"/=", BinaryOp::Div}, {"%=", BinaryOp::Mod}};
        std::string op = cur().text;
        if (op == "=") {
            ++k_;
            return Stmt::assign(std::move(target), expr());
        }
        auto c = compound.find(op);
        if (c == compound.end()) throw SyntaxError(at, "expected assignment" + found());
        ++k_;
        Expr value = Expr::binary(c->second, target, expr());
        return Stmt::assign(std::move(target), std::move(value));
    }

    Expr lvalue() {
        SourcePos at = cur().pos;
        Expr e = primary();
        if (e.kind == Expr::Kind::Var) {
            const Symbol* sym = lookup(e.name);
            if (sym->is_const) throw SemanticError(at, "assignment to const '" + e.name + "'");
            if (sym->is_array) throw SemanticError(at, "assignment to whole array '" + e.name + "'");
            return e;
        }
        if (e.kind == Expr::Kind::ArrayAccess) return e;
        throw SyntaxError(at, "expected assignable expression");
    }

    // -- expressions ----------------------------------------------------

    Expr expr() {
        SourcePos at = cur().pos;
        Expr e = relational();
        while (is_punct("==") || is_punct("!=")) {
            BinaryOp op = take().text == "==" ? BinaryOp::Eq : BinaryOp::Ne;
            e = Expr::binary(op, std::move(e), relational());
        }
        check_scalar(e, at);
        return e;
    }

    Expr relational() {
        Expr e = additive();
        for (;;) {
            BinaryOp op;
            if (is_punct("<")) op = BinaryOp::Lt;
            else if (is_punct("<=")) op = BinaryOp::Le;
            else if (is_punct(">")) op = BinaryOp::Gt;
            else if (is_punct(">=")) op = BinaryOp::Ge;
            else return e;
            ++k_;
            e = Expr::binary(op, std::move(e), additive());
        }
    }

    Expr additive() {
        Expr e = multiplicative();
        while (is_punct("+") || is_punct("-")) {
            BinaryOp op = take().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            e = Expr::binary(op, std::move(e), multiplicative());
        }
        return e;
    }

    Expr multiplicative() {
        Expr e = unary();
        while (is_punct("*") || is_punct("/") || is_punct("%")) {
            std::string t = take().text;
            BinaryOp op = t == "*" ? BinaryOp::Mul : t == "/" ? BinaryOp::Div : BinaryOp::Mod;
            e = Expr::binary(op, std::move(e), unary());
        }
        return e;
    }

    Expr unary() {
        if (is_punct("-")) {
            ++k_;
            Expr operand = unary();
            if (operand.kind == Expr::Kind::IntLit) {
                operand.value = -operand.value;
                return operand;
            }
            return Expr::binary(BinaryOp::Sub, Expr::lit(0), std::move(operand));
        }
        return primary();
    }

    Expr primary() {
        if (cur().kind == Tok::Int) return Expr::lit(take().value);
        if (is_punct("(")) {
            ++k_;
            Expr e = expr();
            expect_punct(")");
            return e;
        }
        SourcePos at = cur().pos;
        std::string name = identifier();
        if (is_punct("(")) {
            ++k_;
            std::vector<Expr> args;
            if (!is_punct(")")) {
                for (;;) {
                    args.push_back(call_arg());
                    if (!is_punct(",")) break;
                    ++k_;
                }
            }
            expect_punct(")");
            if (const Symbol* sym = lookup(name); sym && !function_names_.count(name)) {
                throw SemanticError(at, "'" + name + "' is a variable, not a function");
            }
            return Expr::call(std::move(name), std::move(args));
        }
        const Symbol* sym = lookup(name);
        if (!sym) throw SemanticError(at, "undeclared identifier '" + name + "'");
        if (is_punct("[")) {
            std::vector<Expr> indices;
            while (is_punct("[")) {
                ++k_;
                indices.push_back(expr());
                expect_punct("]");
            }
            if (!sym->is_array) throw SemanticError(at, "'" + name + "' is not an array");
            if (indices.size() != sym->rank) {
                throw SemanticError(at, "array '" + name + "' has " + std::to_string(sym->rank) +
                                            " dimension(s) but is indexed with " + std::to_string(indices.size()));
            }
            return Expr::access(std::move(name), std::move(indices));
        }
        return Expr::var(std::move(name));
    }

    // A whole array may appear only as a direct call argument.
    Expr call_arg() {
        if (cur().kind == Tok::Ident && peek_tok().kind == Tok::Punct &&
            (peek_tok().text == "," || peek_tok().text == ")")) {
            if (const Symbol* sym = lookup(cur().text); sym && sym->is_array) {
                return Expr::var(take().text);
            }
        }
        return expr();
    }

    void check_scalar(const Expr& e, SourcePos at) const {
        if (contains_bare_array(e)) throw SemanticError(at, "array used as a scalar value");
    }

    bool contains_bare_array(const Expr& e) const {
        switch (e.kind) {
        case Expr::Kind::Var: {
            const Symbol* sym = lookup(e.name);
            return sym && sym->is_array;
        }
        case Expr::Kind::Call:
            for (const auto& a : e.operands) {
                if (a.kind != Expr::Kind::Var && contains_bare_array(a)) return true;
            }
            return false;
        default:
            for (const auto& a : e.operands) {
                if (contains_bare_array(a)) return true;
            }
            return false;
        }
    }

    std::vector<Token> toks_;
    std::size_t k_ = 0;
    std::vector<std::map<std::string, Symbol>> scopes_;
    std::map<std::string, std::int64_t> constants_;
    std::set<std::string> function_names_;
    std::size_t loop_depth_ = 0;
    SourcePos last_name_pos_;
};

}  // namespace

TranslationUnit parse(std::string_view source) {
    Lexer lexer(source);
    Parser parser(lexer.run());
    return parser.run();
}

}  // namespace rewrite_rl
