#include "rewrite_rl/interpreter.hpp"

#include <limits>
#include <memory>
#include <set>

#include "rewrite_rl/errors.hpp"

namespace rewrite_rl {
namespace {

using Storage = std::shared_ptr<std::vector<std::int64_t>>;

struct Slot {
    std::vector<std::int64_t> extents;  // empty for scalars
    std::int64_t scalar = 0;
    Storage data;
};

enum class Flow { Normal, Break, Continue };

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

class Machine {
public:
    Machine(const TranslationUnit& unit, const InterpretOptions& opts) : unit_(unit), opts_(opts) {}

    Bindings run(const std::string& entry, const Bindings& inputs) {
        reject_undefined_calls();
        const FunctionDef* fn = unit_.find_function(entry);
        if (!fn) throw InterpretError(InterpretError::Kind::UndefinedFunction, "entry function '" + entry + "' not found");

        for (const auto& g : unit_.globals) {
            Slot slot = make_slot(g);
            if (auto in = inputs.find(g.name); in != inputs.end() && !g.is_const) {
                bind(slot, g, in->second);
            } else if (g.init) {
                frames_.emplace_back();
                slot.scalar = eval(*g.init);
                frames_.pop_back();
            }
            globals_[g.name] = std::move(slot);
        }

        Frame frame;
        frame.scopes.emplace_back();
        for (const auto& p : fn->params) {
            auto in = inputs.find(p.name);
            if (in == inputs.end()) {
                throw InterpretError(InterpretError::Kind::BadInput, "no input bound for parameter '" + p.name + "'");
            }
            Slot slot = make_slot(p);
            bind(slot, p, in->second);
            frame.scopes.back()[p.name] = std::move(slot);
        }

        Bindings out;
        frames_.push_back(std::move(frame));
        exec_block_items(fn->body);
        for (const auto& p : fn->params) {
            if (p.is_array()) out[p.name] = *frames_.back().scopes.front().at(p.name).data;
        }
        frames_.pop_back();
        for (const auto& name : written_globals_) {
            const Slot& s = globals_.at(name);
            if (s.data) {
                out[name] = *s.data;
            } else {
                out[name] = s.scalar;
            }
        }
        return out;
    }

private:
    struct Frame {
        std::vector<std::map<std::string, Slot>> scopes;
    };

    void reject_undefined_calls() const {
        auto check_expr = [&](const Expr& root, bool statement_call) {
            walk_expr(root, [&](const Expr& e) {
                if (e.kind != Expr::Kind::Call) return;
                if (!unit_.find_function(e.name)) {
                    throw InterpretError(InterpretError::Kind::UndefinedFunction,
                                         "call to undefined function '" + e.name + "'");
                }
                if (!(statement_call && &e == &root)) {
                    throw InterpretError(InterpretError::Kind::UndefinedFunction,
                                         "void function '" + e.name + "' used as a value");
                }
            });
        };
        for (const auto& g : unit_.globals) {
            if (g.init) check_expr(*g.init, false);
        }
        for (const auto& fn : unit_.functions) {
            walk_stmt(fn.body, [&](const Stmt& s) {
                own_exprs(s, [&](const Expr& e) { check_expr(e, s.kind == Stmt::Kind::Call); });
            });
        }
    }

    static Slot make_slot(const VarDecl& d) {
        Slot s;
        s.extents = d.extents;
        if (d.is_array()) {
            s.data = std::make_shared<std::vector<std::int64_t>>(static_cast<std::size_t>(d.element_count()), 0);
        }
        return s;
    }

    static void bind(Slot& slot, const VarDecl& d, const Value& v) {
        if (d.is_array()) {
            const auto* arr = std::get_if<std::vector<std::int64_t>>(&v);
            if (!arr || static_cast<std::int64_t>(arr->size()) != d.element_count()) {
                throw InterpretError(InterpretError::Kind::BadInput,
                                     "input for '" + d.name + "' must be an array of " +
                                         std::to_string(d.element_count()) + " elements");
            }
            *slot.data = *arr;
        } else {
            const auto* x = std::get_if<std::int64_t>(&v);
            if (!x) throw InterpretError(InterpretError::Kind::BadInput, "input for '" + d.name + "' must be a scalar");
            slot.scalar = *x;
        }
    }

    void tick() {
        if (++steps_ > opts_.step_budget) {
            throw InterpretError(InterpretError::Kind::StepBudgetExceeded,
                                 "step budget of " + std::to_string(opts_.step_budget) + " exceeded");
        }
    }

    Slot& lookup(const std::string& name) {
        if (!frames_.empty()) {
            auto& scopes = frames_.back().scopes;
            for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
                auto f = it->find(name);
                if (f != it->end()) return f->second;
            }
        }
        return globals_.at(name);
    }

    bool is_global(const std::string& name) const {
        if (!frames_.empty()) {
            for (const auto& scope : frames_.back().scopes) {
                if (scope.count(name)) return false;
            }
        }
        return globals_.count(name) != 0;
    }

    std::int64_t& element(const Expr& access) {
        Slot& slot = lookup(access.name);
        std::int64_t offset = 0;
        for (std::size_t d = 0; d < access.operands.size(); ++d) {
            std::int64_t idx = eval(access.operands[d]);
            if (idx < 0 || idx >= slot.extents[d]) {
                throw InterpretError(InterpretError::Kind::OutOfBounds,
                                     "index " + std::to_string(idx) + " out of bounds for dimension " +
                                         std::to_string(d) + " of '" + access.name + "' (extent " +
                                         std::to_string(slot.extents[d]) + ")");
            }
            offset = offset * slot.extents[d] + idx;
        }
        return (*slot.data)[static_cast<std::size_t>(offset)];
    }

    std::int64_t eval(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::IntLit:
            return e.value;
        case Expr::Kind::Var:
            return lookup(e.name).scalar;
        case Expr::Kind::ArrayAccess:
            return element(e);
        case Expr::Kind::Call:
            throw InterpretError(InterpretError::Kind::UndefinedFunction, "void function used as a value");
        case Expr::Kind::Binary:
            break;
        }
        std::int64_t a = eval(e.lhs());
        std::int64_t b = eval(e.rhs());
        switch (e.op) {
        case BinaryOp::Add: return wrap_add(a, b);
        case BinaryOp::Sub: return wrap_sub(a, b);
        case BinaryOp::Mul: return wrap_mul(a, b);
        case BinaryOp::Div:
        case BinaryOp::Mod:
            if (b == 0) throw InterpretError(InterpretError::Kind::DivisionByZero, "division by zero");
            if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
                return e.op == BinaryOp::Div ? a : 0;
            }
            return e.op == BinaryOp::Div ? a / b : a % b;
        case BinaryOp::Lt: return a < b;
        case BinaryOp::Le: return a <= b;
        case BinaryOp::Gt: return a > b;
        case BinaryOp::Ge: return a >= b;
        case BinaryOp::Eq: return a == b;
        case BinaryOp::Ne: return a != b;
        }
        return 0;
    }

    void assign(const Expr& target, std::int64_t v) {
        if (is_global(target.name)) written_globals_.insert(target.name);
        if (target.kind == Expr::Kind::Var) {
            lookup(target.name).scalar = v;
        } else {
            element(target) = v;
        }
    }

    Flow exec_block_items(const Stmt& block) {
        for (const auto& s : block.children) {
            Flow f = exec(s);
            if (f != Flow::Normal) return f;
        }
        return Flow::Normal;
    }

    Flow exec(const Stmt& s) {
        tick();
        switch (s.kind) {
        case Stmt::Kind::Block: {
            frames_.back().scopes.emplace_back();
            Flow f = exec_block_items(s);
            frames_.back().scopes.pop_back();
            return f;
        }
        case Stmt::Kind::Decl: {
            Slot slot = make_slot(s.decl);
            if (s.decl.init) slot.scalar = eval(*s.decl.init);
            frames_.back().scopes.back()[s.decl.name] = std::move(slot);
            return Flow::Normal;
        }
        case Stmt::Kind::Assign: {
            std::int64_t v = eval(s.expr);
            assign(s.lhs, v);
            return Flow::Normal;
        }
        case Stmt::Kind::Break:
            return Flow::Break;
        case Stmt::Kind::Continue:
            return Flow::Continue;
        case Stmt::Kind::If:
            if (eval(s.expr) != 0) return exec_scoped(s.children[0]);
            if (s.has_else()) return exec_scoped(s.children[1]);
            return Flow::Normal;
        case Stmt::Kind::For: {
            exec(s.for_init());
            for (;;) {
                tick();
                if (eval(s.expr) == 0) break;
                Flow f = exec_scoped(s.for_body());
                if (f == Flow::Break) break;
                exec(s.for_step());
            }
            return Flow::Normal;
        }
        case Stmt::Kind::Call:
            call(s.expr);
            return Flow::Normal;
        }
        return Flow::Normal;
    }

    // A non-block branch still gets its own scope so a bare declaration cannot leak.
    Flow exec_scoped(const Stmt& s) {
        if (s.kind == Stmt::Kind::Block) return exec(s);
        frames_.back().scopes.emplace_back();
        Flow f = exec(s);
        frames_.back().scopes.pop_back();
        return f;
    }

    void call(const Expr& c) {
        const FunctionDef* fn = unit_.find_function(c.name);
        if (!fn) throw InterpretError(InterpretError::Kind::UndefinedFunction, "call to undefined function '" + c.name + "'");
        if (fn->params.size() != c.operands.size()) {
            throw InterpretError(InterpretError::Kind::BadInput, "wrong number of arguments to '" + c.name + "'");
        }
        if (frames_.size() >= opts_.max_call_depth) {
            throw InterpretError(InterpretError::Kind::StepBudgetExceeded, "call depth limit exceeded");
        }
        Frame frame;
        frame.scopes.emplace_back();
        for (std::size_t i = 0; i < fn->params.size(); ++i) {
            const VarDecl& p = fn->params[i];
            const Expr& arg = c.operands[i];
            Slot slot;
            slot.extents = p.extents;
            if (p.is_array()) {
                if (arg.kind != Expr::Kind::Var || !lookup(arg.name).data) {
                    throw InterpretError(InterpretError::Kind::BadInput, "array parameter '" + p.name + "' needs an array argument");
                }
                Slot& src = lookup(arg.name);
                if (static_cast<std::int64_t>(src.data->size()) != p.element_count()) {
                    throw InterpretError(InterpretError::Kind::BadInput, "array argument size mismatch for '" + p.name + "'");
                }
                if (is_global(arg.name)) written_globals_.insert(arg.name);
                slot.data = src.data;
            } else {
                slot.scalar = eval(arg);
            }
            frame.scopes.back()[p.name] = std::move(slot);
        }
        frames_.push_back(std::move(frame));
        exec_block_items(fn->body);
        frames_.pop_back();
    }

    const TranslationUnit& unit_;
    InterpretOptions opts_;
    std::map<std::string, Slot> globals_;
    std::vector<Frame> frames_;
    std::set<std::string> written_globals_;
    std::uint64_t steps_ = 0;
};

}  // namespace

Bindings interpret(const TranslationUnit& unit, const std::string& entry, const Bindings& inputs,
                   const InterpretOptions& options) {
    Machine m(unit, options);
    return m.run(entry, inputs);
}

}  // namespace rewrite_rl
