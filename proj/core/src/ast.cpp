#include "cbnlab/ast.hpp"

namespace cbnlab {

const char* op_name(BinOp op) {
    switch (op) {
        case BinOp::Add: return "add";
        case BinOp::Sub: return "sub";
        case BinOp::Lt: return "lt";
        case BinOp::Eq: return "eq";
        case BinOp::And: return "and";
        case BinOp::Or: return "or";
    }
    return "?";
}

ExprPtr Expr::constant(Value v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Const;
    e->value = v;
    return e;
}

ExprPtr Expr::var(Address a) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Var;
    e->addr = a;
    return e;
}

ExprPtr Expr::negate(ExprPtr inner) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Not;
    e->lhs = std::move(inner);
    return e;
}

ExprPtr Expr::bin(BinOp op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Bin;
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Expr::Kind::Const: return a->value == b->value;
        case Expr::Kind::Var: return a->addr == b->addr;
        case Expr::Kind::Not: return equal(a->lhs, b->lhs);
        case Expr::Kind::Bin:
            return a->op == b->op && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    }
    return false;
}

StmtLPtr StmtL::assign(Address a, ExprPtr e) {
    auto s = std::make_shared<StmtL>();
    s->kind = Kind::Assign;
    s->addr = a;
    s->expr = std::move(e);
    return s;
}

StmtLPtr StmtL::ifelse(ExprPtr c, Program t, Program e) {
    auto s = std::make_shared<StmtL>();
    s->kind = Kind::If;
    s->expr = std::move(c);
    s->then_block = std::move(t);
    s->else_block = std::move(e);
    return s;
}

StmtLPtr StmtL::loop(ExprPtr c, Program b) {
    auto s = std::make_shared<StmtL>();
    s->kind = Kind::While;
    s->expr = std::move(c);
    s->body = std::move(b);
    return s;
}

StmtLPtr StmtL::call(std::string f) {
    auto s = std::make_shared<StmtL>();
    s->kind = Kind::Call;
    s->fun = std::move(f);
    return s;
}

StmtLPtr StmtL::throw_() {
    auto s = std::make_shared<StmtL>();
    s->kind = Kind::Throw;
    return s;
}

bool equal(const StmtLPtr& a, const StmtLPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case StmtL::Kind::Assign: return a->addr == b->addr && equal(a->expr, b->expr);
        case StmtL::Kind::If:
            return equal(a->expr, b->expr) && equal(a->then_block, b->then_block) &&
                   equal(a->else_block, b->else_block);
        case StmtL::Kind::While: return equal(a->expr, b->expr) && equal(a->body, b->body);
        case StmtL::Kind::Call: return a->fun == b->fun;
        case StmtL::Kind::Throw: return true;
    }
    return false;
}

bool equal(const Program& a, const Program& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!equal(a[i], b[i])) return false;
    return true;
}

StmtNPtr StmtN::assign(Address a, ExprPtr e) {
    auto s = std::make_shared<StmtN>();
    s->kind = Kind::Assign;
    s->addr = a;
    s->expr = std::move(e);
    return s;
}

StmtNPtr StmtN::ifelse(ExprPtr c, StmtNPtr t, StmtNPtr e) {
    auto s = std::make_shared<StmtN>();
    s->kind = Kind::If;
    s->expr = std::move(c);
    s->a = std::move(t);
    s->b = std::move(e);
    return s;
}

StmtNPtr StmtN::loop(ExprPtr c, StmtNPtr body) {
    auto s = std::make_shared<StmtN>();
    s->kind = Kind::While;
    s->expr = std::move(c);
    s->a = std::move(body);
    return s;
}

StmtNPtr StmtN::call(std::string f) {
    auto s = std::make_shared<StmtN>();
    s->kind = Kind::Call;
    s->fun = std::move(f);
    return s;
}

StmtNPtr StmtN::throw_() {
    auto s = std::make_shared<StmtN>();
    s->kind = Kind::Throw;
    return s;
}

StmtNPtr StmtN::snil() {
    auto s = std::make_shared<StmtN>();
    s->kind = Kind::Snil;
    return s;
}

StmtNPtr StmtN::seq(StmtNPtr head, StmtNPtr tail) {
    auto s = std::make_shared<StmtN>();
    s->kind = Kind::Seq;
    s->a = std::move(head);
    s->b = std::move(tail);
    return s;
}

bool equal(const StmtNPtr& a, const StmtNPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case StmtN::Kind::Assign: return a->addr == b->addr && equal(a->expr, b->expr);
        case StmtN::Kind::If:
            return equal(a->expr, b->expr) && equal(a->a, b->a) && equal(a->b, b->b);
        case StmtN::Kind::While: return equal(a->expr, b->expr) && equal(a->a, b->a);
        case StmtN::Kind::Call: return a->fun == b->fun;
        case StmtN::Kind::Throw:
        case StmtN::Kind::Snil: return true;
        case StmtN::Kind::Seq: return equal(a->a, b->a) && equal(a->b, b->b);
    }
    return false;
}

std::string print_expr(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::Const: {
            const Value& v = e->value;
            if (v.is_bool()) return std::string("(bool ") + (v.as_bool() ? "true" : "false") + ")";
            if (v.is_int()) return "(int " + std::to_string(v.as_int()) + ")";
            if (v.is_addr()) return "(addr a" + std::to_string(v.as_addr().index) + ")";
            return "(unit)";
        }
        case Expr::Kind::Var: return "(var a" + std::to_string(e->addr.index) + ")";
        case Expr::Kind::Not: return "(not " + print_expr(e->lhs) + ")";
        case Expr::Kind::Bin:
            return std::string("(") + op_name(e->op) + " " + print_expr(e->lhs) + " " +
                   print_expr(e->rhs) + ")";
    }
    return "";
}

static std::string print_block(const Program& p) {
    std::string out = "(block";
    for (const auto& s : p) out += " " + print_stmt(s);
    out += ")";
    return out;
}

std::string print_stmt(const StmtLPtr& s) {
    switch (s->kind) {
        case StmtL::Kind::Assign:
            return "(assign a" + std::to_string(s->addr.index) + " " + print_expr(s->expr) + ")";
        case StmtL::Kind::If:
            return "(if " + print_expr(s->expr) + " " + print_block(s->then_block) + " " +
                   print_block(s->else_block) + ")";
        case StmtL::Kind::While:
            return "(while " + print_expr(s->expr) + " " + print_block(s->body) + ")";
        case StmtL::Kind::Call: return "(call " + s->fun + ")";
        case StmtL::Kind::Throw: return "(throw)";
    }
    return "";
}

std::string print_program(const Program& p) {
    std::string out;
    for (const auto& s : p) {
        if (!out.empty()) out += "\n";
        out += print_stmt(s);
    }
    return out;
}

bool stmtl_has_no_seq(const Program& p) {
    for (const auto& s : p) {
        if (!s) return false;
        switch (s->kind) {
            case StmtL::Kind::If:
                if (!stmtl_has_no_seq(s->then_block) || !stmtl_has_no_seq(s->else_block))
                    return false;
                break;
            case StmtL::Kind::While:
                if (!stmtl_has_no_seq(s->body)) return false;
                break;
            default: break;
        }
    }
    return true;
}

} // namespace cbnlab
