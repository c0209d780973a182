#include "cbnlab/interp.hpp"

#include "cbnlab/translate.hpp"

namespace cbnlab {

const char* outcome_name(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Normal: return "normal";
        case OutcomeKind::Error: return "error";
        case OutcomeKind::OutOfFuel: return "out_of_fuel";
    }
    return "?";
}

namespace {

enum class EvKind { Ok, Err, Fuel };

struct EvResult {
    EvKind kind;
    Value v{};
};

EvResult ev(const MemoryState& m, const ExprPtr& e, std::uint64_t k) {
    if (k == 0) return {EvKind::Fuel};
    std::uint64_t k1 = k - 1;
    switch (e->kind) {
        case Expr::Kind::Const: return {EvKind::Ok, e->value};
        case Expr::Kind::Var: {
            auto v = read_cell(m, e->addr);
            if (!v) return {EvKind::Err};
            return {EvKind::Ok, *v};
        }
        case Expr::Kind::Not: {
            EvResult r = ev(m, e->lhs, k1);
            if (r.kind != EvKind::Ok) return r;
            if (!r.v.is_bool()) return {EvKind::Err};
            return {EvKind::Ok, Value::boolean(!r.v.as_bool())};
        }
        case Expr::Kind::Bin: {
            EvResult l = ev(m, e->lhs, k1);
            if (l.kind != EvKind::Ok) return l;
            EvResult r = ev(m, e->rhs, k1);
            if (r.kind != EvKind::Ok) return r;
            switch (e->op) {
                case BinOp::Add:
                case BinOp::Sub:
                    if (!l.v.is_int() || !r.v.is_int()) return {EvKind::Err};
                    return {EvKind::Ok, Value::integer(wrap_int(e->op == BinOp::Add
                                                                    ? l.v.as_int() + r.v.as_int()
                                                                    : l.v.as_int() - r.v.as_int()))};
                case BinOp::Lt:
                    if (!l.v.is_int() || !r.v.is_int()) return {EvKind::Err};
                    return {EvKind::Ok, Value::boolean(l.v.as_int() < r.v.as_int())};
                case BinOp::Eq:
                    if (!l.v.is_int() || !r.v.is_int()) return {EvKind::Err};
                    return {EvKind::Ok, Value::boolean(l.v.as_int() == r.v.as_int())};
                case BinOp::And:
                case BinOp::Or:
                    if (!l.v.is_bool() || !r.v.is_bool()) return {EvKind::Err};
                    return {EvKind::Ok, Value::boolean(e->op == BinOp::And
                                                           ? (l.v.as_bool() && r.v.as_bool())
                                                           : (l.v.as_bool() || r.v.as_bool()))};
            }
            return {EvKind::Err};
        }
    }
    return {EvKind::Err};
}

struct Ctx {
    const FunTable* funtab;
    FuelConfig base;
    std::map<std::string, StmtNPtr> nested_bodies;

    const StmtNPtr* nested_body(const std::string& f) {
        auto it = nested_bodies.find(f);
        if (it != nested_bodies.end()) return &it->second;
        auto fit = funtab->find(f);
        if (fit == funtab->end()) return nullptr;
        auto [ins, _] = nested_bodies.emplace(f, translate_to_nested(fit->second));
        return &ins->second;
    }
};

ExecDetail fail_fuel(const MemoryState& m) { return {OutcomeKind::OutOfFuel, m, "fuel exhausted"}; }
ExecDetail fail_err(const MemoryState& m, std::string msg) {
    return {OutcomeKind::Error, m, std::move(msg)};
}

ExecDetail from_ev(const MemoryState& m, EvKind k) {
    if (k == EvKind::Fuel) return fail_fuel(m);
    return fail_err(m, "expression evaluation failed");
}

// ---- shared fuel, nested form (mirrors the fully inlined encoding: one fuel
// unit per node entry, including Seq and Snil) ----

ExecDetail sn_exec(Ctx& ctx, const MemoryState& m, const StmtNPtr& s, std::uint64_t k) {
    if (k == 0) return fail_fuel(m);
    std::uint64_t k1 = k - 1;
    switch (s->kind) {
        case StmtN::Kind::Seq: {
            ExecDetail r = sn_exec(ctx, m, s->a, k1);
            if (r.kind != OutcomeKind::Normal) return r;
            return sn_exec(ctx, r.memory, s->b, k1);
        }
        case StmtN::Kind::Snil: return {OutcomeKind::Normal, m, ""};
        default: break;
    }
    if (m.throw_flag) return {OutcomeKind::Normal, m, ""};
    switch (s->kind) {
        case StmtN::Kind::Assign: {
            EvResult r = ev(m, s->expr, k1);
            if (r.kind != EvKind::Ok) return from_ev(m, r.kind);
            return {OutcomeKind::Normal, write_cell(m, s->addr, r.v), ""};
        }
        case StmtN::Kind::If: {
            EvResult c = ev(m, s->expr, k1);
            if (c.kind != EvKind::Ok) return from_ev(m, c.kind);
            if (!c.v.is_bool()) return fail_err(m, "condition is not a boolean");
            return sn_exec(ctx, m, c.v.as_bool() ? s->a : s->b, k1);
        }
        case StmtN::Kind::While: {
            EvResult c = ev(m, s->expr, k1);
            if (c.kind != EvKind::Ok) return from_ev(m, c.kind);
            if (!c.v.is_bool()) return fail_err(m, "condition is not a boolean");
            if (!c.v.as_bool()) return {OutcomeKind::Normal, m, ""};
            ExecDetail r = sn_exec(ctx, m, s->a, k1);
            if (r.kind != OutcomeKind::Normal) return r;
            return sn_exec(ctx, r.memory, s, k1);
        }
        case StmtN::Kind::Call: {
            const StmtNPtr* body = ctx.nested_body(s->fun);
            if (!body) return fail_err(m, "unknown function '" + s->fun + "'");
            return sn_exec(ctx, m, *body, k1);
        }
        case StmtN::Kind::Throw: return {OutcomeKind::Normal, set_throw(m), ""};
        default: return fail_err(m, "unreachable");
    }
}

// ---- per-layer fuel, nested form (Seq/Snil are free; statement fuel bounds
// nesting depth and loop turns, like the list walker) ----

ExecDetail pn_exec(Ctx& ctx, const MemoryState& m, const StmtNPtr& s, std::uint64_t kst,
                   std::uint64_t kf) {
    switch (s->kind) {
        case StmtN::Kind::Seq: {
            ExecDetail r = pn_exec(ctx, m, s->a, kst, kf);
            if (r.kind != OutcomeKind::Normal) return r;
            return pn_exec(ctx, r.memory, s->b, kst, kf);
        }
        case StmtN::Kind::Snil: return {OutcomeKind::Normal, m, ""};
        default: break;
    }
    if (kst == 0) return fail_fuel(m);
    std::uint64_t kst1 = kst - 1;
    if (m.throw_flag) return {OutcomeKind::Normal, m, ""};
    switch (s->kind) {
        case StmtN::Kind::Assign: {
            EvResult r = ev(m, s->expr, ctx.base.k_expr);
            if (r.kind != EvKind::Ok) return from_ev(m, r.kind);
            return {OutcomeKind::Normal, write_cell(m, s->addr, r.v), ""};
        }
        case StmtN::Kind::If: {
            EvResult c = ev(m, s->expr, ctx.base.k_expr);
            if (c.kind != EvKind::Ok) return from_ev(m, c.kind);
            if (!c.v.is_bool()) return fail_err(m, "condition is not a boolean");
            return pn_exec(ctx, m, c.v.as_bool() ? s->a : s->b, kst1, kf);
        }
        case StmtN::Kind::While: {
            EvResult c = ev(m, s->expr, ctx.base.k_expr);
            if (c.kind != EvKind::Ok) return from_ev(m, c.kind);
            if (!c.v.is_bool()) return fail_err(m, "condition is not a boolean");
            if (!c.v.as_bool()) return {OutcomeKind::Normal, m, ""};
            ExecDetail r = pn_exec(ctx, m, s->a, kst1, kf);
            if (r.kind != OutcomeKind::Normal) return r;
            return pn_exec(ctx, r.memory, s, kst1, kf);
        }
        case StmtN::Kind::Call: {
            if (kf == 0) return fail_fuel(m);
            const StmtNPtr* body = ctx.nested_body(s->fun);
            if (!body) return fail_err(m, "unknown function '" + s->fun + "'");
            return pn_exec(ctx, m, *body, kst1, kf - 1);
        }
        case StmtN::Kind::Throw: return {OutcomeKind::Normal, set_throw(m), ""};
        default: return fail_err(m, "unreachable");
    }
}

// ---- shared fuel, list form (one fuel unit per walker step including the
// end of the list; the statement works with what the walker left) ----

ExecDetail sl_disp(Ctx& ctx, const MemoryState& m, const StmtLPtr& s, std::uint64_t k);

ExecDetail sl_walk(Ctx& ctx, MemoryState m, const Program& p, std::uint64_t k) {
    for (const auto& s : p) {
        if (k == 0) return fail_fuel(m);
        k -= 1;
        ExecDetail r = sl_disp(ctx, m, s, k);
        if (r.kind != OutcomeKind::Normal) return r;
        m = r.memory;
    }
    if (k == 0) return fail_fuel(m);
    return {OutcomeKind::Normal, m, ""};
}

ExecDetail sl_disp(Ctx& ctx, const MemoryState& m, const StmtLPtr& s, std::uint64_t k) {
    if (m.throw_flag) return {OutcomeKind::Normal, m, ""};
    switch (s->kind) {
        case StmtL::Kind::Assign: {
            EvResult r = ev(m, s->expr, k);
            if (r.kind != EvKind::Ok) return from_ev(m, r.kind);
            return {OutcomeKind::Normal, write_cell(m, s->addr, r.v), ""};
        }
        case StmtL::Kind::If: {
            EvResult c = ev(m, s->expr, k);
            if (c.kind != EvKind::Ok) return from_ev(m, c.kind);
            if (!c.v.is_bool()) return fail_err(m, "condition is not a boolean");
            return sl_walk(ctx, m, c.v.as_bool() ? s->then_block : s->else_block, k);
        }
        case StmtL::Kind::While: {
            MemoryState cur = m;
            while (true) {
                if (cur.throw_flag) return {OutcomeKind::Normal, cur, ""};
                EvResult c = ev(cur, s->expr, k);
                if (c.kind != EvKind::Ok) return from_ev(cur, c.kind);
                if (!c.v.is_bool()) return fail_err(cur, "condition is not a boolean");
                if (!c.v.as_bool()) return {OutcomeKind::Normal, cur, ""};
                ExecDetail r = sl_walk(ctx, cur, s->body, k);
                if (r.kind != OutcomeKind::Normal) return r;
                cur = r.memory;
                if (k == 0) return fail_fuel(cur);
                k -= 1;  // next turn re-enters the walker on the loop statement
            }
        }
        case StmtL::Kind::Call: {
            auto it = ctx.funtab->find(s->fun);
            if (it == ctx.funtab->end()) return fail_err(m, "unknown function '" + s->fun + "'");
            return sl_walk(ctx, m, it->second, k);
        }
        case StmtL::Kind::Throw: return {OutcomeKind::Normal, set_throw(m), ""};
    }
    return fail_err(m, "unreachable");
}

// ---- per-layer fuel, list form (walker is structural and free; dispatch
// spends statement fuel, expressions get a fresh budget per statement) ----

ExecDetail pl_disp(Ctx& ctx, const MemoryState& m, const StmtLPtr& s, std::uint64_t kst,
                   std::uint64_t kf);

ExecDetail pl_walk(Ctx& ctx, MemoryState m, const Program& p, std::uint64_t kst,
                   std::uint64_t kf) {
    for (const auto& s : p) {
        if (m.throw_flag) return {OutcomeKind::Normal, m, ""};
        ExecDetail r = pl_disp(ctx, m, s, kst, kf);
        if (r.kind != OutcomeKind::Normal) return r;
        m = r.memory;
    }
    return {OutcomeKind::Normal, m, ""};
}

ExecDetail pl_disp(Ctx& ctx, const MemoryState& m, const StmtLPtr& s, std::uint64_t kst,
                   std::uint64_t kf) {
    if (kst == 0) return fail_fuel(m);
    std::uint64_t kst1 = kst - 1;
    if (m.throw_flag) return {OutcomeKind::Normal, m, ""};
    switch (s->kind) {
        case StmtL::Kind::Assign: {
            EvResult r = ev(m, s->expr, ctx.base.k_expr);
            if (r.kind != EvKind::Ok) return from_ev(m, r.kind);
            return {OutcomeKind::Normal, write_cell(m, s->addr, r.v), ""};
        }
        case StmtL::Kind::If: {
            EvResult c = ev(m, s->expr, ctx.base.k_expr);
            if (c.kind != EvKind::Ok) return from_ev(m, c.kind);
            if (!c.v.is_bool()) return fail_err(m, "condition is not a boolean");
            return pl_walk(ctx, m, c.v.as_bool() ? s->then_block : s->else_block, kst1, kf);
        }
        case StmtL::Kind::While: {
            EvResult c = ev(m, s->expr, ctx.base.k_expr);
            if (c.kind != EvKind::Ok) return from_ev(m, c.kind);
            if (!c.v.is_bool()) return fail_err(m, "condition is not a boolean");
            if (!c.v.as_bool()) return {OutcomeKind::Normal, m, ""};
            ExecDetail r = pl_walk(ctx, m, s->body, kst1, kf);
            if (r.kind != OutcomeKind::Normal) return r;
            return pl_disp(ctx, r.memory, s, kst1, kf);
        }
        case StmtL::Kind::Call: {
            if (kf == 0) return fail_fuel(m);
            auto it = ctx.funtab->find(s->fun);
            if (it == ctx.funtab->end()) return fail_err(m, "unknown function '" + s->fun + "'");
            return pl_walk(ctx, m, it->second, kst1, kf - 1);
        }
        case StmtL::Kind::Throw: return {OutcomeKind::Normal, set_throw(m), ""};
    }
    return fail_err(m, "unreachable");
}

} // namespace

std::optional<Value> eval_expr(const MemoryState& m, const Env& env, const ExprPtr& e,
                               std::uint64_t k) {
    (void)env;
    EvResult r = ev(m, e, k);
    if (r.kind != EvKind::Ok) return std::nullopt;
    return r.v;
}

ExecDetail exec_nested_detail(const MemoryState& m0, const FuelConfig& fuel,
                              const FunTable& funtab, const StmtNPtr& s) {
    Ctx ctx{&funtab, fuel, {}};
    if (fuel.shared) return sn_exec(ctx, m0, s, fuel.k_stt);
    return pn_exec(ctx, m0, s, fuel.k_stt, fuel.k_fun);
}

ExecDetail exec_list_detail(const MemoryState& m0, const FuelConfig& fuel, const FunTable& funtab,
                            const Program& p) {
    Ctx ctx{&funtab, fuel, {}};
    if (fuel.shared) return sl_walk(ctx, m0, p, fuel.k_stt);
    return pl_walk(ctx, m0, p, fuel.k_stt, fuel.k_fun);
}

std::optional<MemoryState> exec_nested(const MemoryState& m0, const Env& env,
                                       const FunTable& funtab, const StmtNPtr& s) {
    ExecDetail d = exec_nested_detail(m0, env.fuel, funtab, s);
    if (d.kind != OutcomeKind::Normal) return std::nullopt;
    return d.memory;
}

std::optional<MemoryState> exec_list(const MemoryState& m0, const Env& env, const FunTable& funtab,
                                     const Program& p) {
    ExecDetail d = exec_list_detail(m0, env.fuel, funtab, p);
    if (d.kind != OutcomeKind::Normal) return std::nullopt;
    return d.memory;
}

static RunResult finish(const ExecDetail& d) {
    MemoryState initial = init_memory();
    switch (d.kind) {
        case OutcomeKind::Normal:
            if (d.memory.throw_flag) return {{OutcomeKind::Normal, "reverted by throw"}, initial};
            return {{OutcomeKind::Normal, ""}, d.memory};
        case OutcomeKind::Error: return {{OutcomeKind::Error, d.message}, initial};
        case OutcomeKind::OutOfFuel: return {{OutcomeKind::OutOfFuel, d.message}, initial};
    }
    return {{OutcomeKind::Error, "unreachable"}, initial};
}

RunResult run_program(const Program& p, const FuelConfig& fuel, const FunTable& funtab) {
    return finish(exec_list_detail(init_memory(), fuel, funtab, p));
}

RunResult run_program(const StmtNPtr& s, const FuelConfig& fuel, const FunTable& funtab) {
    return finish(exec_nested_detail(init_memory(), fuel, funtab, s));
}

} // namespace cbnlab
