#include "cbnlab/gen.hpp"

#include <random>
#include <set>

namespace cbnlab {
namespace {

// Cell types the generator has definitely established on every path.
enum class CellTy { Int, Bool, Addr };

struct GenCtx {
    std::mt19937_64 rng;
    std::map<std::uint8_t, CellTy> known;
    std::vector<std::string> funs;
    const FunTable* funtab = nullptr;
    std::size_t stmts_left = 0;
    bool in_loop = false;

    std::uint64_t pick(std::uint64_t n) { return n ? rng() % n : 0; }
    bool chance(double p) { return (rng() % 1000) < static_cast<std::uint64_t>(p * 1000); }

    std::vector<std::uint8_t> cells_of(CellTy ty) const {
        std::vector<std::uint8_t> out;
        for (auto& [a, t] : known)
            if (t == ty) out.push_back(a);
        return out;
    }
};

ExprPtr gen_int_expr(GenCtx& c, std::size_t depth);
ExprPtr gen_bool_expr(GenCtx& c, std::size_t depth);

ExprPtr gen_int_expr(GenCtx& c, std::size_t depth) {
    auto ints = c.cells_of(CellTy::Int);
    std::uint64_t r = c.pick(depth == 0 || c.chance(0.4) ? 2 : 4);
    switch (r) {
        case 0: return Expr::constant(Value::integer(static_cast<std::int64_t>(c.pick(17)) - 8));
        case 1:
            if (!ints.empty())
                return Expr::var(Address{ints[c.pick(ints.size())]});
            return Expr::constant(Value::integer(static_cast<std::int64_t>(c.pick(17)) - 8));
        case 2: return Expr::bin(BinOp::Add, gen_int_expr(c, depth - 1), gen_int_expr(c, depth - 1));
        default:
            return Expr::bin(BinOp::Sub, gen_int_expr(c, depth - 1), gen_int_expr(c, depth - 1));
    }
}

ExprPtr gen_bool_expr(GenCtx& c, std::size_t depth) {
    auto bools = c.cells_of(CellTy::Bool);
    std::uint64_t r = c.pick(depth == 0 || c.chance(0.4) ? 2 : 6);
    switch (r) {
        case 0: return Expr::constant(Value::boolean(c.chance(0.5)));
        case 1:
            if (!bools.empty())
                return Expr::var(Address{bools[c.pick(bools.size())]});
            return Expr::constant(Value::boolean(c.chance(0.5)));
        case 2: return Expr::bin(BinOp::Lt, gen_int_expr(c, depth - 1), gen_int_expr(c, depth - 1));
        case 3: return Expr::bin(BinOp::Eq, gen_int_expr(c, depth - 1), gen_int_expr(c, depth - 1));
        case 4:
            return Expr::bin(c.chance(0.5) ? BinOp::And : BinOp::Or, gen_bool_expr(c, depth - 1),
                             gen_bool_expr(c, depth - 1));
        default: return Expr::negate(gen_bool_expr(c, depth - 1));
    }
}

void collect_writes(const Program& p, const FunTable* funtab, std::set<std::uint8_t>& out) {
    for (auto& s : p) {
        switch (s->kind) {
            case StmtL::Kind::Assign: out.insert(s->addr.index); break;
            case StmtL::Kind::If:
                collect_writes(s->then_block, funtab, out);
                collect_writes(s->else_block, funtab, out);
                break;
            case StmtL::Kind::While: collect_writes(s->body, funtab, out); break;
            case StmtL::Kind::Call:
                if (funtab) {
                    auto it = funtab->find(s->fun);
                    if (it != funtab->end()) collect_writes(it->second, funtab, out);
                }
                break;
            case StmtL::Kind::Throw: break;
        }
    }
}

StmtLPtr gen_assign(GenCtx& c) {
    Address a{static_cast<std::uint8_t>(c.pick(kMemCells))};
    // Inside a loop the cell's type must stay fixed: a read generated earlier in
    // the body sees this write's value on the next iteration.
    CellTy ty;
    auto it = c.known.find(a.index);
    if (c.in_loop && it != c.known.end()) {
        ty = it->second;
    } else if (c.chance(0.1)) {
        ty = CellTy::Addr;
    } else {
        ty = c.chance(0.3) ? CellTy::Bool : CellTy::Int;
    }
    ExprPtr e;
    switch (ty) {
        case CellTy::Addr:
            e = Expr::constant(Value::address(Address{static_cast<std::uint8_t>(c.pick(kMemCells))}));
            break;
        case CellTy::Bool: e = gen_bool_expr(c, 2); break;
        case CellTy::Int: e = gen_int_expr(c, 2); break;
    }
    c.known[a.index] = ty;
    return StmtL::assign(a, std::move(e));
}

void gen_block(GenCtx& c, std::size_t depth, std::size_t max_len, Program& out);

StmtLPtr gen_stmt(GenCtx& c, std::size_t depth) {
    std::uint64_t r = c.pick(100);
    if (depth > 0 && r < 15) {
        auto cond = gen_bool_expr(c, 2);
        Program t, f;
        auto saved = c.known;
        gen_block(c, depth - 1, 3, t);
        c.known = saved;
        gen_block(c, depth - 1, 3, f);
        c.known = saved;
        if (!c.in_loop) {
            // A branch may or may not run, so any cell it writes loses its known type.
            // Inside a loop the branch writes were generated type preserving already.
            std::set<std::uint8_t> touched;
            collect_writes(t, c.funtab, touched);
            collect_writes(f, c.funtab, touched);
            for (auto a : touched) c.known.erase(a);
        }
        return StmtL::ifelse(cond, std::move(t), std::move(f));
    }
    if (depth > 0 && r < 25) {
        // Counter loop that terminates by construction: c := 0; while (c < K) { ...; c := c + 1 }.
        std::int64_t bound = 1 + static_cast<std::int64_t>(c.pick(3));
        Program body;
        bool outer = c.in_loop;
        c.in_loop = true;
        gen_block(c, depth - 1, 2, body);
        c.in_loop = outer;
        // The counter cell must sit outside the body's write set (so the bound holds)
        // and hold an int on every path (body reads of it stay well typed).
        std::set<std::uint8_t> written;
        collect_writes(body, c.funtab, written);
        std::uint8_t idx = static_cast<std::uint8_t>(c.pick(kMemCells));
        bool found = false;
        for (std::size_t probe = 0; probe < kMemCells; ++probe) {
            auto it = c.known.find(idx);
            if (!written.count(idx) && (it == c.known.end() || it->second == CellTy::Int)) {
                found = true;
                break;
            }
            idx = static_cast<std::uint8_t>((idx + 1) % kMemCells);
        }
        if (!found) return gen_assign(c);
        Address counter{idx};
        c.known[counter.index] = CellTy::Int;
        body.push_back(StmtL::assign(
            counter, Expr::bin(BinOp::Add, Expr::var(counter), Expr::constant(Value::integer(1)))));
        auto loop = StmtL::loop(
            Expr::bin(BinOp::Lt, Expr::var(counter), Expr::constant(Value::integer(bound))),
            std::move(body));
        return loop;  // caller emits the counter init first
    }
    if (!c.in_loop && !c.funs.empty() && r < 33) {
        auto f = c.funs[c.pick(c.funs.size())];
        auto s = StmtL::call(f);
        // The callee body was generated against its own cell state, so its writes
        // invalidate whatever types this scope had for those cells.
        if (c.funtab) {
            auto it = c.funtab->find(f);
            if (it != c.funtab->end()) {
                std::set<std::uint8_t> touched;
                collect_writes(it->second, c.funtab, touched);
                for (auto a : touched) c.known.erase(a);
            }
        }
        return s;
    }
    if (r < 38) return StmtL::throw_();
    return gen_assign(c);
}

void gen_block(GenCtx& c, std::size_t depth, std::size_t max_len, Program& out) {
    std::size_t len = c.pick(max_len + 1);
    for (std::size_t i = 0; i < len && c.stmts_left > 0; ++i) {
        --c.stmts_left;
        auto s = gen_stmt(c, depth);
        if (s->kind == StmtL::Kind::While) {
            // locate the counter from the condition and pre-initialize it
            Address counter = s->expr->lhs->addr;
            out.push_back(StmtL::assign(counter, Expr::constant(Value::integer(0))));
        }
        out.push_back(s);
    }
}

Program straight_line(std::size_t n) {
    Program out;
    for (std::size_t i = 0; i < n; ++i) {
        Address a{static_cast<std::uint8_t>(i % kMemCells)};
        out.push_back(StmtL::assign(a, Expr::constant(Value::integer(static_cast<std::int64_t>(i) + 1))));
    }
    return out;
}

} // namespace

GenProgram gen_program(std::uint64_t seed, const GenShape& shape) {
    switch (shape.kind) {
        case GenShape::Kind::StraightLine: return {straight_line(shape.n), false};
        case GenShape::Kind::AbstractTail: return {straight_line(shape.n), true};
        case GenShape::Kind::Random: {
            GenCtx c;
            c.rng.seed(seed);
            c.stmts_left = shape.max_len * 4;
            Program out;
            gen_block(c, shape.depth, shape.max_len, out);
            return {std::move(out), false};
        }
    }
    return {};
}

Program gen_checked_program(std::uint64_t seed, std::size_t max_stmts, std::size_t max_depth,
                            const FunTable& funtab) {
    GenCtx c;
    c.rng.seed(seed);
    c.funtab = &funtab;
    for (auto& [name, _] : funtab) c.funs.push_back(name);
    c.stmts_left = max_stmts;
    Program out;
    while (c.stmts_left > 0) {
        std::size_t take = 1 + c.pick(3);
        gen_block(c, max_depth, take, out);
        if (c.chance(0.15)) break;
    }
    return out;
}

FunTable gen_funtable(std::uint64_t seed, std::size_t count) {
    GenCtx c;
    c.rng.seed(seed ^ 0x9e3779b97f4a7c15ULL);
    FunTable tab;
    for (std::size_t i = 0; i < count; ++i) {
        Program body;
        c.known.clear();  // a body's reads must be backed by its own writes
        std::size_t len = 1 + c.pick(3);
        for (std::size_t j = 0; j < len; ++j) body.push_back(gen_assign(c));
        tab["f" + std::to_string(i)] = std::move(body);
    }
    return tab;
}

} // namespace cbnlab
