#include "cbnlab/encode.hpp"

#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace cbnlab {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::Naive: return "naive";
        case Variant::S1: return "s1";
        case Variant::S1S2: return "s1s2";
        case Variant::Full: return "full";
    }
    return "?";
}

std::optional<Variant> parse_variant(std::string_view s) {
    if (s == "naive") return Variant::Naive;
    if (s == "s1") return Variant::S1;
    if (s == "s1s2") return Variant::S1S2;
    if (s == "full") return Variant::Full;
    return std::nullopt;
}

namespace {

TermPtr V(const std::string& s) { return mkVar(s); }

TermPtr CT(std::string tag, std::vector<TermPtr> args = {}) {
    return mkCtor(std::move(tag), std::move(args));
}

TermPtr ap(TermPtr f, std::vector<TermPtr> args) { return mkApps(std::move(f), args); }

MatchBranch br(std::string tag, std::vector<std::string> binders, TermPtr body) {
    return MatchBranch{std::move(tag), std::move(binders), std::move(body)};
}

TermPtr match(TermPtr scrut, std::vector<MatchBranch> branches, TermPtr fallback = nullptr) {
    return mkMatch(std::move(scrut), std::move(branches), std::move(fallback));
}

TermPtr lams(const std::vector<std::string>& ps, TermPtr body) {
    for (std::size_t i = ps.size(); i-- > 0;) body = mkLam(ps[i], std::move(body));
    return body;
}

TermPtr B0() { return CT("b0"); }
TermPtr B1() { return CT("b1"); }
TermPtr BNIL() { return CT("bnil"); }
TermPtr bcons(TermPtr b, TermPtr r) { return CT("bcons", {std::move(b), std::move(r)}); }
TermPtr VNONE() { return CT("v_none"); }
TermPtr vsome(TermPtr v) { return CT("v_some", {std::move(v)}); }
TermPtr ONONE() { return CT("o_none"); }
TermPtr osome(TermPtr m) { return CT("o_some", {std::move(m)}); }
TermPtr ENV0() { return CT("envc", {CT("sc0"), CT("s", {CT("z")})}); }
TermPtr FENV0() { return CT("fenvc", {CT("sc0"), CT("s", {CT("z")})}); }
TermPtr NIL() { return CT("nil"); }
TermPtr lcons(TermPtr h, TermPtr t) { return CT("cons", {std::move(h), std::move(t)}); }

TermPtr bias_bits() {
    TermPtr acc = BNIL();
    acc = bcons(B1(), acc);
    for (int i = 0; i < kIntBits - 1; ++i) acc = bcons(B0(), acc);
    return acc;
}

std::vector<std::string> mem_binders() {
    std::vector<std::string> out;
    out.reserve(kMemCells + 1);
    for (int i = 0; i < kMemCells; ++i) out.push_back("mc" + std::to_string(i));
    out.push_back("mfl");
    return out;
}

std::vector<TermPtr> mem_binder_vars(const TermPtr& flag_override = nullptr) {
    std::vector<TermPtr> out;
    out.reserve(kMemCells + 1);
    for (int i = 0; i < kMemCells; ++i) out.push_back(V("mc" + std::to_string(i)));
    out.push_back(flag_override ? flag_override : V("mfl"));
    return out;
}

} // namespace

TermPtr encode_bit(bool b) { return b ? B1() : B0(); }

TermPtr encode_bits(std::int64_t x) {
    std::uint64_t u = static_cast<std::uint64_t>(x) & 0xFFFu;
    TermPtr acc = BNIL();
    for (int i = kIntBits - 1; i >= 0; --i) acc = bcons(encode_bit((u >> i) & 1u), acc);
    return acc;
}

TermPtr encode_word(std::int64_t x) { return CT("w", {encode_bits(x)}); }

std::optional<std::int64_t> decode_word(const TermPtr& t) {
    if (t->kind != TermKind::Ctor || t->tag != "w" || t->ctor_args.size() != 1) return std::nullopt;
    const Term* cur = t->ctor_args[0].get();
    std::uint64_t u = 0;
    for (int i = 0; i < kIntBits; ++i) {
        if (cur->kind != TermKind::Ctor || cur->tag != "bcons" || cur->ctor_args.size() != 2)
            return std::nullopt;
        const Term* bit = cur->ctor_args[0].get();
        if (bit->kind != TermKind::Ctor || !bit->ctor_args.empty()) return std::nullopt;
        if (bit->tag == "b1") u |= (1ull << i);
        else if (bit->tag != "b0") return std::nullopt;
        cur = cur->ctor_args[1].get();
    }
    if (cur->kind != TermKind::Ctor || cur->tag != "bnil" || !cur->ctor_args.empty())
        return std::nullopt;
    if (u & 0x800u) return static_cast<std::int64_t>(u) - 4096;
    return static_cast<std::int64_t>(u);
}

TermPtr encode_value(const Value& v) {
    if (v.is_bool()) return CT("vbool", {encode_bit(v.as_bool())});
    if (v.is_int()) return CT("vint", {encode_word(wrap_int(v.as_int()))});
    if (v.is_addr()) return CT("vaddr", {encode_word(v.as_addr().index)});
    return CT("vunit");
}

std::optional<Value> decode_value(const TermPtr& t) {
    if (t->kind != TermKind::Ctor) return std::nullopt;
    if (t->tag == "vunit" && t->ctor_args.empty()) return Value::unit();
    if (t->ctor_args.size() != 1) return std::nullopt;
    if (t->tag == "vbool") {
        const Term* b = t->ctor_args[0].get();
        if (b->kind != TermKind::Ctor || !b->ctor_args.empty()) return std::nullopt;
        if (b->tag == "b0") return Value::boolean(false);
        if (b->tag == "b1") return Value::boolean(true);
        return std::nullopt;
    }
    if (t->tag == "vint") {
        auto w = decode_word(t->ctor_args[0]);
        if (!w) return std::nullopt;
        return Value::integer(*w);
    }
    if (t->tag == "vaddr") {
        auto w = decode_word(t->ctor_args[0]);
        if (!w) return std::nullopt;
        auto a = Address::make(*w);
        if (!a) return std::nullopt;
        return Value::address(*a);
    }
    return std::nullopt;
}

TermPtr encode_cell(const std::optional<Value>& c) {
    if (!c) return CT("c_none", {B0(), encode_word(0)});
    if (c->is_bool()) return CT("c_bool", {encode_bit(c->as_bool()), encode_word(0)});
    if (c->is_int()) return CT("c_int", {B0(), encode_word(wrap_int(c->as_int()))});
    if (c->is_addr()) return CT("c_addr", {B0(), encode_word(c->as_addr().index)});
    return CT("c_unit", {B0(), encode_word(0)});
}

namespace {

std::optional<std::optional<Value>> decode_cell(const TermPtr& t) {
    if (t->kind != TermKind::Ctor || t->ctor_args.size() != 2) return std::nullopt;
    const TermPtr& bit = t->ctor_args[0];
    if (bit->kind != TermKind::Ctor || !bit->ctor_args.empty() ||
        (bit->tag != "b0" && bit->tag != "b1"))
        return std::nullopt;
    auto w = decode_word(t->ctor_args[1]);
    if (!w) return std::nullopt;
    if (t->tag == "c_none") return std::optional<Value>{};
    if (t->tag == "c_bool") return std::optional<Value>{Value::boolean(bit->tag == "b1")};
    if (t->tag == "c_int") return std::optional<Value>{Value::integer(*w)};
    if (t->tag == "c_addr") {
        auto a = Address::make(*w);
        if (!a) return std::nullopt;
        return std::optional<Value>{Value::address(*a)};
    }
    if (t->tag == "c_unit") return std::optional<Value>{Value::unit()};
    return std::nullopt;
}

} // namespace

TermPtr encode_memory(const MemoryState& m) {
    std::vector<TermPtr> args;
    args.reserve(kMemCells + 1);
    for (int i = 0; i < kMemCells; ++i) args.push_back(encode_cell(m.cells[static_cast<std::size_t>(i)]));
    args.push_back(encode_bit(m.throw_flag));
    return CT("mem", std::move(args));
}

std::optional<MemoryState> decode_memory(const TermPtr& t) {
    if (t->kind != TermKind::Ctor || t->tag != "mem" ||
        t->ctor_args.size() != static_cast<std::size_t>(kMemCells) + 1)
        return std::nullopt;
    MemoryState m = init_memory();
    for (int i = 0; i < kMemCells; ++i) {
        auto c = decode_cell(t->ctor_args[static_cast<std::size_t>(i)]);
        if (!c) return std::nullopt;
        m.cells[static_cast<std::size_t>(i)] = *c;
    }
    const TermPtr& fl = t->ctor_args[static_cast<std::size_t>(kMemCells)];
    if (fl->kind != TermKind::Ctor || !fl->ctor_args.empty()) return std::nullopt;
    if (fl->tag == "b1") m.throw_flag = true;
    else if (fl->tag != "b0") return std::nullopt;
    return m;
}

std::optional<std::optional<MemoryState>> decode_memory_option(const TermPtr& t) {
    if (t->kind != TermKind::Ctor) return std::nullopt;
    if (t->tag == "o_none" && t->ctor_args.empty()) return std::optional<MemoryState>{};
    if (t->tag == "o_some" && t->ctor_args.size() == 1) {
        auto m = decode_memory(t->ctor_args[0]);
        if (!m) return std::nullopt;
        return std::optional<MemoryState>{*m};
    }
    return std::nullopt;
}

TermPtr encode_peano(std::uint64_t n) {
    TermPtr acc = CT("z");
    for (std::uint64_t i = 0; i < n; ++i) acc = CT("s", {acc});
    return acc;
}

TermPtr encode_address(Address a) { return CT("ad" + std::to_string(a.index)); }

TermPtr encode_expr(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::Const: return CT("e_const", {encode_value(e->value)});
        case Expr::Kind::Var: return CT("e_var", {encode_address(e->addr)});
        case Expr::Kind::Not: return CT("e_not", {encode_expr(e->lhs)});
        case Expr::Kind::Bin: {
            const char* tag = nullptr;
            switch (e->op) {
                case BinOp::Add: tag = "e_add"; break;
                case BinOp::Sub: tag = "e_sub"; break;
                case BinOp::Lt: tag = "e_lt"; break;
                case BinOp::Eq: tag = "e_eq"; break;
                case BinOp::And: tag = "e_and"; break;
                case BinOp::Or: tag = "e_or"; break;
            }
            return CT(tag, {encode_expr(e->lhs), encode_expr(e->rhs)});
        }
    }
    return CT("e_const", {CT("vunit")});
}

TermPtr encode_stmt_list(const StmtLPtr& s) {
    switch (s->kind) {
        case StmtL::Kind::Assign:
            return CT("st_assign", {encode_address(s->addr), encode_expr(s->expr)});
        case StmtL::Kind::If:
            return CT("st_if", {encode_expr(s->expr), encode_program_list(s->then_block),
                                encode_program_list(s->else_block)});
        case StmtL::Kind::While:
            return CT("st_while", {encode_expr(s->expr), encode_program_list(s->body)});
        case StmtL::Kind::Call: return CT("st_call", {CT("fn_" + s->fun)});
        case StmtL::Kind::Throw: return CT("st_throw");
    }
    return CT("st_throw");
}

TermPtr encode_program_list(const Program& p, bool free_tail, const std::string& tail_name) {
    TermPtr acc = free_tail ? V(tail_name) : NIL();
    for (std::size_t i = p.size(); i-- > 0;) acc = lcons(encode_stmt_list(p[i]), acc);
    return acc;
}

namespace {

TermPtr encode_chain(const Program& p, bool free_tail, const std::string& tail_name);

TermPtr encode_stmtl_as_nested(const StmtLPtr& s) {
    switch (s->kind) {
        case StmtL::Kind::Assign:
            return CT("sn_assign", {encode_address(s->addr), encode_expr(s->expr)});
        case StmtL::Kind::If:
            return CT("sn_if", {encode_expr(s->expr), encode_chain(s->then_block, false, ""),
                                encode_chain(s->else_block, false, "")});
        case StmtL::Kind::While:
            return CT("sn_while", {encode_expr(s->expr), encode_chain(s->body, false, "")});
        case StmtL::Kind::Call: return CT("sn_call", {CT("fn_" + s->fun)});
        case StmtL::Kind::Throw: return CT("sn_throw");
    }
    return CT("sn_throw");
}

TermPtr encode_chain(const Program& p, bool free_tail, const std::string& tail_name) {
    TermPtr acc = free_tail ? V(tail_name) : CT("sn_snil");
    for (std::size_t i = p.size(); i-- > 0;)
        acc = CT("sn_seq", {encode_stmtl_as_nested(p[i]), acc});
    return acc;
}

} // namespace

TermPtr encode_stmt_nested(const StmtNPtr& s) {
    switch (s->kind) {
        case StmtN::Kind::Assign:
            return CT("sn_assign", {encode_address(s->addr), encode_expr(s->expr)});
        case StmtN::Kind::If:
            return CT("sn_if", {encode_expr(s->expr), encode_stmt_nested(s->a),
                                encode_stmt_nested(s->b)});
        case StmtN::Kind::While:
            return CT("sn_while", {encode_expr(s->expr), encode_stmt_nested(s->a)});
        case StmtN::Kind::Call: return CT("sn_call", {CT("fn_" + s->fun)});
        case StmtN::Kind::Throw: return CT("sn_throw");
        case StmtN::Kind::Snil: return CT("sn_snil");
        case StmtN::Kind::Seq:
            return CT("sn_seq", {encode_stmt_nested(s->a), encode_stmt_nested(s->b)});
    }
    return CT("sn_snil");
}

TermPtr encode_program_nested(const Program& p, bool free_tail, const std::string& tail_name) {
    return encode_chain(p, free_tail, tail_name);
}

TermPtr encode_program(const Program& p, Variant v, bool free_tail) {
    if (v == Variant::Naive) return encode_program_nested(p, free_tail);
    return encode_program_list(p, free_tail);
}

namespace {

struct Builder {
    Variant variant;
    std::string ns;
    const FunTable& funtab;
    DefEnv defs;

    std::string nm(const char* s) const { return ns + "." + s; }
    std::string nm(const std::string& s) const { return ns + "." + s; }
    TermPtr R(const char* s) const { return mkConst(nm(s)); }
    TermPtr R(const std::string& s) const { return mkConst(nm(s)); }
    void def(const std::string& s, TermPtr body) { defs.define(nm(s), std::move(body)); }
    void deffix(const std::string& s, std::vector<std::string> params, std::size_t si,
                TermPtr body) {
        defs.define(nm(s), mkFix(nm(s), std::move(params), si, std::move(body)));
    }

    TermPtr ev_app(TermPtr k, TermPtr e, TermPtr m) const {
        return ap(R("ev"), {std::move(k), std::move(e), std::move(m)});
    }

    // ---- arithmetic over bit lists ----

    void define_arith() {
        auto rec3 = [&](TermPtr c) {
            return bcons(std::move(c), ap(R("w_add"), {V("rx"), V("ry"), V("ci")}));
        };
        (void)rec3;
        auto add_rec = [&](TermPtr sum, TermPtr carry) {
            return bcons(std::move(sum), ap(R("w_add"), {V("rx"), V("ry"), std::move(carry)}));
        };
        TermPtr mixed = match(V("ci"), {br("b0", {}, add_rec(B1(), B0())),
                                        br("b1", {}, add_rec(B0(), B1()))});
        TermPtr add_body = match(
            V("x"),
            {br("bnil", {}, BNIL()),
             br("bcons", {"bx", "rx"},
                match(V("y"),
                      {br("bnil", {}, BNIL()),
                       br("bcons", {"by", "ry"},
                          match(V("bx"),
                                {br("b0", {},
                                    match(V("by"), {br("b0", {}, add_rec(V("ci"), B0())),
                                                    br("b1", {}, mixed)})),
                                 br("b1", {},
                                    match(V("by"), {br("b0", {}, mixed),
                                                    br("b1", {}, add_rec(V("ci"), B1()))}))}))}))});
        deffix("w_add", {"x", "y", "ci"}, 0, add_body);

        TermPtr bnot_body = match(
            V("x"), {br("bnil", {}, BNIL()),
                     br("bcons", {"bx", "rx"},
                        match(V("bx"), {br("b0", {}, bcons(B1(), ap(R("w_bnot"), {V("rx")}))),
                                        br("b1", {}, bcons(B0(), ap(R("w_bnot"), {V("rx")})))}))});
        deffix("w_bnot", {"x"}, 0, bnot_body);

        auto ult_rec = [&](TermPtr acc) {
            return ap(R("w_ult"), {V("rx"), V("ry"), std::move(acc)});
        };
        TermPtr ult_body = match(
            V("x"),
            {br("bnil", {}, V("acc")),
             br("bcons", {"bx", "rx"},
                match(V("y"),
                      {br("bnil", {}, V("acc")),
                       br("bcons", {"by", "ry"},
                          match(V("bx"),
                                {br("b0", {}, match(V("by"), {br("b0", {}, ult_rec(V("acc"))),
                                                              br("b1", {}, ult_rec(B1()))})),
                                 br("b1", {}, match(V("by"), {br("b0", {}, ult_rec(B0())),
                                                              br("b1", {}, ult_rec(V("acc")))}))}))}))});
        deffix("w_ult", {"x", "y", "acc"}, 0, ult_body);

        TermPtr eq_body = match(
            V("x"),
            {br("bnil", {}, B1()),
             br("bcons", {"bx", "rx"},
                match(V("y"),
                      {br("bnil", {}, B0()),
                       br("bcons", {"by", "ry"},
                          match(V("bx"),
                                {br("b0", {}, match(V("by"), {br("b0", {}, ap(R("w_eq"), {V("rx"), V("ry")})),
                                                              br("b1", {}, B0())})),
                                 br("b1", {}, match(V("by"), {br("b0", {}, B0()),
                                                              br("b1", {}, ap(R("w_eq"), {V("rx"), V("ry")}))}))}))}))});
        deffix("w_eq", {"x", "y"}, 0, eq_body);
    }

    // ---- memory helpers ----

    void define_mem_helpers(bool with_write, bool with_flag_helpers) {
        std::vector<std::string> r2params{"ad"};
        std::vector<TermPtr> r2args{V("ad")};
        for (int i = 0; i < kMemCells; ++i) {
            r2params.push_back("d" + std::to_string(i));
        }
        std::vector<MatchBranch> read_brs;
        for (int i = 0; i < kMemCells; ++i)
            read_brs.push_back(br("ad" + std::to_string(i), {}, V("d" + std::to_string(i))));
        deffix("read2", r2params, 0, match(V("ad"), std::move(read_brs)));

        std::vector<TermPtr> read_call{V("ad")};
        for (int i = 0; i < kMemCells; ++i) read_call.push_back(V("mc" + std::to_string(i)));
        deffix("read", {"m", "ad"}, 0,
               match(V("m"), {br("mem", mem_binders(), ap(R("read2"), read_call))}));

        deffix("cell2val", {"cl"}, 0,
               match(V("cl"), {br("c_none", {"pb", "pw"}, VNONE()),
                               br("c_bool", {"pb", "pw"}, vsome(CT("vbool", {V("pb")}))),
                               br("c_int", {"pb", "pw"}, vsome(CT("vint", {V("pw")}))),
                               br("c_addr", {"pb", "pw"}, vsome(CT("vaddr", {V("pw")}))),
                               br("c_unit", {"pb", "pw"}, vsome(CT("vunit")))}));

        if (with_write) {
            std::vector<std::string> w2params{"ad", "cl"};
            for (int i = 0; i < kMemCells; ++i) w2params.push_back("d" + std::to_string(i));
            w2params.push_back("fl");
            std::vector<MatchBranch> write_brs;
            for (int i = 0; i < kMemCells; ++i) {
                std::vector<TermPtr> cells;
                for (int j = 0; j < kMemCells; ++j)
                    cells.push_back(i == j ? V("cl") : V("d" + std::to_string(j)));
                cells.push_back(V("fl"));
                write_brs.push_back(br("ad" + std::to_string(i), {},
                                       osome(CT("mem", std::move(cells)))));
            }
            deffix("write2", w2params, 0, match(V("ad"), std::move(write_brs)));

            std::vector<TermPtr> write_call{V("ad"), V("cl")};
            for (int i = 0; i < kMemCells; ++i) write_call.push_back(V("mc" + std::to_string(i)));
            write_call.push_back(V("mfl"));
            deffix("write", {"m", "ad", "cl"}, 0,
                   match(V("m"), {br("mem", mem_binders(), ap(R("write2"), write_call))}));
        }
        if (with_flag_helpers) {
            deffix("getflag", {"m"}, 0, match(V("m"), {br("mem", mem_binders(), V("mfl"))}));
            deffix("setflag", {"m"}, 0,
                   match(V("m"), {br("mem", mem_binders(), CT("mem", mem_binder_vars(B1())))}));
        }
    }

    // ---- expression evaluation, inline style (naive and s1) ----

    // builds the 9-way expression match; each branch produces an option-value
    // and is wrapped by `wrap` so the consumer is copied into every branch
    TermPtr inline_expr(const TermPtr& e, const TermPtr& k, const TermPtr& m,
                        const std::function<TermPtr(const TermPtr&)>& read_cell,
                        const std::function<TermPtr(TermPtr)>& wrap) {
        auto evd = [&](const TermPtr& sub) { return ev_app(k, sub, m); };
        auto int_binop = [&](const char* lx, const char* rx,
                             const std::function<TermPtr(TermPtr, TermPtr)>& fin) {
            return wrap(match(
                evd(V(lx)),
                {br("v_none", {}, VNONE()),
                 br("v_some", {"lv"},
                    match(evd(V(rx)),
                          {br("v_none", {}, VNONE()),
                           br("v_some", {"rv"},
                              match(V("lv"),
                                    {br("vint", {"wx"},
                                        match(V("rv"),
                                              {br("vint", {"wy"},
                                                  match(V("wx"),
                                                        {br("w", {"bxs"},
                                                            match(V("wy"),
                                                                  {br("w", {"bys"},
                                                                      fin(V("bxs"), V("bys")))}))}))},
                                              VNONE()))},
                                    VNONE()))}))}));
        };
        auto bool_binop = [&](const char* lx, const char* rx, bool is_and) {
            TermPtr inner =
                is_and ? match(V("pb"), {br("b0", {}, vsome(CT("vbool", {B0()}))),
                                         br("b1", {}, vsome(CT("vbool", {V("qb")})))})
                       : match(V("pb"), {br("b1", {}, vsome(CT("vbool", {B1()}))),
                                         br("b0", {}, vsome(CT("vbool", {V("qb")})))});
            return wrap(match(
                evd(V(lx)),
                {br("v_none", {}, VNONE()),
                 br("v_some", {"lv"},
                    match(evd(V(rx)),
                          {br("v_none", {}, VNONE()),
                           br("v_some", {"rv"},
                              match(V("lv"),
                                    {br("vbool", {"pb"},
                                        match(V("rv"), {br("vbool", {"qb"}, inner)}, VNONE()))},
                                    VNONE()))}))}));
        };
        auto fin_add = [&](TermPtr bx, TermPtr by) {
            return vsome(CT("vint", {CT("w", {ap(R("w_add"), {std::move(bx), std::move(by), B0()})})}));
        };
        auto fin_sub = [&](TermPtr bx, TermPtr by) {
            return vsome(CT("vint", {CT("w", {ap(R("w_add"),
                                                 {std::move(bx), ap(R("w_bnot"), {std::move(by)}), B1()})})}));
        };
        auto fin_lt = [&](TermPtr bx, TermPtr by) {
            return vsome(CT("vbool", {ap(R("w_ult"), {ap(R("w_add"), {std::move(bx), bias_bits(), B0()}),
                                                      ap(R("w_add"), {std::move(by), bias_bits(), B0()}),
                                                      B0()})}));
        };
        auto fin_eq = [&](TermPtr bx, TermPtr by) {
            return vsome(CT("vbool", {ap(R("w_eq"), {std::move(bx), std::move(by)})}));
        };

        TermPtr not_body = wrap(match(
            evd(V("ne")),
            {br("v_none", {}, VNONE()),
             br("v_some", {"nv"},
                match(V("nv"),
                      {br("vbool", {"nb"},
                          match(V("nb"), {br("b0", {}, vsome(CT("vbool", {B1()}))),
                                          br("b1", {}, vsome(CT("vbool", {B0()})))}))},
                      VNONE()))}));

        return match(e, {br("e_const", {"cv"}, wrap(vsome(V("cv")))),
                         br("e_var", {"va"}, wrap(ap(R("cell2val"), {read_cell(V("va"))}))),
                         br("e_not", {"ne"}, not_body),
                         br("e_add", {"lx", "rx"}, int_binop("lx", "rx", fin_add)),
                         br("e_sub", {"lx", "rx"}, int_binop("lx", "rx", fin_sub)),
                         br("e_lt", {"lx", "rx"}, int_binop("lx", "rx", fin_lt)),
                         br("e_eq", {"lx", "rx"}, int_binop("lx", "rx", fin_eq)),
                         br("e_and", {"lx", "rx"}, bool_binop("lx", "rx", true)),
                         br("e_or", {"lx", "rx"}, bool_binop("lx", "rx", false))});
    }

    void define_ev_inline() {
        auto read_helper = [&](const TermPtr& ad) { return ap(R("read"), {V("m"), ad}); };
        auto id = [](TermPtr t) { return t; };
        TermPtr body = match(V("k"), {br("z", {}, VNONE()),
                                      br("s", {"k1"},
                                         inline_expr(V("e"), V("k1"), V("m"), read_helper, id))});
        deffix("ev", {"k", "e", "m"}, 0, body);
    }

    // ---- expression evaluation, factored style (s1s2 and full) ----

    void define_binop_ladder(const std::string& op, bool int_args,
                             const std::function<TermPtr(TermPtr, TermPtr)>& fin) {
        std::string n1 = "ev_" + op, n2 = n1 + "2", n3 = n1 + "3", n4 = n1 + "4", n5 = n1 + "5",
                    n6 = n1 + "6";
        deffix(n1, {"lo", "ro"}, 0,
               match(V("lo"), {br("v_none", {}, VNONE()),
                               br("v_some", {"lv"}, ap(R(n2), {V("ro"), V("lv")}))}));
        if (int_args) {
            deffix(n2, {"ro", "lv"}, 0,
                   match(V("ro"), {br("v_none", {}, VNONE()),
                                   br("v_some", {"rv"}, ap(R(n3), {V("lv"), V("rv")}))}));
            deffix(n3, {"lv", "rv"}, 0,
                   match(V("lv"), {br("vint", {"wx"}, ap(R(n4), {V("rv"), V("wx")}))}, VNONE()));
            deffix(n4, {"rv", "wx"}, 0,
                   match(V("rv"), {br("vint", {"wy"}, ap(R(n5), {V("wx"), V("wy")}))}, VNONE()));
            deffix(n5, {"wx", "wy"}, 0,
                   match(V("wx"), {br("w", {"bxs"}, ap(R(n6), {V("wy"), V("bxs")}))}));
            deffix(n6, {"wy", "bxs"}, 0,
                   match(V("wy"), {br("w", {"bys"}, fin(V("bxs"), V("bys")))}));
        } else {
            bool is_and = op == "and";
            deffix(n2, {"ro", "lv"}, 0,
                   match(V("ro"), {br("v_none", {}, VNONE()),
                                   br("v_some", {"rv"}, ap(R(n3), {V("lv"), V("rv")}))}));
            deffix(n3, {"lv", "rv"}, 0,
                   match(V("lv"), {br("vbool", {"pb"}, ap(R(n4), {V("rv"), V("pb")}))}, VNONE()));
            deffix(n4, {"rv", "pb"}, 0,
                   match(V("rv"), {br("vbool", {"qb"}, ap(R(n5), {V("pb"), V("qb")}))}, VNONE()));
            TermPtr sel = is_and ? match(V("pb"), {br("b0", {}, vsome(CT("vbool", {B0()}))),
                                                   br("b1", {}, vsome(CT("vbool", {V("qb")})))})
                                 : match(V("pb"), {br("b1", {}, vsome(CT("vbool", {B1()}))),
                                                   br("b0", {}, vsome(CT("vbool", {V("qb")})))});
            deffix(n5, {"pb", "qb"}, 0, sel);
        }
    }

    void define_ev_factored(bool guard_on_expr) {
        auto fin_add = [&](TermPtr bx, TermPtr by) {
            return vsome(CT("vint", {CT("w", {ap(R("w_add"), {std::move(bx), std::move(by), B0()})})}));
        };
        auto fin_sub = [&](TermPtr bx, TermPtr by) {
            return vsome(CT("vint", {CT("w", {ap(R("w_add"),
                                                 {std::move(bx), ap(R("w_bnot"), {std::move(by)}), B1()})})}));
        };
        auto fin_lt = [&](TermPtr bx, TermPtr by) {
            return vsome(CT("vbool", {ap(R("w_ult"), {ap(R("w_add"), {std::move(bx), bias_bits(), B0()}),
                                                      ap(R("w_add"), {std::move(by), bias_bits(), B0()}),
                                                      B0()})}));
        };
        auto fin_eq = [&](TermPtr bx, TermPtr by) {
            return vsome(CT("vbool", {ap(R("w_eq"), {std::move(bx), std::move(by)})}));
        };
        define_binop_ladder("add", true, fin_add);
        define_binop_ladder("sub", true, fin_sub);
        define_binop_ladder("lt", true, fin_lt);
        define_binop_ladder("eq", true, fin_eq);
        define_binop_ladder("and", false, {});
        define_binop_ladder("or", false, {});

        deffix("ev_not", {"vo"}, 0,
               match(V("vo"), {br("v_none", {}, VNONE()),
                               br("v_some", {"nv"}, ap(R("ev_not2"), {V("nv")}))}));
        deffix("ev_not2", {"nv"}, 0,
               match(V("nv"), {br("vbool", {"nb"}, ap(R("ev_not3"), {V("nb")}))}, VNONE()));
        deffix("ev_not3", {"nb"}, 0,
               match(V("nb"), {br("b0", {}, vsome(CT("vbool", {B1()}))),
                               br("b1", {}, vsome(CT("vbool", {B0()})))}));

        auto sub_ev = [&](const char* x) { return ev_app(V("k1"), V(x), V("m")); };
        auto binop_branch = [&](const char* tag, const char* op) {
            return br(tag, {"lx", "rx"},
                      ap(R(std::string("ev_") + op), {sub_ev("lx"), sub_ev("rx")}));
        };
        TermPtr step_body = match(
            V("e"), {br("e_const", {"cv"}, vsome(V("cv"))),
                     br("e_var", {"va"},
                        ap(R("cell2val"), {ap(R("read"), {V("m"), V("va")})})),
                     br("e_not", {"ne"}, ap(R("ev_not"), {sub_ev("ne")})),
                     binop_branch("e_add", "add"), binop_branch("e_sub", "sub"),
                     binop_branch("e_lt", "lt"), binop_branch("e_eq", "eq"),
                     binop_branch("e_and", "and"), binop_branch("e_or", "or")});
        def("ev_step", lams({"k1", "e", "m"}, step_body));
        TermPtr ev_body = match(V("k"), {br("z", {}, VNONE()),
                                         br("s", {"k1"}, ap(R("ev_step"), {V("k1"), V("e"), V("m")}))});
        deffix("ev", {"k", "e", "m"}, guard_on_expr ? 1 : 0, ev_body);
    }

    // ---- statement work, inline style (naive and s1) ----

    TermPtr with_mem(TermPtr om, TermPtr work) {
        return match(std::move(om),
                     {br("o_none", {}, ONONE()),
                      br("o_some", {"m"},
                         match(V("m"), {br("mem", mem_binders(),
                                           match(V("mfl"), {br("b1", {}, osome(V("m"))),
                                                            br("b0", {}, std::move(work))}))}))});
    }

    TermPtr read_table(const TermPtr& ad) {
        std::vector<MatchBranch> brs;
        for (int i = 0; i < kMemCells; ++i)
            brs.push_back(br("ad" + std::to_string(i), {}, V("mc" + std::to_string(i))));
        return match(ad, std::move(brs));
    }

    TermPtr interp_app_nested(TermPtr k, TermPtr om, TermPtr st) {
        return ap(R("interp"), {std::move(k), std::move(om), V("envp"), V("fenvp"), std::move(st)});
    }

    // takes the value bound as vv apart and stores it as a freshly built cell,
    // so the updated memory carries no pending conversion
    TermPtr store_value(const TermPtr& m, const TermPtr& ad) {
        auto wr = [&](TermPtr cell) { return ap(R("write"), {m, ad, std::move(cell)}); };
        return match(V("vv"),
                     {br("vbool", {"pb"}, wr(CT("c_bool", {V("pb"), encode_word(0)}))),
                      br("vint", {"pw"}, wr(CT("c_int", {B0(), V("pw")}))),
                      br("vaddr", {"pw"}, wr(CT("c_addr", {B0(), V("pw")}))),
                      br("vunit", {}, wr(CT("c_unit", {B0(), encode_word(0)})))});
    }

    TermPtr assign_work_inline() {
        auto read_cell = [&](const TermPtr& ad) { return read_table(ad); };
        auto wrapK = [&](TermPtr vo) {
            return match(std::move(vo),
                         {br("v_none", {}, ONONE()),
                          br("v_some", {"vv"}, store_value(V("m"), V("sa")))});
        };
        return inline_expr(V("se"), V("k1"), V("m"), read_cell, wrapK);
    }

    TermPtr cond_then_else(const char* cond_var, TermPtr on_true, TermPtr on_false) {
        auto read_cell = [&](const TermPtr& ad) { return read_table(ad); };
        auto id = [](TermPtr t) { return t; };
        TermPtr cond = inline_expr(V(cond_var), V("k1"), V("m"), read_cell, id);
        return match(cond, {br("v_none", {}, ONONE()),
                            br("v_some", {"vv"},
                               match(V("vv"),
                                     {br("vbool", {"pb"},
                                         match(V("pb"), {br("b1", {}, std::move(on_true)),
                                                         br("b0", {}, std::move(on_false))}))},
                                     ONONE()))});
    }

    TermPtr call_table_inline(bool nested_blocks) {
        std::vector<MatchBranch> brs;
        for (const auto& [fname, body] : funtab) {
            TermPtr enc = nested_blocks ? encode_chain(body, false, "")
                                        : encode_program_list(body);
            brs.push_back(br("fn_" + fname, {},
                             interp_app_nested(V("k1"), osome(V("m")), std::move(enc))));
        }
        return match(V("cf"), std::move(brs), ONONE());
    }

    TermPtr throw_work_inline() { return osome(CT("mem", mem_binder_vars(B1()))); }

    void define_naive() {
        TermPtr seq_body = mkLet("om1", interp_app_nested(V("k1"), V("om"), V("sq0")),
                                 interp_app_nested(V("k1"), V("om1"), V("sq1")));
        TermPtr if_body = cond_then_else(
            "ce", interp_app_nested(V("k1"), osome(V("m")), V("tb")),
            interp_app_nested(V("k1"), osome(V("m")), V("eb")));
        TermPtr while_body = cond_then_else(
            "we",
            mkLet("om1", interp_app_nested(V("k1"), osome(V("m")), V("wb")),
                  interp_app_nested(V("k1"), V("om1"), CT("sn_while", {V("we"), V("wb")}))),
            osome(V("m")));
        TermPtr st_match = match(
            V("st"),
            {br("sn_snil", {}, V("om")),
             br("sn_seq", {"sq0", "sq1"}, seq_body),
             br("sn_assign", {"sa", "se"}, with_mem(V("om"), assign_work_inline())),
             br("sn_if", {"ce", "tb", "eb"}, with_mem(V("om"), if_body)),
             br("sn_while", {"we", "wb"}, with_mem(V("om"), while_body)),
             br("sn_call", {"cf"}, with_mem(V("om"), call_table_inline(true))),
             br("sn_throw", {}, with_mem(V("om"), throw_work_inline()))});
        TermPtr env_check = match(V("envp"), {br("envc", {"esc", "efu"},
                                                 match(V("efu"), {br("z", {}, ONONE()),
                                                                  br("s", {"efu1"}, st_match)}))});
        TermPtr body = match(V("k"), {br("z", {}, ONONE()), br("s", {"k1"}, env_check)});
        deffix("interp", {"k", "om", "envp", "fenvp", "st"}, 0, body);
    }

    void define_s1() {
        TermPtr if_body = cond_then_else(
            "ce", interp_app_nested(V("k1"), osome(V("m")), V("tb")),
            interp_app_nested(V("k1"), osome(V("m")), V("eb")));
        TermPtr while_body = cond_then_else(
            "we",
            mkLet("om1", interp_app_nested(V("k1"), osome(V("m")), V("wb")),
                  interp_app_nested(V("k1"), V("om1"),
                                    lcons(CT("st_while", {V("we"), V("wb")}), NIL()))),
            osome(V("m")));
        TermPtr dispatch_inline = match(
            V("stt"),
            {br("st_assign", {"sa", "se"}, with_mem(V("om"), assign_work_inline())),
             br("st_if", {"ce", "tb", "eb"}, with_mem(V("om"), if_body)),
             br("st_while", {"we", "wb"}, with_mem(V("om"), while_body)),
             br("st_call", {"cf"}, with_mem(V("om"), call_table_inline(false))),
             br("st_throw", {}, with_mem(V("om"), throw_work_inline()))});
        TermPtr body = match(
            V("k"),
            {br("z", {}, ONONE()),
             br("s", {"k1"},
                match(V("p"),
                      {br("nil", {}, V("om")),
                       br("cons", {"stt", "rr"},
                          match(dispatch_inline,
                                {br("o_none", {}, ONONE()),
                                 br("o_some", {"m2"},
                                    interp_app_nested(V("k1"), osome(V("m2")), V("rr")))}))}))});
        deffix("interp", {"k", "om", "envp", "fenvp", "p"}, 0, body);
    }

    // ---- statement work, factored style (s1s2) ----

    void define_s1s2() {
        deffix("do_assign", {"om", "k", "sa", "se"}, 0,
               match(V("om"), {br("o_none", {}, ONONE()),
                               br("o_some", {"m"},
                                  ap(R("do_assign2"), {ap(R("getflag"), {V("m")}), V("m"), V("k"),
                                                       V("sa"), V("se")}))}));
        deffix("do_assign2", {"fl", "m", "k", "sa", "se"}, 0,
               match(V("fl"), {br("b1", {}, osome(V("m"))),
                               br("b0", {}, ap(R("do_assign3"),
                                               {ev_app(V("k"), V("se"), V("m")), V("m"), V("sa")}))}));
        deffix("do_assign3", {"vo", "m", "sa"}, 0,
               match(V("vo"), {br("v_none", {}, ONONE()),
                               br("v_some", {"vv"},
                                  ap(R("do_assign4"), {V("vv"), V("m"), V("sa")}))}));
        deffix("do_assign4", {"vv", "m", "sa"}, 0, store_value(V("m"), V("sa")));

        auto walker_app = [&](TermPtr k, TermPtr om, TermPtr p) {
            return ap(R("interp"), {std::move(k), std::move(om), V("envp"), V("fenvp"), std::move(p)});
        };

        deffix("do_if", {"om", "k", "ce", "tb", "eb", "envp", "fenvp"}, 0,
               match(V("om"), {br("o_none", {}, ONONE()),
                               br("o_some", {"m"},
                                  ap(R("do_if2"), {ap(R("getflag"), {V("m")}), V("m"), V("k"),
                                                   V("ce"), V("tb"), V("eb"), V("envp"), V("fenvp")}))}));
        deffix("do_if2", {"fl", "m", "k", "ce", "tb", "eb", "envp", "fenvp"}, 0,
               match(V("fl"), {br("b1", {}, osome(V("m"))),
                               br("b0", {}, ap(R("do_if3"),
                                               {ev_app(V("k"), V("ce"), V("m")), V("m"), V("k"),
                                                V("tb"), V("eb"), V("envp"), V("fenvp")}))}));
        deffix("do_if3", {"vo", "m", "k", "tb", "eb", "envp", "fenvp"}, 0,
               match(V("vo"), {br("v_none", {}, ONONE()),
                               br("v_some", {"vv"},
                                  ap(R("do_if4"), {V("vv"), V("m"), V("k"), V("tb"), V("eb"),
                                                   V("envp"), V("fenvp")}))}));
        deffix("do_if4", {"vv", "m", "k", "tb", "eb", "envp", "fenvp"}, 0,
               match(V("vv"),
                     {br("vbool", {"pb"}, ap(R("do_if5"), {V("pb"), V("m"), V("k"), V("tb"),
                                                           V("eb"), V("envp"), V("fenvp")}))},
                     ONONE()));
        deffix("do_if5", {"pb", "m", "k", "tb", "eb", "envp", "fenvp"}, 0,
               match(V("pb"), {br("b1", {}, walker_app(V("k"), osome(V("m")), V("tb"))),
                               br("b0", {}, walker_app(V("k"), osome(V("m")), V("eb")))}));

        deffix("do_while", {"om", "k", "we", "wb", "envp", "fenvp"}, 0,
               match(V("om"), {br("o_none", {}, ONONE()),
                               br("o_some", {"m"},
                                  ap(R("do_while2"), {ap(R("getflag"), {V("m")}), V("m"), V("k"),
                                                      V("we"), V("wb"), V("envp"), V("fenvp")}))}));
        deffix("do_while2", {"fl", "m", "k", "we", "wb", "envp", "fenvp"}, 0,
               match(V("fl"), {br("b1", {}, osome(V("m"))),
                               br("b0", {}, ap(R("do_while3"),
                                               {ev_app(V("k"), V("we"), V("m")), V("m"), V("k"),
                                                V("we"), V("wb"), V("envp"), V("fenvp")}))}));
        deffix("do_while3", {"vo", "m", "k", "we", "wb", "envp", "fenvp"}, 0,
               match(V("vo"), {br("v_none", {}, ONONE()),
                               br("v_some", {"vv"},
                                  ap(R("do_while4"), {V("vv"), V("m"), V("k"), V("we"), V("wb"),
                                                      V("envp"), V("fenvp")}))}));
        deffix("do_while4", {"vv", "m", "k", "we", "wb", "envp", "fenvp"}, 0,
               match(V("vv"),
                     {br("vbool", {"pb"}, ap(R("do_while5"), {V("pb"), V("m"), V("k"), V("we"),
                                                              V("wb"), V("envp"), V("fenvp")}))},
                     ONONE()));
        deffix("do_while5", {"pb", "m", "k", "we", "wb", "envp", "fenvp"}, 0,
               match(V("pb"),
                     {br("b0", {}, osome(V("m"))),
                      br("b1", {},
                         mkLet("om1", walker_app(V("k"), osome(V("m")), V("wb")),
                               walker_app(V("k"), V("om1"),
                                          lcons(CT("st_while", {V("we"), V("wb")}), NIL()))))}));

        std::vector<MatchBranch> call_brs;
        for (const auto& [fname, body] : funtab) {
            call_brs.push_back(br("fn_" + fname, {},
                                  walker_app(V("k"), osome(V("m")), encode_program_list(body))));
        }
        deffix("do_call", {"om", "k", "cf", "envp", "fenvp"}, 0,
               match(V("om"), {br("o_none", {}, ONONE()),
                               br("o_some", {"m"},
                                  ap(R("do_call2"), {ap(R("getflag"), {V("m")}), V("m"), V("k"),
                                                     V("cf"), V("envp"), V("fenvp")}))}));
        deffix("do_call2", {"fl", "m", "k", "cf", "envp", "fenvp"}, 0,
               match(V("fl"), {br("b1", {}, osome(V("m"))),
                               br("b0", {}, ap(R("do_call3"), {V("cf"), V("m"), V("k"), V("envp"),
                                                               V("fenvp")}))}));
        deffix("do_call3", {"cf", "m", "k", "envp", "fenvp"}, 0,
               match(V("cf"), std::move(call_brs), ONONE()));

        deffix("do_throw", {"om"}, 0,
               match(V("om"), {br("o_none", {}, ONONE()),
                               br("o_some", {"m"}, osome(ap(R("setflag"), {V("m")})))}));

        TermPtr step_body = match(
            V("stt"), {br("st_assign", {"sa", "se"},
                          ap(R("do_assign"), {V("om"), V("k1"), V("sa"), V("se")})),
                       br("st_if", {"ce", "tb", "eb"},
                          ap(R("do_if"), {V("om"), V("k1"), V("ce"), V("tb"), V("eb"), V("envp"),
                                          V("fenvp")})),
                       br("st_while", {"we", "wb"},
                          ap(R("do_while"), {V("om"), V("k1"), V("we"), V("wb"), V("envp"),
                                             V("fenvp")})),
                       br("st_call", {"cf"},
                          ap(R("do_call"), {V("om"), V("k1"), V("cf"), V("envp"), V("fenvp")})),
                       br("st_throw", {}, ap(R("do_throw"), {V("om")}))});
        def("dispatch_step", lams({"k1", "stt", "om", "envp", "fenvp"}, step_body));
        deffix("dispatch", {"k", "stt", "om", "envp", "fenvp"}, 0,
               match(V("k"), {br("z", {}, ONONE()),
                              br("s", {"k1"}, ap(R("dispatch_step"),
                                                 {V("k1"), V("stt"), V("om"), V("envp"), V("fenvp")}))}));

        TermPtr body = match(
            V("k"),
            {br("z", {}, ONONE()),
             br("s", {"k1"},
                match(V("p"),
                      {br("nil", {}, V("om")),
                       br("cons", {"stt", "rr"},
                          match(ap(R("dispatch"), {V("k1"), V("stt"), V("om"), V("envp"), V("fenvp")}),
                                {br("o_none", {}, ONONE()),
                                 br("o_some", {"m2"},
                                    ap(R("interp"), {V("k1"), osome(V("m2")), V("envp"), V("fenvp"),
                                                     V("rr")}))}))}))});
        deffix("interp", {"k", "om", "envp", "fenvp", "p"}, 0, body);
    }

    // ---- statement work, per-layer fuel (full) ----

    void define_full() {
        auto walker_app = [&](TermPtr p, TermPtr kst, TermPtr om) {
            return ap(R("interp"), {std::move(p), std::move(kst), V("ke"), V("kf"), std::move(om),
                                    V("envp"), V("fenvp")});
        };

        deffix("do_assign", {"sa", "se", "ke", "m"}, 1,
               ap(R("do_assign2"), {ev_app(V("ke"), V("se"), V("m")), V("sa"), V("m")}));
        deffix("do_assign2", {"vo", "sa", "m"}, 0,
               match(V("vo"), {br("v_none", {}, ONONE()),
                               br("v_some", {"vv"},
                                  ap(R("do_assign3"), {V("vv"), V("sa"), V("m")}))}));
        deffix("do_assign3", {"vv", "sa", "m"}, 0, store_value(V("m"), V("sa")));

        deffix("do_if", {"ce", "tb", "eb", "kst", "ke", "kf", "m", "envp", "fenvp"}, 0,
               ap(R("do_if2"), {ev_app(V("ke"), V("ce"), V("m")), V("tb"), V("eb"), V("kst"),
                                V("ke"), V("kf"), V("m"), V("envp"), V("fenvp")}));
        deffix("do_if2", {"vo", "tb", "eb", "kst", "ke", "kf", "m", "envp", "fenvp"}, 0,
               match(V("vo"), {br("v_none", {}, ONONE()),
                               br("v_some", {"vv"},
                                  ap(R("do_if3"), {V("vv"), V("tb"), V("eb"), V("kst"), V("ke"),
                                                   V("kf"), V("m"), V("envp"), V("fenvp")}))}));
        deffix("do_if3", {"vv", "tb", "eb", "kst", "ke", "kf", "m", "envp", "fenvp"}, 0,
               match(V("vv"),
                     {br("vbool", {"pb"},
                         ap(R("do_if4"), {V("pb"), V("tb"), V("eb"), V("kst"), V("ke"), V("kf"),
                                          V("m"), V("envp"), V("fenvp")}))},
                     ONONE()));
        deffix("do_if4", {"pb", "tb", "eb", "kst", "ke", "kf", "m", "envp", "fenvp"}, 0,
               match(V("pb"), {br("b1", {}, walker_app(V("tb"), V("kst"), osome(V("m")))),
                               br("b0", {}, walker_app(V("eb"), V("kst"), osome(V("m"))))}));

        deffix("do_while", {"we", "wb", "kst", "ke", "kf", "m", "envp", "fenvp"}, 0,
               ap(R("do_while2"), {ev_app(V("ke"), V("we"), V("m")), V("we"), V("wb"), V("kst"),
                                   V("ke"), V("kf"), V("m"), V("envp"), V("fenvp")}));
        deffix("do_while2", {"vo", "we", "wb", "kst", "ke", "kf", "m", "envp", "fenvp"}, 0,
               match(V("vo"), {br("v_none", {}, ONONE()),
                               br("v_some", {"vv"},
                                  ap(R("do_while3"), {V("vv"), V("we"), V("wb"), V("kst"), V("ke"),
                                                      V("kf"), V("m"), V("envp"), V("fenvp")}))}));
        deffix("do_while3", {"vv", "we", "wb", "kst", "ke", "kf", "m", "envp", "fenvp"}, 0,
               match(V("vv"),
                     {br("vbool", {"pb"},
                         ap(R("do_while4"), {V("pb"), V("we"), V("wb"), V("kst"), V("ke"), V("kf"),
                                             V("m"), V("envp"), V("fenvp")}))},
                     ONONE()));
        deffix("do_while4", {"pb", "we", "wb", "kst", "ke", "kf", "m", "envp", "fenvp"}, 0,
               match(V("pb"),
                     {br("b0", {}, osome(V("m"))),
                      br("b1", {},
                         ap(R("do_while5"), {walker_app(V("wb"), V("kst"), osome(V("m"))), V("we"),
                                             V("wb"), V("kst"), V("ke"), V("kf"), V("envp"),
                                             V("fenvp")}))}));
        deffix("do_while5", {"om2", "we", "wb", "kst", "ke", "kf", "envp", "fenvp"}, 0,
               match(V("om2"), {br("o_none", {}, ONONE()),
                                br("o_some", {"m2"},
                                   ap(R("do_while6"), {ap(R("getflag"), {V("m2")}), V("m2"),
                                                       V("we"), V("wb"), V("kst"), V("ke"), V("kf"),
                                                       V("envp"), V("fenvp")}))}));
        deffix("do_while6", {"fl", "m2", "we", "wb", "kst", "ke", "kf", "envp", "fenvp"}, 0,
               match(V("fl"), {br("b1", {}, osome(V("m2"))),
                               br("b0", {}, ap(R("dispatch"),
                                               {V("kst"), CT("st_while", {V("we"), V("wb")}),
                                                V("ke"), V("kf"), V("m2"), V("envp"), V("fenvp")}))}));

        std::vector<MatchBranch> call_brs;
        for (const auto& [fname, body] : funtab) {
            deffix("fun_" + fname, {"kf", "kst", "ke", "m", "envp", "fenvp"}, 0,
                   match(V("kf"), {br("z", {}, ONONE()),
                                   br("s", {"kf1"},
                                      ap(R("interp"), {encode_program_list(body), V("kst"), V("ke"),
                                                       V("kf1"), osome(V("m")), V("envp"),
                                                       V("fenvp")}))}));
            call_brs.push_back(br("fn_" + fname, {},
                                  ap(R("fun_" + fname), {V("kf"), V("kst"), V("ke"), V("m"),
                                                         V("envp"), V("fenvp")})));
        }
        deffix("do_call", {"cf", "kst", "ke", "kf", "m", "envp", "fenvp"}, 0,
               match(V("cf"), std::move(call_brs), ONONE()));

        deffix("do_throw", {"m"}, 0,
               match(V("m"), {br("mem", mem_binders(), osome(CT("mem", mem_binder_vars(B1()))))}));

        TermPtr step_body = match(
            V("stt"),
            {br("st_assign", {"sa", "se"},
                ap(R("do_assign"), {V("sa"), V("se"), V("ke"), V("m")})),
             br("st_if", {"ce", "tb", "eb"},
                ap(R("do_if"), {V("ce"), V("tb"), V("eb"), V("k1"), V("ke"), V("kf"), V("m"),
                                V("envp"), V("fenvp")})),
             br("st_while", {"we", "wb"},
                ap(R("do_while"), {V("we"), V("wb"), V("k1"), V("ke"), V("kf"), V("m"), V("envp"),
                                   V("fenvp")})),
             br("st_call", {"cf"},
                ap(R("do_call"), {V("cf"), V("k1"), V("ke"), V("kf"), V("m"), V("envp"),
                                  V("fenvp")})),
             br("st_throw", {}, ap(R("do_throw"), {V("m")}))});
        def("dispatch_step", lams({"k1", "stt", "ke", "kf", "m", "envp", "fenvp"}, step_body));
        deffix("dispatch", {"kst", "stt", "ke", "kf", "m", "envp", "fenvp"}, 0,
               match(V("kst"), {br("z", {}, ONONE()),
                                br("s", {"k1"},
                                   ap(R("dispatch_step"), {V("k1"), V("stt"), V("ke"), V("kf"),
                                                           V("m"), V("envp"), V("fenvp")}))}));

        TermPtr body = match(
            V("p"),
            {br("nil", {}, V("om")),
             br("cons", {"stt", "rr"},
                match(V("om"),
                      {br("o_none", {}, ONONE()),
                       br("o_some", {"m"},
                          match(ap(R("getflag"), {V("m")}),
                                {br("b1", {}, osome(V("m"))),
                                 br("b0", {},
                                    match(ap(R("dispatch"), {V("kst"), V("stt"), V("ke"), V("kf"),
                                                             V("m"), V("envp"), V("fenvp")}),
                                          {br("o_none", {}, ONONE()),
                                           br("o_some", {"m2"},
                                              walker_app(V("rr"), V("kst"), osome(V("m2"))))}))}))}))});
        deffix("interp", {"p", "kst", "ke", "kf", "om", "envp", "fenvp"}, 0, body);
    }
};

} // namespace

EncodedInterp build_interpreter(Variant v, const FunTable& funtab) {
    Builder b{v, variant_name(v), funtab, {}};
    b.define_arith();
    switch (v) {
        case Variant::Naive:
            b.define_mem_helpers(true, false);
            b.define_ev_inline();
            b.define_naive();
            break;
        case Variant::S1:
            b.define_mem_helpers(true, false);
            b.define_ev_inline();
            b.define_s1();
            break;
        case Variant::S1S2:
            b.define_mem_helpers(true, true);
            b.define_ev_factored(false);
            b.define_s1s2();
            break;
        case Variant::Full:
            b.define_mem_helpers(true, true);
            b.define_ev_factored(true);
            b.define_full();
            break;
    }
    EncodedInterp out{v, std::move(b.defs), b.nm("interp"), {b.nm("ev"), b.nm("w_")}};
    return out;
}

TermPtr build_application(const EncodedInterp& interp, const TermPtr& program_term,
                          const FuelConfig& fuel, const MemoryState& m0) {
    TermPtr om0 = osome(encode_memory(m0));
    if (interp.variant == Variant::Full) {
        return ap(mkConst(interp.interp_name),
                  {program_term, encode_peano(fuel.k_stt), encode_peano(fuel.k_expr),
                   encode_peano(fuel.k_fun), om0, ENV0(), FENV0()});
    }
    return ap(mkConst(interp.interp_name),
              {encode_peano(fuel.k_stt), om0, ENV0(), FENV0(), program_term});
}

namespace {

// records any fully evaluated memory sitting in argument position of an
// interpreter application at the term's root; returns true when one is new
bool scan_interp_memory(const TermPtr& root, const std::string& interp_name,
                        std::set<std::string>& seen) {
    if (root->kind != TermKind::App) return false;
    auto [head, args] = decompose_app(root);
    if (head->kind != TermKind::ConstRef && head->kind != TermKind::Fix) return false;
    if (head->name != interp_name) return false;
    bool fresh = false;
    for (const auto& a : args) {
        TermPtr mt;
        if (a->kind == TermKind::Ctor && a->tag == "mem") {
            mt = a;
        } else if (a->kind == TermKind::Ctor && a->tag == "o_some" && a->ctor_args.size() == 1 &&
                   a->ctor_args[0]->kind == TermKind::Ctor && a->ctor_args[0]->tag == "mem") {
            mt = a->ctor_args[0];
        }
        if (!mt) continue;
        if (auto m = decode_memory(mt)) {
            if (seen.insert(print_memory(*m)).second) fresh = true;
        }
    }
    return fresh;
}

std::uint32_t nesting_walk(const TermPtr& t, const std::string& name,
                           std::unordered_map<const Term*, std::uint32_t>& memo) {
    auto it = memo.find(t.get());
    if (it != memo.end()) return it->second;
    std::uint32_t r = 0;
    if (t->kind == TermKind::App) {
        auto [head, args] = decompose_app(t);
        for (const auto& a : args) r = std::max(r, nesting_walk(a, name, memo));
        if ((head->kind == TermKind::ConstRef || head->kind == TermKind::Fix) &&
            head->name == name) {
            r += 1;
        } else if (head->kind != TermKind::ConstRef && head->kind != TermKind::Var) {
            r = std::max(r, nesting_walk(head, name, memo));
        }
    } else {
        if (t->a) r = std::max(r, nesting_walk(t->a, name, memo));
        if (t->b) r = std::max(r, nesting_walk(t->b, name, memo));
        for (const auto& a : t->ctor_args) r = std::max(r, nesting_walk(a, name, memo));
        for (const auto& brn : t->branches) r = std::max(r, nesting_walk(brn.body, name, memo));
    }
    memo.emplace(t.get(), r);
    return r;
}

} // namespace

std::uint32_t interp_nesting(const TermPtr& t, const std::string& interp_name) {
    std::unordered_map<const Term*, std::uint32_t> memo;
    return nesting_walk(t, interp_name, memo);
}

std::uint64_t match_branch_nodes(const TermPtr& t) {
    std::uint64_t acc = 0;
    std::unordered_set<const Term*> visited;
    std::function<void(const TermPtr&)> walk = [&](const TermPtr& n) {
        if (!visited.insert(n.get()).second) return;
        if (n->kind == TermKind::Match) {
            for (const auto& brn : n->branches) acc += term_size(brn.body);
            if (n->b) acc += term_size(n->b);
        }
        if (n->a) walk(n->a);
        if (n->b) walk(n->b);
        for (const auto& a : n->ctor_args) walk(a);
        for (const auto& brn : n->branches) walk(brn.body);
    };
    walk(t);
    return acc;
}

std::uint64_t expr_layer_in_branch_unfolds(const EncodedInterp& interp, const Metrics& m) {
    std::uint64_t total = 0;
    for (const auto& [name, count] : m.fix_unfolds_in_branches) {
        for (const auto& prefix : interp.expr_layer_prefixes) {
            if (name.rfind(prefix, 0) == 0) {
                total += count;
                break;
            }
        }
    }
    return total;
}

EncodedRun run_encoded(const EncodedInterp& interp, const TermPtr& program_term,
                       const FuelConfig& fuel, const MemoryState& m0,
                       const EncodedRunOptions& opts) {
    TermPtr app = build_application(interp, program_term, fuel, m0);

    EncodedRun out;
    std::set<std::string> seen;
    if (opts.scan_memory_events) scan_interp_memory(app, interp.interp_name, seen);
    bool have_event = false;
    if (opts.nesting_metric)
        out.peak_nesting_pre_first_event = interp_nesting(app, interp.interp_name);

    NormalizeOptions no;
    no.max_steps = opts.max_steps;
    no.record_size_trace = opts.record_size_trace;
    no.record_rules = opts.record_rules;
    if (opts.scan_memory_events || opts.nesting_metric || opts.on_step) {
        no.on_step = [&](const StepEvent& ev) {
            if (opts.on_step) opts.on_step(ev);
            if (opts.scan_memory_events && !ev.path.empty() &&
                scan_interp_memory(ev.path.back(), interp.interp_name, seen)) {
                out.memory_nf_events.push_back(ev.step);
                have_event = true;
            }
            if (opts.nesting_metric && !have_event &&
                (ev.step % std::max<std::uint64_t>(1, opts.nesting_sample_every)) == 0) {
                std::uint32_t n = interp_nesting(ev.path.back(), interp.interp_name);
                if (n > out.peak_nesting_pre_first_event) out.peak_nesting_pre_first_event = n;
            }
        };
    }
    out.norm = normalize(app, interp.defs, no);
    out.result = decode_memory_option(out.norm.term);
    return out;
}

TermPtr example1_program(Variant v) {
    TermPtr cond = encode_expr(Expr::constant(Value::boolean(true)));
    if (v == Variant::Naive) {
        TermPtr thr = encode_program_nested({StmtL::throw_()});
        return CT("sn_seq",
                  {CT("sn_if", {std::move(cond), std::move(thr), V("else_hole")}), V("rest_hole")});
    }
    TermPtr thr = encode_program_list({StmtL::throw_()});
    return lcons(CT("st_if", {std::move(cond), std::move(thr), V("else_hole")}), V("rest_hole"));
}

} // namespace cbnlab
