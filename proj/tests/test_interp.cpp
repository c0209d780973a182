#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cbnlab/interp.hpp"
#include "cbnlab/translate.hpp"

using namespace cbnlab;

namespace {

const Env kAmple{FuelConfig::per_layer(4096, 64, 16), 0, nullptr};

ExprPtr cint(std::int64_t n) { return Expr::constant(Value::integer(n)); }
ExprPtr cbool(bool b) { return Expr::constant(Value::boolean(b)); }
StmtLPtr assign(std::uint8_t a, ExprPtr e) { return StmtL::assign(Address{a}, std::move(e)); }

} // namespace

TEST_CASE("expressions evaluate constants variables and operators") {
    MemoryState m = write_cell(init_memory(), Address{0}, Value::integer(10));
    auto v = [&](ExprPtr e) { return eval_expr(m, kAmple, e, 64); };

    CHECK(v(cint(5)) == Value::integer(5));
    CHECK(v(Expr::var(Address{0})) == Value::integer(10));
    CHECK(v(Expr::constant(Value::address(Address{4}))) == Value::address(Address{4}));
    CHECK(v(Expr::negate(cbool(false))) == Value::boolean(true));
    CHECK(v(Expr::bin(BinOp::Add, cint(2), cint(3))) == Value::integer(5));
    CHECK(v(Expr::bin(BinOp::Sub, cint(2), cint(3))) == Value::integer(-1));
    CHECK(v(Expr::bin(BinOp::Lt, cint(2), cint(3))) == Value::boolean(true));
    CHECK(v(Expr::bin(BinOp::Eq, cint(3), cint(3))) == Value::boolean(true));
    CHECK(v(Expr::bin(BinOp::And, cbool(true), cbool(false))) == Value::boolean(false));
    CHECK(v(Expr::bin(BinOp::Or, cbool(false), cbool(true))) == Value::boolean(true));
}

TEST_CASE("arithmetic wraps at twelve bits") {
    MemoryState m = init_memory();
    CHECK(eval_expr(m, kAmple, Expr::bin(BinOp::Add, cint(kIntMax), cint(1)), 64) ==
          Value::integer(kIntMin));
    CHECK(eval_expr(m, kAmple, Expr::bin(BinOp::Sub, cint(kIntMin), cint(1)), 64) ==
          Value::integer(kIntMax));
}

TEST_CASE("expression faults yield no value") {
    MemoryState m = init_memory();
    CHECK(!eval_expr(m, kAmple, Expr::var(Address{9}), 64));
    CHECK(!eval_expr(m, kAmple, Expr::bin(BinOp::Add, cbool(true), cint(1)), 64));
    CHECK(!eval_expr(m, kAmple, Expr::negate(cint(1)), 64));
    CHECK(!eval_expr(m, kAmple, cint(1), 0));
}

TEST_CASE("expression fuel is spent per node entry") {
    MemoryState m = init_memory();
    ExprPtr e = Expr::bin(BinOp::Add, Expr::bin(BinOp::Add, cint(1), cint(2)), cint(3));
    CHECK(eval_expr(m, kAmple, e, 3) == Value::integer(6));
    CHECK(!eval_expr(m, kAmple, e, 2));
}

TEST_CASE("assignment if and while execute") {
    Program p = {assign(0, cint(0)),
                 StmtL::loop(Expr::bin(BinOp::Lt, Expr::var(Address{0}), cint(3)),
                             {assign(0, Expr::bin(BinOp::Add, Expr::var(Address{0}), cint(1)))}),
                 StmtL::ifelse(Expr::bin(BinOp::Eq, Expr::var(Address{0}), cint(3)),
                               {assign(1, cbool(true))}, {assign(1, cbool(false))})};
    auto r = exec_list(init_memory(), kAmple, {}, p);
    REQUIRE(r);
    CHECK(read_cell(*r, Address{0}) == Value::integer(3));
    CHECK(read_cell(*r, Address{1}) == Value::boolean(true));
}

TEST_CASE("calls run the named body on the current state") {
    FunTable funtab = {{"bump", {assign(0, Expr::bin(BinOp::Add, Expr::var(Address{0}), cint(1))) }}};
    Program p = {assign(0, cint(5)), StmtL::call("bump"), StmtL::call("bump")};
    auto r = exec_list(init_memory(), kAmple, funtab, p);
    REQUIRE(r);
    CHECK(read_cell(*r, Address{0}) == Value::integer(7));

    ExecDetail miss = exec_list_detail(init_memory(), kAmple.fuel, {}, {StmtL::call("nope")});
    CHECK(miss.kind == OutcomeKind::Error);
}

TEST_CASE("throw raises the flag and later statements are skipped") {
    Program p = {assign(0, cint(1)), StmtL::throw_(), assign(0, cint(2)), assign(1, cint(9))};
    auto r = exec_list(init_memory(), kAmple, {}, p);
    REQUIRE(r);
    CHECK(r->throw_flag);
    CHECK(read_cell(*r, Address{0}) == Value::integer(1));
    CHECK(!read_cell(*r, Address{1}));
}

TEST_CASE("statement fuel bounds loop turns") {
    Program spin = {StmtL::loop(cbool(true), {})};
    ExecDetail d = exec_list_detail(init_memory(), FuelConfig::per_layer(10, 8, 2), {}, spin);
    CHECK(d.kind == OutcomeKind::OutOfFuel);

    Program count = {assign(0, cint(0)),
                     StmtL::loop(Expr::bin(BinOp::Lt, Expr::var(Address{0}), cint(20)),
                                 {assign(0, Expr::bin(BinOp::Add, Expr::var(Address{0}), cint(1)))})};
    ExecDetail low = exec_list_detail(init_memory(), FuelConfig::per_layer(12, 8, 2), {}, count);
    CHECK(low.kind == OutcomeKind::OutOfFuel);
    ExecDetail high = exec_list_detail(init_memory(), FuelConfig::per_layer(64, 8, 2), {}, count);
    CHECK(high.kind == OutcomeKind::Normal);
}

TEST_CASE("function fuel bounds the call depth") {
    FunTable funtab = {{"f0", {StmtL::call("f0")}}};
    ExecDetail d = exec_list_detail(init_memory(), FuelConfig::per_layer(64, 8, 4), funtab,
                                    {StmtL::call("f0")});
    CHECK(d.kind == OutcomeKind::OutOfFuel);
}

TEST_CASE("shared fuel pays one unit per walker step") {
    Program p = {assign(0, cint(1)), assign(1, cint(2)), assign(2, cint(3))};
    CHECK(exec_list_detail(init_memory(), FuelConfig::shared_fuel(4), {}, p).kind ==
          OutcomeKind::Normal);
    CHECK(exec_list_detail(init_memory(), FuelConfig::shared_fuel(3), {}, p).kind ==
          OutcomeKind::OutOfFuel);
}

TEST_CASE("nested and list forms agree under ample fuel") {
    Program p = {assign(0, cint(2)),
                 StmtL::ifelse(Expr::bin(BinOp::Lt, Expr::var(Address{0}), cint(5)),
                               {assign(1, cint(7)), StmtL::throw_()}, {}),
                 assign(2, cint(9))};
    auto ln = exec_nested(init_memory(), kAmple, {}, translate_to_nested(p));
    auto ll = exec_list(init_memory(), kAmple, {}, p);
    REQUIRE(ln);
    REQUIRE(ll);
    CHECK(*ln == *ll);
}

TEST_CASE("run_program reverts on throw error and fuel exhaustion") {
    RunResult ok = run_program(Program{assign(0, cint(4))}, FuelConfig::per_layer(8, 8, 2), {});
    CHECK(ok.outcome.kind == OutcomeKind::Normal);
    CHECK(read_cell(ok.memory, Address{0}) == Value::integer(4));

    RunResult thrown = run_program(Program{assign(0, cint(4)), StmtL::throw_()},
                                   FuelConfig::per_layer(8, 8, 2), {});
    CHECK(thrown.outcome.kind == OutcomeKind::Normal);
    CHECK(thrown.outcome.message == "reverted by throw");
    CHECK(thrown.memory == init_memory());

    RunResult err = run_program(Program{assign(0, Expr::var(Address{3}))},
                                FuelConfig::per_layer(8, 8, 2), {});
    CHECK(err.outcome.kind == OutcomeKind::Error);
    CHECK(err.memory == init_memory());

    RunResult fuel = run_program(Program{StmtL::loop(cbool(true), {})},
                                 FuelConfig::per_layer(8, 8, 2), {});
    CHECK(fuel.outcome.kind == OutcomeKind::OutOfFuel);
    CHECK(fuel.memory == init_memory());

    RunResult nested = run_program(translate_to_nested({assign(1, cint(2))}),
                                   FuelConfig::per_layer(8, 8, 2), {});
    CHECK(nested.outcome.kind == OutcomeKind::Normal);
    CHECK(read_cell(nested.memory, Address{1}) == Value::integer(2));
}
