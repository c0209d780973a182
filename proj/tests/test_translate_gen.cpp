#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cbnlab/gen.hpp"
#include "cbnlab/interp.hpp"
#include "cbnlab/translate.hpp"

using namespace cbnlab;

namespace {

StmtLPtr assign_int(std::uint8_t a, std::int64_t v) {
    return StmtL::assign(Address{a}, Expr::constant(Value::integer(v)));
}

} // namespace

TEST_CASE("empty program folds to the sequence terminator") {
    CHECK(equal(translate_to_nested({}), StmtN::snil()));
}

TEST_CASE("lists fold to right-nested sequences") {
    StmtNPtr n = translate_to_nested({assign_int(0, 5), StmtL::throw_()});
    REQUIRE(n->kind == StmtN::Kind::Seq);
    CHECK(n->a->kind == StmtN::Kind::Assign);
    REQUIRE(n->b->kind == StmtN::Kind::Seq);
    CHECK(n->b->a->kind == StmtN::Kind::Throw);
    CHECK(n->b->b->kind == StmtN::Kind::Snil);
}

TEST_CASE("sequences flatten back to lists") {
    StmtNPtr n = StmtN::seq(StmtN::assign(Address{0}, Expr::constant(Value::integer(5))),
                            StmtN::seq(StmtN::throw_(), StmtN::snil()));
    TranslateResult r = translate_to_list(n);
    REQUIRE(r);
    CHECK(equal(*r.program, {assign_int(0, 5), StmtL::throw_()}));

    TranslateResult empty = translate_to_list(StmtN::snil());
    REQUIRE(empty);
    CHECK(empty.program->empty());

    TranslateResult bare = translate_to_list(StmtN::throw_());
    REQUIRE(bare);
    CHECK(equal(*bare.program, {StmtL::throw_()}));
}

TEST_CASE("a sequence in head position is rejected") {
    StmtNPtr bad = StmtN::seq(StmtN::seq(StmtN::throw_(), StmtN::snil()), StmtN::snil());
    TranslateResult r = translate_to_list(bad);
    CHECK(!r);
    CHECK(!r.error.empty());
}

TEST_CASE("translation recurses into sub-blocks") {
    Program p = {StmtL::ifelse(Expr::constant(Value::boolean(true)),
                               {assign_int(1, 2), StmtL::throw_()}, {}),
                 StmtL::loop(Expr::constant(Value::boolean(false)), {assign_int(2, 3)})};
    StmtNPtr n = translate_to_nested(p);
    TranslateResult back = translate_to_list(n);
    REQUIRE(back);
    CHECK(equal(*back.program, p));
    REQUIRE(n->kind == StmtN::Kind::Seq);
    CHECK(n->a->kind == StmtN::Kind::If);
    CHECK(n->a->a->kind == StmtN::Kind::Seq);
}

TEST_CASE("canonicalize reassociates and is idempotent") {
    StmtNPtr left = StmtN::seq(
        StmtN::seq(StmtN::seq(StmtN::assign(Address{0}, Expr::constant(Value::integer(1))),
                              StmtN::snil()),
                   StmtN::seq(StmtN::throw_(), StmtN::snil())),
        StmtN::snil());
    StmtNPtr canon = canonicalize(left);
    TranslateResult r = translate_to_list(canon);
    REQUIRE(r);
    CHECK(equal(*r.program, {assign_int(0, 1), StmtL::throw_()}));
    CHECK(equal(canonicalize(canon), canon));

    StmtNPtr bare = canonicalize(StmtN::throw_());
    CHECK(equal(bare, StmtN::seq(StmtN::throw_(), StmtN::snil())));
}

TEST_CASE("round trips hold on random programs") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        FunTable funtab = gen_funtable(seed, 2);
        Program p = gen_checked_program(seed, 15, 3, funtab);
        StmtNPtr n = translate_to_nested(p);
        TranslateResult back = translate_to_list(n);
        REQUIRE(back);
        CHECK(equal(*back.program, p));
        CHECK(equal(canonicalize(n), n));
    }
}

TEST_CASE("generation is deterministic per seed") {
    for (std::uint64_t seed : {0ull, 7ull, 123456789ull}) {
        CHECK(equal(gen_checked_program(seed, 12, 3, {}), gen_checked_program(seed, 12, 3, {})));
        GenProgram a = gen_program(seed, GenShape::random(3, 6));
        GenProgram b = gen_program(seed, GenShape::random(3, 6));
        CHECK(equal(a.stmts, b.stmts));
        CHECK(a.tail_hole == b.tail_hole);
    }
    CHECK(!equal(gen_checked_program(1, 12, 3, {}), gen_checked_program(2, 12, 3, {})));
}

TEST_CASE("shape kinds control length and the free tail") {
    GenProgram line = gen_program(3, GenShape::straight_line(6));
    CHECK(line.stmts.size() == 6);
    CHECK(!line.tail_hole);
    for (const auto& s : line.stmts) CHECK(s->kind == StmtL::Kind::Assign);

    GenProgram tail = gen_program(3, GenShape::abstract_tail(4));
    CHECK(tail.stmts.size() == 4);
    CHECK(tail.tail_hole);
}

TEST_CASE("checked programs run to completion under ample fuel") {
    Env ample{FuelConfig::per_layer(4096, 64, 16), 0, nullptr};
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        FunTable funtab = gen_funtable(seed, 2);
        Program p = gen_checked_program(seed, 12, 3, funtab);
        CHECK(exec_list(init_memory(), ample, funtab, p).has_value());
    }
}

TEST_CASE("generated function tables are straight-line and named in order") {
    FunTable t = gen_funtable(11, 3);
    REQUIRE(t.size() == 3);
    CHECK(t.count("f0") == 1);
    CHECK(t.count("f1") == 1);
    CHECK(t.count("f2") == 1);
    for (const auto& [name, body] : t)
        for (const auto& s : body) CHECK(s->kind == StmtL::Kind::Assign);
}
