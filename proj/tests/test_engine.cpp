#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cbnlab/engine.hpp"
#include "cbnlab/term.hpp"

#include <vector>

using namespace cbnlab;

namespace {

TermPtr lam(const std::string& x, TermPtr b) { return mkLam(x, std::move(b)); }
TermPtr ap2(TermPtr f, TermPtr a, TermPtr b) {
    return mkApp(mkApp(std::move(f), std::move(a)), std::move(b));
}
TermPtr identity_app(TermPtr v) { return mkApp(lam("y", mkVar("y")), std::move(v)); }

TermPtr peano(std::uint64_t n) {
    TermPtr t = mkCtor("z");
    for (std::uint64_t i = 0; i < n; ++i) t = mkCtor("s", {t});
    return t;
}

// fix count(n) = match n { s(p) -> count p; z -> done }
TermPtr count_fix() {
    TermPtr body = mkMatch(mkVar("n"), {{"s", {"p"}, mkApp(mkVar("count"), mkVar("p"))},
                                        {"z", {}, mkCtor("done")}});
    return mkFix("count", {"n"}, 0, body);
}

NormalizeResult norm(TermPtr t, const DefEnv& env, std::uint64_t max_steps = 100000) {
    NormalizeOptions o;
    o.max_steps = max_steps;
    return normalize(std::move(t), env, o);
}

} // namespace

TEST_CASE("application substitutes the argument unevaluated") {
    DefEnv env;
    TermPtr dup = lam("x", mkCtor("pair", {mkVar("x"), mkVar("x")}));
    NormalizeResult r = norm(mkApp(dup, identity_app(mkCtor("c"))), env);
    CHECK(alpha_eq(r.term, mkCtor("pair", {mkCtor("c"), mkCtor("c")})));
    REQUIRE(r.metrics.rules.size() == 3);
    CHECK(r.metrics.rules[0] == RuleTag::Beta);
    CHECK(r.metrics.rules[1] == RuleTag::Beta);
    CHECK(r.metrics.rules[2] == RuleTag::Beta);
    CHECK(r.metrics.size_trace.size() == 4);
}

TEST_CASE("unused arguments are discarded unevaluated") {
    DefEnv env;
    TermPtr omega = mkApp(lam("w", mkApp(mkVar("w"), mkVar("w"))),
                          lam("w", mkApp(mkVar("w"), mkVar("w"))));
    TermPtr k = lam("a", lam("b", mkVar("a")));
    NormalizeResult r = norm(ap2(k, mkCtor("kept"), omega), env, 100);
    CHECK(!r.metrics.budget_exhausted);
    CHECK(alpha_eq(r.term, mkCtor("kept")));
}

TEST_CASE("a diverging term exhausts the step budget") {
    DefEnv env;
    TermPtr omega = mkApp(lam("w", mkApp(mkVar("w"), mkVar("w"))),
                          lam("w", mkApp(mkVar("w"), mkVar("w"))));
    NormalizeResult r = norm(omega, env, 50);
    CHECK(r.metrics.budget_exhausted);
    CHECK(r.metrics.steps == 50);
}

TEST_CASE("no reduction happens under a lambda") {
    DefEnv env;
    TermPtr t = lam("x", identity_app(mkCtor("c")));
    ReductionPolicy pol;
    CHECK(is_normal_form(t, env, pol));
    NormalizeResult r = norm(t, env);
    CHECK(r.metrics.steps == 0);
}

TEST_CASE("swapped composition stays symbolic under names") {
    DefEnv env;
    TermPtr add = mkVar("add");
    TermPtr one = mkCtor("n1");
    TermPtr three = mkCtor("n3");
    TermPtr four = mkCtor("n4");
    TermPtr t = mkApp(lam("y", lam("x", ap2(add, mkVar("y"), mkVar("x")))), ap2(add, one, three));

    NormalizeResult r = norm(t, env);
    CHECK(r.metrics.steps == 1);
    CHECK(alpha_eq(r.term, lam("z", ap2(mkVar("add"), ap2(mkVar("add"), one, three), mkVar("z")))));
    CHECK(!alpha_eq(r.term, lam("x", ap2(mkVar("add"), four, mkVar("x")))));
}

TEST_CASE("match selects the branch and binds constructor arguments") {
    DefEnv env;
    TermPtr scrut = mkCtor("cons", {mkCtor("h"), mkCtor("t")});
    TermPtr t = mkMatch(scrut, {{"nil", {}, mkCtor("nil")},
                                {"cons", {"a", "b"}, mkCtor("pair", {mkVar("b"), mkVar("a")})}});
    NormalizeResult r = norm(t, env);
    CHECK(alpha_eq(r.term, mkCtor("pair", {mkCtor("t"), mkCtor("h")})));
    REQUIRE(r.metrics.rules.size() == 1);
    CHECK(r.metrics.rules[0] == RuleTag::Iota);
}

TEST_CASE("an unmatched constructor falls through to the default branch") {
    DefEnv env;
    TermPtr t = mkMatch(mkCtor("other"), {{"nil", {}, mkCtor("a")}}, mkCtor("fallback"));
    NormalizeResult r = norm(t, env);
    CHECK(alpha_eq(r.term, mkCtor("fallback")));
}

TEST_CASE("stuck matches reduce inside branches only when allowed") {
    DefEnv env;
    TermPtr t = mkMatch(mkVar("x"), {{"c", {}, identity_app(mkCtor("v"))}});

    NormalizeResult r = norm(t, env);
    CHECK(r.metrics.steps == 1);
    CHECK(alpha_eq(r.term, mkMatch(mkVar("x"), {{"c", {}, mkCtor("v")}})));

    ReductionPolicy frozen;
    frozen.reduce_match_branches = false;
    CHECK(is_normal_form(t, env, frozen));
}

TEST_CASE("a concrete scrutinee discards the other branches before they reduce") {
    DefEnv env;
    TermPtr t = mkMatch(mkCtor("b"), {{"a", {}, identity_app(mkCtor("dead"))},
                                      {"b", {}, mkCtor("live")}});
    NormalizeResult r = norm(t, env);
    CHECK(alpha_eq(r.term, mkCtor("live")));
    REQUIRE(r.metrics.rules.size() == 1);
    CHECK(r.metrics.rules[0] == RuleTag::Iota);
}

TEST_CASE("fixpoints unfold only on constructor-headed guards") {
    DefEnv env;
    NormalizeResult r = norm(mkApp(count_fix(), peano(2)), env);
    CHECK(alpha_eq(r.term, mkCtor("done")));
    CHECK(r.metrics.fix_unfolds["count"] == 3);

    NormalizeResult stuck = norm(mkApp(count_fix(), mkVar("free")), env);
    CHECK(stuck.metrics.steps == 0);
    CHECK(stuck.term->kind == TermKind::App);
}

TEST_CASE("an applied guard is reduced to feed the fixpoint") {
    DefEnv env;
    TermPtr t = mkApp(count_fix(), identity_app(peano(0)));
    NormalizeResult r = norm(t, env);
    CHECK(alpha_eq(r.term, mkCtor("done")));
    REQUIRE(r.metrics.rules.size() >= 2);
    CHECK(r.metrics.rules[0] == RuleTag::Beta);
    CHECK(r.metrics.rules[1] == RuleTag::FixUnfold);
}

TEST_CASE("fix unfolds inside unselected branches are counted separately") {
    DefEnv env;
    TermPtr t = mkMatch(mkVar("x"), {{"c", {}, mkApp(count_fix(), peano(0))}});
    NormalizeResult r = norm(t, env);
    CHECK(r.metrics.fix_unfolds["count"] == 1);
    CHECK(r.metrics.fix_unfolds_in_branches["count"] == 1);

    NormalizeResult top = norm(mkApp(count_fix(), peano(0)), env);
    CHECK(top.metrics.fix_unfolds["count"] == 1);
    CHECK(top.metrics.fix_unfolds_in_branches.count("count") == 0);
}

TEST_CASE("named constants unfold only under demand") {
    DefEnv env;
    REQUIRE(env.define("two", peano(2)));
    REQUIRE(env.define("idf", lam("x", mkVar("x"))));

    ReductionPolicy pol;
    CHECK(is_normal_form(mkCtor("box", {mkConst("two")}), env, pol));

    NormalizeResult r = norm(mkMatch(mkConst("two"), {{"s", {"p"}, mkVar("p")}, {"z", {}, peano(0)}}),
                             env);
    CHECK(alpha_eq(r.term, peano(1)));
    CHECK(r.metrics.delta_unfolds["two"] == 1);

    NormalizeResult ap = norm(mkApp(mkConst("idf"), mkCtor("c")), env);
    CHECK(alpha_eq(ap.term, mkCtor("c")));
    CHECK(ap.metrics.delta_unfolds["idf"] == 1);

    NormalizeOptions always;
    always.policy.delta = DeltaMode::Always;
    NormalizeResult r2 = normalize(mkCtor("box", {mkConst("two")}), env, always);
    CHECK(alpha_eq(r2.term, mkCtor("box", {peano(2)})));
}

TEST_CASE("opaque definitions never unfold") {
    DefEnv env;
    REQUIRE(env.define("hidden", peano(2), false));
    NormalizeResult r = norm(mkMatch(mkConst("hidden"), {{"s", {"p"}, mkVar("p")}}), env);
    CHECK(r.metrics.steps == 0);
}

TEST_CASE("definitions reject redefinition and reference loops") {
    DefEnv env;
    CHECK(env.define("a", mkConst("b")));
    CHECK(!env.define("a", peano(0)));
    CHECK(env.define("b", mkConst("c")));
    CHECK(!env.define("c", mkConst("a")));
}

TEST_CASE("let substitutes the bound value unevaluated") {
    DefEnv env;
    TermPtr t = mkLet("x", identity_app(mkCtor("c")),
                      mkCtor("pair", {mkVar("x"), mkVar("x")}));
    NormalizeResult r = norm(t, env);
    CHECK(alpha_eq(r.term, mkCtor("pair", {mkCtor("c"), mkCtor("c")})));
    REQUIRE(r.metrics.rules.size() == 3);
    CHECK(r.metrics.rules[0] == RuleTag::Let);
    CHECK(r.metrics.rules[1] == RuleTag::Beta);
}

TEST_CASE("substitution avoids capturing free variables") {
    // (λx. λy. x) y  ->  λy'. y  with the free y intact
    DefEnv env;
    TermPtr t = mkApp(lam("x", lam("y", mkVar("x"))), mkVar("y"));
    NormalizeResult r = norm(t, env);
    REQUIRE(r.term->kind == TermKind::Lam);
    CHECK(r.term->a->kind == TermKind::Var);
    CHECK(r.term->a->name == "y");
    CHECK(r.term->name != "y");
}

TEST_CASE("alpha equivalence ignores binder names only") {
    CHECK(alpha_eq(lam("x", mkVar("x")), lam("y", mkVar("y"))));
    CHECK(!alpha_eq(lam("x", lam("y", mkVar("x"))), lam("x", lam("y", mkVar("y")))));
    CHECK(!alpha_eq(mkVar("a"), mkVar("b")));
    CHECK(alpha_eq(mkCtor("c", {lam("a", mkVar("a"))}), mkCtor("c", {lam("b", mkVar("b"))})));
}

TEST_CASE("term sizes count each copy after substitution") {
    TermPtr v = mkCtor("s", {mkCtor("s", {mkCtor("z")})});
    CHECK(term_size(v) == 3);
    TermPtr two_copies = substitute(mkCtor("pair", {mkVar("x"), mkVar("x")}), "x", v);
    CHECK(term_size(two_copies) == 7);
}

TEST_CASE("step events number the steps and report sizes") {
    DefEnv env;
    std::vector<std::uint64_t> steps;
    std::vector<std::uint64_t> sizes;
    NormalizeOptions o;
    o.on_step = [&](const StepEvent& ev) {
        steps.push_back(ev.step);
        sizes.push_back(ev.term_size_after);
        CHECK(!ev.path.empty());
        CHECK(term_size(ev.path.back()) == ev.term_size_after);
    };
    NormalizeResult r = normalize(mkApp(count_fix(), peano(1)), env, o);
    REQUIRE(steps.size() == r.metrics.steps);
    for (std::size_t i = 0; i < steps.size(); ++i) CHECK(steps[i] == i + 1);
    CHECK(sizes.back() == term_size(r.term));
    CHECK(r.metrics.peak_term_size >= term_size(r.term));
}

TEST_CASE("single steps agree with full normalization") {
    DefEnv env;
    TermPtr t = mkApp(count_fix(), peano(1));
    NormalizeResult full = norm(t, env);
    ReductionPolicy pol;
    std::uint64_t n = 0;
    while (true) {
        SingleStep s = step_once(t, env, pol);
        if (!s.reduced) break;
        t = s.term;
        ++n;
    }
    CHECK(n == full.metrics.steps);
    CHECK(alpha_eq(t, full.term));
    CHECK(is_normal_form(t, env, pol));
}
