// Runs the ten acceptance checks, one PASS/FAIL line each; exits nonzero on
// any failure.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cbnlab/bench.hpp"
#include "cbnlab/cost.hpp"
#include "cbnlab/encode.hpp"
#include "cbnlab/gen.hpp"
#include "cbnlab/interp.hpp"
#include "cbnlab/memory.hpp"
#include "cbnlab/translate.hpp"

using namespace cbnlab;

namespace {

const Env kAmple{FuelConfig::per_layer(4096, 64, 16), 0, nullptr};

struct CheckResult {
    bool pass = false;
    std::string detail;
};

std::string at_seed(const char* what, std::uint64_t seed) {
    return std::string(what) + " at seed " + std::to_string(seed);
}

std::string at_n(const char* what, std::size_t n) {
    return std::string(what) + " at n=" + std::to_string(n);
}

std::string fmt(double x) {
    std::ostringstream o;
    o.precision(3);
    o << std::fixed << x;
    return o.str();
}

EncodedRunOptions quiet_opts() {
    EncodedRunOptions o;
    o.record_size_trace = false;
    return o;
}

std::uint64_t outer_unfolds(const EncodedRun& r, const EncodedInterp& interp) {
    auto it = r.norm.metrics.fix_unfolds.find(interp.interp_name);
    return it == r.norm.metrics.fix_unfolds.end() ? 0 : it->second;
}

struct Fit {
    double slope = 0;
    double r2 = 0;
};

Fit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    Fit f;
    f.slope = sxx == 0 ? 0 : sxy / sxx;
    double ss_res = 0;
    double a = my - f.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        double e = ys[i] - (a + f.slope * xs[i]);
        ss_res += e * e;
    }
    f.r2 = syy == 0 ? 1.0 : 1.0 - ss_res / syy;
    return f;
}

// ---- criterion 1: the two sequence forms execute identically ----

CheckResult ac1() {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        FunTable funtab = gen_funtable(seed, 2);
        Program p = gen_checked_program(seed, 30, 4, funtab);
        StmtNPtr nested = translate_to_nested(p);
        TranslateResult listed = translate_to_list(nested);
        if (!listed) return {false, at_seed("translation failed", seed)};
        auto rn = exec_nested(init_memory(), kAmple, funtab, nested);
        auto rl = exec_list(init_memory(), kAmple, funtab, *listed.program);
        if (rn.has_value() != rl.has_value())
            return {false, at_seed("presence mismatch", seed)};
        if (rn && !(*rn == *rl)) return {false, at_seed("memory mismatch", seed)};
    }
    return {true, "1000 seeded programs agree"};
}

// ---- criterion 2: translation round trip and canonicalization ----

CheckResult ac2() {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Program p = gen_checked_program(seed, 30, 4, gen_funtable(seed, 2));
        StmtNPtr nested = translate_to_nested(p);
        TranslateResult back = translate_to_list(nested);
        if (!back || !equal(*back.program, p))
            return {false, at_seed("round trip failed", seed)};
        if (!equal(canonicalize(nested), nested))
            return {false, at_seed("canonical form changed", seed)};
        if (!p.empty()) {
            StmtNPtr mangled = StmtN::seq(StmtN::seq(nested->a, StmtN::snil()), nested->b);
            StmtNPtr canon = canonicalize(mangled);
            if (!equal(canon, nested))
                return {false, at_seed("reassociation changed the program", seed)};
            if (!equal(canonicalize(canon), canon))
                return {false, at_seed("canonicalize is not idempotent", seed)};
        }
    }
    return {true, "1000 round trips and reassociations hold"};
}

// ---- criterion 3: the argument is substituted, not computed ----

CheckResult ac3() {
    DefEnv env;
    TermPtr t = mkApp(mkLam("y", mkLam("x", mkApps(mkVar("add"), {mkVar("y"), mkVar("x")}))),
                      mkApps(mkVar("add"), {encode_word(1), encode_word(3)}));
    NormalizeResult r = normalize(t, env, {});
    TermPtr swapped =
        mkLam("x", mkApps(mkVar("add"),
                          {mkApps(mkVar("add"), {encode_word(1), encode_word(3)}), mkVar("x")}));
    TermPtr computed = mkLam("x", mkApps(mkVar("add"), {encode_word(4), mkVar("x")}));
    if (!alpha_eq(r.term, swapped)) return {false, "normal form is not the swapped application"};
    if (alpha_eq(r.term, computed)) return {false, "argument was computed under the binder"};
    return {true, "application kept symbolic under the binder"};
}

// ---- criterion 4: trace shapes of the naive and layered interpreters ----

CheckResult ac4() {
    EncodedInterp naive = build_interpreter(Variant::Naive, {});
    EncodedInterp full = build_interpreter(Variant::Full, {});
    for (std::size_t n : {4u, 8u, 16u}) {
        GenProgram gp = gen_program(n, GenShape::straight_line(n));

        EncodedRunOptions no = quiet_opts();
        no.scan_memory_events = true;
        no.nesting_metric = true;
        EncodedRun rn = run_encoded(naive, encode_program(gp.stmts, Variant::Naive),
                                    bench_fuel(Variant::Naive, n, false), init_memory(), no);
        if (!rn.result || !*rn.result) return {false, at_n("naive run did not finish", n)};
        if (rn.peak_nesting_pre_first_event < n)
            return {false, at_n(("naive nesting " +
                                 std::to_string(rn.peak_nesting_pre_first_event) + " below")
                                    .c_str(),
                                n)};
        std::uint64_t un = outer_unfolds(rn, naive);
        if (un + 2 < 2 * n || un > 2 * n + 2)
            return {false, at_n(("naive outer unfolds " + std::to_string(un)).c_str(), n)};

        EncodedRunOptions fo = quiet_opts();
        fo.scan_memory_events = true;
        EncodedRun rf = run_encoded(full, encode_program(gp.stmts, Variant::Full),
                                    bench_fuel(Variant::Full, n, false), init_memory(), fo);
        if (!rf.result || !*rf.result) return {false, at_n("layered run did not finish", n)};
        if (rf.memory_nf_events.size() != n)
            return {false,
                    at_n(("memory events " + std::to_string(rf.memory_nf_events.size())).c_str(),
                         n)};
        auto it = rf.norm.metrics.fix_unfold_steps.find(full.interp_name);
        if (it == rf.norm.metrics.fix_unfold_steps.end())
            return {false, at_n("no outer unfolds recorded", n)};
        const std::vector<std::uint64_t>& u = it->second;
        if (u.size() + 1 < n || u.size() > n + 2)
            return {false, at_n(("layered outer unfolds " + std::to_string(u.size())).c_str(), n)};
        std::size_t in_gaps = 0;
        for (std::size_t i = 0; i + 1 < u.size(); ++i) {
            std::size_t here = 0;
            for (std::uint64_t e : rf.memory_nf_events)
                if (e > u[i] && e < u[i + 1]) ++here;
            if (here > 1)
                return {false, at_n("two memory events inside one walker turn", n)};
            in_gaps += here;
        }
        if (in_gaps != n) return {false, at_n("memory events outside walker turns", n)};
    }
    return {true, "trace shapes hold for n in {4,8,16}"};
}

// ---- criterion 5: free-tail blowup of the naive interpreter ----

CheckResult ac5() {
    EncodedInterp naive = build_interpreter(Variant::Naive, {});
    EncodedInterp full = build_interpreter(Variant::Full, {});
    EncodedRun rn = run_encoded(naive, example1_program(Variant::Naive), FuelConfig::shared_fuel(4),
                                init_memory(), quiet_opts());
    EncodedRun rf = run_encoded(full, example1_program(Variant::Full),
                                FuelConfig::per_layer(4, 4, 2), init_memory(), quiet_opts());
    if (rn.norm.metrics.budget_exhausted || rf.norm.metrics.budget_exhausted)
        return {false, "a run exhausted the step budget"};
    double np = static_cast<double>(rn.norm.metrics.peak_term_size);
    double fp = static_cast<double>(std::max<std::uint64_t>(1, rf.norm.metrics.peak_term_size));
    std::uint64_t nb = match_branch_nodes(rn.norm.term);
    std::uint64_t fb = match_branch_nodes(rf.norm.term);
    if (np / fp < 10.0) return {false, "peak ratio " + fmt(np / fp) + " below 10"};
    if (nb == 0 || nb < 5 * fb)
        return {false, "branch nodes " + std::to_string(nb) + " vs " + std::to_string(fb)};
    return {true, "peak ratio " + fmt(np / fp) + ", branch nodes " + std::to_string(nb) + " vs " +
                      std::to_string(fb)};
}

// ---- criterion 6: scaling curves over the sweep ----

const std::vector<BenchRow>& concrete_rows() {
    static std::vector<BenchRow> rows = [] {
        BenchOptions opts;
        return run_bench(opts);
    }();
    return rows;
}

std::vector<BenchRow> pick(const std::vector<BenchRow>& rows, Variant v) {
    std::vector<BenchRow> out;
    for (const auto& r : rows)
        if (r.variant == v) out.push_back(r);
    return out;
}

CheckResult ac6() {
    const std::vector<BenchRow>& rows = concrete_rows();
    for (const auto& r : rows)
        if (r.budget_exhausted) return {false, at_n("budget exhausted", r.n)};

    std::vector<BenchRow> full = pick(rows, Variant::Full);
    double wmin = 0, wmax = 0, wsum = 0;
    for (std::size_t i = 0; i < full.size(); ++i) {
        double w = static_cast<double>(full[i].working_size);
        wmin = i == 0 ? w : std::min(wmin, w);
        wmax = i == 0 ? w : std::max(wmax, w);
        wsum += w;
    }
    double spread = (wmax - wmin) / (wsum / static_cast<double>(full.size()));
    if (spread >= 0.10)
        return {false, "layered working size varies by " + fmt(100 * spread) + "%"};

    std::vector<BenchRow> naive = pick(rows, Variant::Naive);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < naive.size(); ++i) {
        if (i && naive[i].peak_size <= naive[i - 1].peak_size)
            return {false, "naive peak size is not strictly increasing"};
        xs.push_back(static_cast<double>(naive[i].n));
        ys.push_back(static_cast<double>(naive[i].peak_size));
    }
    Fit f = linear_fit(xs, ys);
    bool superlinear = true;
    for (std::size_t i = 0; i + 1 < naive.size(); ++i)
        superlinear = superlinear && ys[i + 1] / ys[i] >= xs[i + 1] / xs[i];
    if (f.r2 < 0.95 && !superlinear)
        return {false, "naive growth fits linear with R2 " + fmt(f.r2) + " and is not superlinear"};

    BenchOptions aopts;
    aopts.variants = {Variant::Naive, Variant::Full};
    aopts.abstract_tail = true;
    std::vector<BenchRow> arows = run_bench(aopts);
    for (const auto& r : arows)
        if (r.budget_exhausted) return {false, at_n("abstract budget exhausted", r.n)};
    std::vector<BenchRow> an = pick(arows, Variant::Naive);
    std::vector<BenchRow> af = pick(arows, Variant::Full);
    double dn = static_cast<double>(an.back().n - an.front().n);
    double naive_rate = (static_cast<double>(an.back().peak_size) -
                         static_cast<double>(an.front().peak_size)) / dn;
    double full_rate = (static_cast<double>(af.back().peak_size) -
                        static_cast<double>(af.front().peak_size)) / dn;
    if (full_rate <= 0) full_rate = 1;
    if (naive_rate < 5 * full_rate)
        return {false, "abstract growth " + fmt(naive_rate) + " vs " + fmt(full_rate)};
    return {true, "working spread " + fmt(100 * spread) + "%, naive R2 " + fmt(f.r2) +
                      ", abstract rate ratio " + fmt(naive_rate / full_rate)};
}

// ---- criterion 7: shared fuel drags the expression layer into branches ----

CheckResult ac7() {
    TermPtr prog = mkCtor("cons", {mkVar("stmt_hole"), mkCtor("nil")});

    EncodedInterp s1s2 = build_interpreter(Variant::S1S2, {});
    EncodedRun rs = run_encoded(s1s2, prog, FuelConfig::shared_fuel(4), init_memory(),
                                quiet_opts());
    std::uint64_t shared_unfolds = expr_layer_in_branch_unfolds(s1s2, rs.norm.metrics);

    EncodedInterp full = build_interpreter(Variant::Full, {});
    EncodedRun rf = run_encoded(full, prog, FuelConfig::per_layer(4, 4, 2), init_memory(),
                                quiet_opts());
    std::uint64_t layered_unfolds = expr_layer_in_branch_unfolds(full, rf.norm.metrics);

    if (rs.norm.metrics.budget_exhausted || rf.norm.metrics.budget_exhausted)
        return {false, "a run exhausted the step budget"};
    if (shared_unfolds < 1)
        return {false, "shared fuel recorded no expression-layer unfolds in branches"};
    if (layered_unfolds != 0)
        return {false, "per-layer fuel recorded " + std::to_string(layered_unfolds) +
                           " expression-layer unfolds in branches"};
    return {true, "in-branch expression unfolds: shared " + std::to_string(shared_unfolds) +
                      ", layered 0"};
}

// ---- criterion 8: encoded runs track the native interpreter ----

CheckResult ac8() {
    FunTable funtab = gen_funtable(42, 2);
    EncodedInterp full = build_interpreter(Variant::Full, funtab);
    FuelConfig fuel = FuelConfig::per_layer(16, 16, 4);
    for (std::uint64_t i = 0; i < 200; ++i) {
        Program p = gen_checked_program(9000 + i, 10, 2, funtab);
        auto native = exec_list(init_memory(), Env{fuel, 0, nullptr}, funtab, p);
        EncodedRun run = run_encoded(full, encode_program(p, Variant::Full), fuel, init_memory(),
                                     quiet_opts());
        if (run.norm.metrics.budget_exhausted) return {false, at_seed("budget exhausted", i)};
        if (!run.result) return {false, at_seed("layered run got stuck", i)};
        if ((*run.result).has_value() != native.has_value())
            return {false, at_seed("presence mismatch", i)};
        if (native && !(**run.result == *native)) return {false, at_seed("memory mismatch", i)};
    }

    EncodedInterp naive = build_interpreter(Variant::Naive, funtab);
    std::size_t finished = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        Program p = gen_checked_program(30000 + i, 8, 2, funtab);
        EncodedRun run = run_encoded(naive, encode_program(p, Variant::Naive),
                                     FuelConfig::shared_fuel(64), init_memory(), quiet_opts());
        if (run.norm.metrics.budget_exhausted) continue;
        if (!run.result || !*run.result) continue;
        auto native = exec_list(init_memory(), kAmple, funtab, p);
        if (!native) return {false, at_seed("naive finished where native failed", i)};
        if (!(**run.result == *native)) return {false, at_seed("naive memory mismatch", i)};
        ++finished;
    }
    if (finished == 0) return {false, "no naive run terminated within fuel"};
    return {true, "200 layered runs exact, " + std::to_string(finished) + "/50 naive runs agree"};
}

// ---- criterion 9: the cost model predicts the ordering ----

CheckResult ac9() {
    EncodedInterp full = build_interpreter(Variant::Full, {});
    StmtLPtr stmt = StmtL::assign(Address{0}, Expr::constant(Value::integer(1)));
    StructuralParams base = extract_params(full.defs, Variant::Full, stmt);
    auto opt1 = infor_opt(base);
    if (!opt1) return {false, "optimized formula failed"};
    for (std::uint64_t num : {2ull, 17ull, 900ull}) {
        StructuralParams p = base;
        p.num_stmts = num;
        if (infor_opt(p) != opt1)
            return {false, "optimized formula depends on the statement count"};
    }

    std::mt19937_64 rng(99);
    auto small = [&](std::uint64_t m) { return rng() % m; };
    for (int i = 0; i < 500; ++i) {
        StructuralParams p;
        p.num_stmts = 1 + small(6);
        p.program_size = small(200);
        std::size_t nlevels = 1 + small(3);
        for (std::size_t l = 0; l < nlevels; ++l) {
            LevelParams lp;
            lp.c_nosub = small(5);
            lp.c_sub = small(4);
            lp.es = small(5);
            lp.ds = 1 + small(3);
            if (small(2)) {
                lp.r_counts = {1 + small(3)};
                lp.r_sizes = {1 + small(6)};
            }
            p.levels.push_back(lp);
        }
        auto v0 = infor_naive(p);
        if (!v0) return {false, "naive formula failed on a random parameter set"};
        StructuralParams longer = p;
        longer.num_stmts += 1 + small(4);
        StructuralParams bushier = p;
        bushier.levels[small(nlevels)].c_sub += 1 + small(3);
        auto v1 = infor_naive(longer);
        auto v2 = infor_naive(bushier);
        if (!v1 || *v1 < *v0) return {false, "naive formula shrank with statement count"};
        if (!v2 || *v2 < *v0) return {false, "naive formula shrank with branching"};
    }

    const std::vector<BenchRow>& rows = concrete_rows();
    std::vector<std::size_t> ns;
    for (const auto& r : rows)
        if (ns.empty() || ns.back() != r.n) ns.push_back(r.n);
    double worst = 1.0;
    for (std::size_t n : ns) {
        std::vector<std::uint64_t> predicted, measured;
        for (const auto& r : rows) {
            if (r.n != n) continue;
            predicted.push_back(r.predicted);
            measured.push_back(r.peak_size);
        }
        auto rep = compare_report(predicted, measured);
        if (!rep) return {false, at_n("too few points", n)};
        worst = std::min(worst, rep->spearman);
    }
    if (worst < 0.8) return {false, "rank correlation " + fmt(worst) + " below 0.8"};
    return {true, "independence, monotonicity, rank correlation >= " + fmt(worst)};
}

// ---- criterion 10: memory laws against the association-list model ----

CheckResult ac10() {
    std::mt19937_64 rng(4242);
    MemoryState m = init_memory();
    std::vector<std::pair<Address, Value>> bindings;
    auto model_read = [&](Address a) -> std::optional<Value> {
        for (const auto& [addr, val] : bindings)
            if (addr == a) return val;
        return std::nullopt;
    };
    auto rand_value = [&]() -> Value {
        switch (rng() % 4) {
            case 0: return Value::boolean(rng() % 2 == 0);
            case 1: return Value::integer(static_cast<std::int64_t>(rng() % 4096) + kIntMin);
            case 2: return Value::address(Address{static_cast<std::uint8_t>(rng() % kMemCells)});
            default: return Value::unit();
        }
    };
    for (std::uint64_t i = 0; i < 10000; ++i) {
        if (i % 500 == 0) {
            m = init_memory();
            bindings.clear();
        }
        Address a{static_cast<std::uint8_t>(rng() % kMemCells)};
        if (rng() % 3 == 0) {
            if (read_cell(m, a) != model_read(a))
                return {false, "read mismatch at case " + std::to_string(i)};
        } else {
            Value v = rand_value();
            Address other{static_cast<std::uint8_t>(rng() % kMemCells)};
            std::optional<Value> frame_before = read_cell(m, other);
            std::optional<Value> old_here = read_cell(m, a);
            MemoryState next = write_cell(m, a, v);
            bindings.insert(bindings.begin(), {a, v});
            if (read_cell(next, a) != std::optional<Value>{v})
                return {false, "write-read law failed at case " + std::to_string(i)};
            if (other != a && read_cell(next, other) != frame_before)
                return {false, "frame law failed at case " + std::to_string(i)};
            if (read_cell(m, a) != old_here)
                return {false, "input state mutated at case " + std::to_string(i)};
            m = next;
        }
    }
    return {true, "10000 cases match the association-list model"};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        CheckResult (*run)();
    };
    const Criterion criteria[] = {
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        CheckResult out = c.run();
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << c.name << ": " << (out.pass ? "PASS" : "FAIL") << "  " << out.detail << "  ["
                  << fmt(secs) << "s]" << std::endl;
        if (!out.pass) ++failures;
    }
    if (failures) std::cout << failures << " criteria failed" << std::endl;
    else std::cout << "all criteria passed" << std::endl;
    return failures;
}
