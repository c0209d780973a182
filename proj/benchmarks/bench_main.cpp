#include <benchmark/benchmark.h>

#include "cbnlab/bench.hpp"
#include "cbnlab/encode.hpp"
#include "cbnlab/gen.hpp"
#include "cbnlab/interp.hpp"
#include "cbnlab/parser.hpp"

namespace {

using namespace cbnlab;

void BM_native_exec(benchmark::State& state) {
    FunTable funtab = gen_funtable(3, 2);
    Program p = gen_checked_program(3, static_cast<std::size_t>(state.range(0)), 3, funtab);
    Env env{FuelConfig::per_layer(4096, 64, 16), 0, nullptr};
    for (auto _ : state) {
        auto r = exec_list(init_memory(), env, funtab, p);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_native_exec)->Arg(10)->Arg(30);

void BM_parse_roundtrip(benchmark::State& state) {
    Program p = gen_checked_program(5, 30, 3, {});
    std::string text = print_program(p);
    for (auto _ : state) {
        auto r = parse_program(text);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_parse_roundtrip);

void BM_encode_statements(benchmark::State& state) {
    GenProgram gp = gen_program(0, GenShape::straight_line(16));
    for (auto _ : state) {
        TermPtr t = encode_program(gp.stmts, Variant::Full);
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(BM_encode_statements);

void BM_encoded_run(benchmark::State& state, Variant v) {
    EncodedInterp interp = build_interpreter(v, {});
    std::size_t n = static_cast<std::size_t>(state.range(0));
    GenProgram gp = gen_program(0, GenShape::straight_line(n));
    TermPtr prog = encode_program(gp.stmts, v);
    FuelConfig fuel = bench_fuel(v, n, false);
    EncodedRunOptions opts;
    opts.record_size_trace = false;
    for (auto _ : state) {
        EncodedRun r = run_encoded(interp, prog, fuel, init_memory(), opts);
        benchmark::DoNotOptimize(r.result);
    }
}
BENCHMARK_CAPTURE(BM_encoded_run, naive, Variant::Naive)->Arg(4)->Arg(8);
BENCHMARK_CAPTURE(BM_encoded_run, full, Variant::Full)->Arg(4)->Arg(8);

} // namespace

BENCHMARK_MAIN();
