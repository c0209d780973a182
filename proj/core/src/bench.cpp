#include "cbnlab/bench.hpp"

#include <algorithm>
#include <sstream>

#include "cbnlab/cost.hpp"
#include "cbnlab/gen.hpp"

namespace cbnlab {

const char* const kBenchCsvHeader =
    "n,variant,abstract,steps,peak_size,working_size,fix_unfolds_outer,"
    "delta_unfolds_total,predicted";

FuelConfig bench_fuel(Variant v, std::size_t n, bool abstract_tail) {
    if (v == Variant::Full) return FuelConfig::per_layer(8, 8, 4);
    if (abstract_tail) return FuelConfig::shared_fuel(n + 2);
    return FuelConfig::shared_fuel(std::max<std::uint64_t>(128, 2 * n + 8));
}

BenchRow bench_point(const EncodedInterp& interp, std::size_t n, bool abstract_tail,
                     std::uint64_t seed, std::uint64_t max_steps) {
    GenProgram gp = gen_program(
        seed, abstract_tail ? GenShape::abstract_tail(n) : GenShape::straight_line(n));
    TermPtr prog = encode_program(gp.stmts, interp.variant, gp.tail_hole);
    std::uint64_t prog_size = term_size(prog);

    EncodedRunOptions ro;
    ro.max_steps = max_steps;
    ro.scan_memory_events = false;
    ro.nesting_metric = false;
    ro.record_size_trace = false;
    EncodedRun run = run_encoded(interp, prog, bench_fuel(interp.variant, n, abstract_tail),
                                 init_memory(), ro);
    const Metrics& m = run.norm.metrics;

    BenchRow row;
    row.n = n;
    row.variant = interp.variant;
    row.abstract_tail = abstract_tail;
    row.steps = m.steps;
    row.peak_size = m.peak_term_size;
    row.working_size = m.peak_term_size > prog_size ? m.peak_term_size - prog_size : 0;
    auto outer = m.fix_unfolds.find(interp.interp_name);
    row.fix_unfolds_outer = outer == m.fix_unfolds.end() ? 0 : outer->second;
    for (const auto& [name, count] : m.delta_unfolds) row.delta_unfolds_total += count;
    StmtLPtr sample = gp.stmts.empty()
                          ? StmtL::assign(Address{0}, Expr::constant(Value::integer(1)))
                          : gp.stmts.front();
    row.predicted =
        predict_peak(interp.defs, interp.variant, gp.stmts.size(), prog_size, sample).value_or(0);
    row.budget_exhausted = m.budget_exhausted;
    return row;
}

std::vector<BenchRow> run_bench(const BenchOptions& opts) {
    std::vector<BenchRow> rows;
    std::vector<std::size_t> ns = opts.ns;
    std::sort(ns.begin(), ns.end());
    for (Variant v : opts.variants) {
        EncodedInterp interp = build_interpreter(v, {});
        for (std::size_t n : ns)
            rows.push_back(bench_point(interp, n, opts.abstract_tail, opts.seed, opts.max_steps));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const BenchRow& a, const BenchRow& b) { return a.n < b.n; });
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << kBenchCsvHeader << '\n';
    for (const BenchRow& r : rows) {
        out << r.n << ',' << variant_name(r.variant) << ',' << (r.abstract_tail ? 1 : 0) << ','
            << r.steps << ',' << r.peak_size << ',' << r.working_size << ','
            << r.fix_unfolds_outer << ',' << r.delta_unfolds_total << ',' << r.predicted << '\n';
    }
    return out.str();
}

} // namespace cbnlab
