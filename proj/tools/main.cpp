#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cbnlab/bench.hpp"
#include "cbnlab/diff.hpp"
#include "cbnlab/encode.hpp"
#include "cbnlab/gen.hpp"
#include "cbnlab/interp.hpp"
#include "cbnlab/parser.hpp"

namespace {

using namespace cbnlab;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct FuelFlags {
    std::uint64_t stt = 64;
    std::uint64_t expr = 32;
    std::uint64_t fun = 8;
    bool shared = false;

    FuelConfig config() const {
        return shared ? FuelConfig::shared_fuel(stt) : FuelConfig::per_layer(stt, expr, fun);
    }
};

void add_fuel_flags(CLI::App* cmd, FuelFlags& f) {
    cmd->add_option("--fuel-stt", f.stt, "statement-layer fuel");
    cmd->add_option("--fuel-expr", f.expr, "expression-layer fuel");
    cmd->add_option("--fuel-fun", f.fun, "function-layer fuel");
    cmd->add_flag("--shared-fuel", f.shared, "draw every layer from --fuel-stt");
}

int cmd_run(const std::string& file, const FuelFlags& fuel) {
    auto text = read_file(file);
    if (!text) {
        std::cerr << "cannot read " << file << "\n";
        return 2;
    }
    ParseResult pr = parse_program(*text);
    if (!pr) {
        std::cerr << file << ":" << pr.error->to_string() << "\n";
        return 2;
    }
    RunResult r = run_program(*pr.program, fuel.config(), {});
    std::cout << "outcome=" << outcome_name(r.outcome.kind);
    if (!r.outcome.message.empty()) std::cout << " (" << r.outcome.message << ")";
    std::cout << "\n" << print_memory(r.memory) << "\n";
    return r.outcome.kind == OutcomeKind::Normal ? 0 : 1;
}

int cmd_simulate(const std::string& file, const std::string& variant_name_s, const FuelFlags& fuel,
                 std::uint64_t max_steps, std::uint64_t seed, std::size_t max_stmts,
                 bool abstract_tail, const std::string& trace_path) {
    auto v = parse_variant(variant_name_s);
    if (!v) {
        std::cerr << "unknown variant '" << variant_name_s << "'\n";
        return 2;
    }
    TermPtr prog;
    if (!file.empty()) {
        auto text = read_file(file);
        if (!text) {
            std::cerr << "cannot read " << file << "\n";
            return 2;
        }
        ParseResult pr = parse_program(*text);
        if (!pr) {
            std::cerr << file << ":" << pr.error->to_string() << "\n";
            return 2;
        }
        prog = encode_program(*pr.program, *v);
    } else {
        GenProgram gp = gen_program(seed, abstract_tail ? GenShape::abstract_tail(max_stmts)
                                                        : GenShape::straight_line(max_stmts));
        prog = encode_program(gp.stmts, *v, gp.tail_hole);
    }

    EncodedInterp interp = build_interpreter(*v, {});
    std::ofstream trace;
    EncodedRunOptions ro;
    ro.max_steps = max_steps;
    ro.record_size_trace = false;
    if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) {
            std::cerr << "cannot write " << trace_path << "\n";
            return 2;
        }
        ro.on_step = [&trace](const StepEvent& ev) {
            trace << ev.step << '\t' << rule_name(ev.tag) << '\t' << ev.term_size_after << '\n';
        };
    }
    EncodedRun run = run_encoded(interp, prog, fuel.config(), init_memory(), ro);

    const Metrics& m = run.norm.metrics;
    std::uint64_t prog_size = term_size(prog);
    std::uint64_t fix_total = 0;
    std::uint64_t delta_total = 0;
    for (const auto& [name, c] : m.fix_unfolds) fix_total += c;
    for (const auto& [name, c] : m.delta_unfolds) delta_total += c;
    auto outer = m.fix_unfolds.find(interp.interp_name);
    std::cout << "variant=" << variant_name(*v) << "\n"
              << "steps=" << m.steps << "\n"
              << "peak_size=" << m.peak_term_size << "\n"
              << "working_size="
              << (m.peak_term_size > prog_size ? m.peak_term_size - prog_size : 0) << "\n"
              << "fix_unfolds_outer=" << (outer == m.fix_unfolds.end() ? 0 : outer->second) << "\n"
              << "fix_unfolds_total=" << fix_total << "\n"
              << "delta_unfolds_total=" << delta_total << "\n"
              << "expr_fix_unfolds_in_branches=" << expr_layer_in_branch_unfolds(interp, m) << "\n";
    if (!run.result) std::cout << "result=stuck\n";
    else if (!*run.result) std::cout << "result=none\n";
    else std::cout << "result=" << print_memory(**run.result) << "\n";
    if (m.budget_exhausted) {
        std::cout << "budget_exhausted=1\n";
        return 3;
    }
    return 0;
}

int cmd_bench(const std::vector<std::size_t>& sweep, const std::vector<std::string>& variant_names,
              bool abstract_tail, std::uint64_t seed, std::uint64_t max_steps,
              const std::string& out_path) {
    if (sweep.empty()) {
        std::cerr << "--sweep needs at least one program length\n";
        return 2;
    }
    BenchOptions opts;
    opts.ns = sweep;
    opts.variants.clear();
    for (const auto& s : variant_names) {
        auto v = parse_variant(s);
        if (!v) {
            std::cerr << "unknown variant '" << s << "'\n";
            return 2;
        }
        opts.variants.push_back(*v);
    }
    opts.abstract_tail = abstract_tail;
    opts.seed = seed;
    opts.max_steps = max_steps;

    std::vector<BenchRow> rows = run_bench(opts);
    std::string csv = bench_csv(rows);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return 2;
        }
        out << csv;
    }
    for (const auto& r : rows)
        if (r.budget_exhausted) return 3;
    return 0;
}

int cmd_diff(std::size_t count, std::uint64_t seed, std::size_t max_stmts,
             std::uint64_t max_steps) {
    DiffOptions opts;
    opts.count = count;
    opts.seed = seed;
    opts.max_stmts = max_stmts;
    opts.max_steps = max_steps;
    DiffReport rep = run_diff(opts);
    std::cout << diff_summary(rep);
    return rep.ok() ? 0 : 1;
}

int cmd_example1(std::uint64_t max_steps) {
    EncodedRunOptions ro;
    ro.max_steps = max_steps;
    ro.record_size_trace = false;
    EncodedInterp naive = build_interpreter(Variant::Naive, {});
    EncodedInterp full = build_interpreter(Variant::Full, {});
    EncodedRun rn = run_encoded(naive, example1_program(Variant::Naive), FuelConfig::shared_fuel(4),
                                init_memory(), ro);
    EncodedRun rf = run_encoded(full, example1_program(Variant::Full),
                                FuelConfig::per_layer(4, 4, 2), init_memory(), ro);

    auto report = [](const char* name, const EncodedRun& r) {
        std::cout << name << ": steps=" << r.norm.metrics.steps
                  << " peak_size=" << r.norm.metrics.peak_term_size
                  << " stuck_size=" << term_size(r.norm.term)
                  << " match_branch_nodes=" << match_branch_nodes(r.norm.term) << "\n";
    };
    report("naive", rn);
    report("full", rf);

    std::uint64_t np = rn.norm.metrics.peak_term_size;
    std::uint64_t fp = std::max<std::uint64_t>(1, rf.norm.metrics.peak_term_size);
    std::uint64_t ns = rn.norm.metrics.steps;
    std::uint64_t fs = std::max<std::uint64_t>(1, rf.norm.metrics.steps);
    std::cout << std::fixed << std::setprecision(2);
    std::cout << "peak_ratio=" << (double(np) / double(fp)) << " (" << np << "/" << fp << ")\n";
    std::cout << "step_ratio=" << (double(ns) / double(fs)) << " (" << ns << "/" << fs << ")\n";
    if (double(np) / double(fp) < 10.0) {
        std::cout << "FAIL: peak size ratio below 10\n";
        return 1;
    }
    std::cout << "PASS\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mini-language lab: native runs, encoded interpreter simulations, benchmarks"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "parse and execute a program natively");
    std::string run_file;
    FuelFlags run_fuel;
    run->add_option("file", run_file, "program file")->required();
    add_fuel_flags(run, run_fuel);

    auto* sim = app.add_subcommand("simulate", "run an encoded interpreter and report metrics");
    std::string sim_file;
    std::string sim_variant;
    std::string sim_trace;
    FuelFlags sim_fuel;
    std::uint64_t sim_steps = 1000000;
    std::uint64_t sim_seed = 0;
    std::size_t sim_stmts = 4;
    bool sim_abstract = false;
    sim->add_option("file", sim_file, "program file (generated when omitted)");
    sim->add_option("--variant", sim_variant, "naive|s1|s1s2|full")->required();
    add_fuel_flags(sim, sim_fuel);
    sim->add_option("--max-steps", sim_steps, "reduction step budget");
    sim->add_option("--seed", sim_seed, "generator seed");
    sim->add_option("--max-stmts", sim_stmts, "generated program length");
    sim->add_flag("--abstract", sim_abstract, "generated program ends in a free statement tail");
    sim->add_option("--trace", sim_trace, "write per-step trace lines: step, rule, term size");

    auto* ben = app.add_subcommand("bench", "sweep encoded runs into CSV rows");
    std::vector<std::size_t> ben_sweep{5, 10, 20, 40};
    std::vector<std::string> ben_variants{"naive", "s1", "s1s2", "full"};
    bool ben_abstract = false;
    std::uint64_t ben_seed = 0;
    std::uint64_t ben_steps = 1000000;
    std::string ben_out;
    ben->add_option("--sweep", ben_sweep, "comma-separated program lengths")->delimiter(',');
    ben->add_option("--variant", ben_variants, "comma-separated variants")->delimiter(',');
    ben->add_flag("--abstract", ben_abstract, "programs end in a free statement tail");
    ben->add_option("--seed", ben_seed, "generator seed");
    ben->add_option("--max-steps", ben_steps, "reduction step budget per run");
    ben->add_option("--out", ben_out, "CSV path (stdout when omitted)");

    auto* dif = app.add_subcommand("diff", "differential fuzzing of the two sequence forms");
    std::size_t dif_count = 1000;
    std::uint64_t dif_seed = 0;
    std::size_t dif_stmts = 30;
    std::uint64_t dif_steps = 1000000;
    dif->add_option("--count", dif_count, "random programs to check");
    dif->add_option("--seed", dif_seed, "generator seed");
    dif->add_option("--max-stmts", dif_stmts, "statements per generated program");
    dif->add_option("--max-steps", dif_steps, "encoded-run step budget");

    auto* ex1 = app.add_subcommand("example1", "if-throw with a quantified tail: naive vs full");
    std::uint64_t ex1_steps = 1000000;
    ex1->add_option("--max-steps", ex1_steps, "reduction step budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (run->parsed()) return cmd_run(run_file, run_fuel);
    if (sim->parsed())
        return cmd_simulate(sim_file, sim_variant, sim_fuel, sim_steps, sim_seed, sim_stmts,
                            sim_abstract, sim_trace);
    if (ben->parsed())
        return cmd_bench(ben_sweep, ben_variants, ben_abstract, ben_seed, ben_steps, ben_out);
    if (dif->parsed()) return cmd_diff(dif_count, dif_seed, dif_stmts, dif_steps);
    if (ex1->parsed()) return cmd_example1(ex1_steps);
    return 2;
}
