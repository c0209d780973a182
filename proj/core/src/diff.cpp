#include "cbnlab/diff.hpp"

#include <optional>
#include <sstream>

#include "cbnlab/encode.hpp"
#include "cbnlab/gen.hpp"
#include "cbnlab/interp.hpp"
#include "cbnlab/translate.hpp"

namespace cbnlab {
namespace {

std::string show_memory(const std::optional<MemoryState>& m) {
    return m ? print_memory(*m) : std::string("absent");
}

std::string describe(const char* what, std::size_t idx, const Program& p,
                     const std::string& detail) {
    std::ostringstream out;
    out << what << " at case " << idx << '\n' << print_program(p);
    if (!detail.empty()) out << detail << '\n';
    return out.str();
}

} // namespace

DiffReport run_diff(const DiffOptions& opts) {
    DiffReport rep;
    auto make_nested = opts.make_nested
                           ? opts.make_nested
                           : [](const Program& p) { return translate_to_nested(p); };
    FunTable funtab = gen_funtable(opts.seed, 2);
    Env ample{FuelConfig::per_layer(4096, 64, 16), 0, nullptr};
    MemoryState m0 = init_memory();

    for (std::size_t i = 0; i < opts.count; ++i) {
        Program p = gen_checked_program(opts.seed + i, opts.max_stmts, opts.max_depth, funtab);
        ++rep.cases_run;
        StmtNPtr nested = make_nested(p);

        auto by_list = exec_list(m0, ample, funtab, p);
        auto by_nested = exec_nested(m0, ample, funtab, nested);
        if (by_list.has_value() != by_nested.has_value() || (by_list && *by_list != *by_nested)) {
            ++rep.exec_mismatches;
            if (rep.first_counterexample.empty())
                rep.first_counterexample =
                    describe("nested and list execution disagree", i, p,
                             "list:   " + show_memory(by_list) +
                                 "\nnested: " + show_memory(by_nested));
        }

        TranslateResult back = translate_to_list(nested);
        bool round_ok = back.program.has_value() && equal(*back.program, p);
        StmtNPtr canon = canonicalize(nested);
        bool canon_ok = equal(canon, canonicalize(canon));
        if (!round_ok || !canon_ok) {
            ++rep.roundtrip_failures;
            if (rep.first_counterexample.empty()) {
                std::string detail = back.program
                                         ? "came back as:\n" + print_program(*back.program)
                                         : "translate_to_list failed: " + back.error;
                rep.first_counterexample = describe(
                    round_ok ? "canonicalize is not idempotent" : "round trip changed the program",
                    i, p, detail);
            }
        }
    }

    if (opts.encoded_count > 0) {
        EncodedInterp full = build_interpreter(Variant::Full, funtab);
        FuelConfig fuel = FuelConfig::per_layer(16, 16, 4);
        Env small{fuel, 0, nullptr};
        for (std::size_t i = 0; i < opts.encoded_count; ++i) {
            Program p = gen_checked_program(opts.seed + 7777 + i, 8, 2, funtab);
            ++rep.encoded_cases_run;
            EncodedRunOptions ro;
            ro.max_steps = opts.max_steps;
            ro.record_size_trace = false;
            EncodedRun run =
                run_encoded(full, encode_program(p, Variant::Full), fuel, m0, ro);
            auto native = exec_list(m0, small, funtab, p);
            bool agrees = run.result.has_value() &&
                          run.result->has_value() == native.has_value() &&
                          (!native || **run.result == *native);
            if (!agrees) {
                ++rep.encoded_mismatches;
                if (rep.first_counterexample.empty()) {
                    std::string enc = !run.result.has_value()
                                          ? std::string("not a memory-option normal form")
                                          : show_memory(*run.result);
                    rep.first_counterexample =
                        describe("encoded full run disagrees with native", i, p,
                                 "native:  " + show_memory(native) + "\nencoded: " + enc);
                }
            }
        }
    }
    return rep;
}

std::string diff_summary(const DiffReport& rep) {
    std::ostringstream out;
    out << "cases=" << rep.cases_run << " exec_mismatches=" << rep.exec_mismatches
        << " roundtrip_failures=" << rep.roundtrip_failures
        << " encoded_cases=" << rep.encoded_cases_run
        << " encoded_mismatches=" << rep.encoded_mismatches << '\n';
    if (!rep.ok()) out << rep.first_counterexample;
    out << (rep.ok() ? "PASS" : "FAIL") << '\n';
    return out.str();
}

} // namespace cbnlab
