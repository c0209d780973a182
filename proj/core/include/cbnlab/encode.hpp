#pragma once

#include "cbnlab/ast.hpp"
#include "cbnlab/engine.hpp"
#include "cbnlab/interp.hpp"
#include "cbnlab/memory.hpp"
#include "cbnlab/term.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cbnlab {

enum class Variant { Naive, S1, S1S2, Full };

const char* variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view s);

TermPtr encode_bit(bool b);
TermPtr encode_bits(std::int64_t x);  // kIntBits bits, least significant first
TermPtr encode_word(std::int64_t x);
std::optional<std::int64_t> decode_word(const TermPtr& t);

TermPtr encode_value(const Value& v);
std::optional<Value> decode_value(const TermPtr& t);

TermPtr encode_cell(const std::optional<Value>& c);
TermPtr encode_memory(const MemoryState& m);
std::optional<MemoryState> decode_memory(const TermPtr& t);
// outer nullopt: not a normal option-memory term; inner nullopt: the none case
std::optional<std::optional<MemoryState>> decode_memory_option(const TermPtr& t);

TermPtr encode_peano(std::uint64_t n);
TermPtr encode_address(Address a);
TermPtr encode_expr(const ExprPtr& e);
TermPtr encode_stmt_list(const StmtLPtr& s);
TermPtr encode_program_list(const Program& p, bool free_tail = false,
                            const std::string& tail_name = "rest_hole");
TermPtr encode_stmt_nested(const StmtNPtr& s);
TermPtr encode_program_nested(const Program& p, bool free_tail = false,
                              const std::string& tail_name = "rest_hole");

struct EncodedInterp {
    Variant variant;
    DefEnv defs;
    std::string interp_name;
    std::vector<std::string> expr_layer_prefixes;
};

EncodedInterp build_interpreter(Variant v, const FunTable& funtab);

// encodes the program in the form the variant consumes (nested for naive,
// list otherwise) and applies the interpreter to it
TermPtr encode_program(const Program& p, Variant v, bool free_tail = false);
TermPtr build_application(const EncodedInterp& interp, const TermPtr& program_term,
                          const FuelConfig& fuel, const MemoryState& m0);

struct EncodedRunOptions {
    std::uint64_t max_steps = 1000000;
    bool scan_memory_events = false;
    bool nesting_metric = false;
    std::uint64_t nesting_sample_every = 8;
    bool record_size_trace = true;
    bool record_rules = false;
    std::function<void(const StepEvent&)> on_step;
};

struct EncodedRun {
    NormalizeResult norm;
    std::vector<std::uint64_t> memory_nf_events;
    std::uint64_t peak_nesting_pre_first_event = 0;
    std::optional<std::optional<MemoryState>> result;
};

EncodedRun run_encoded(const EncodedInterp& interp, const TermPtr& program_term,
                       const FuelConfig& fuel, const MemoryState& m0,
                       const EncodedRunOptions& opts = {});

/// If(true, [Throw], else-hole) followed by a free statement tail, in the form
/// the variant consumes.
TermPtr example1_program(Variant v);

// nodes sitting inside match branch bodies, counted once per distinct match node
std::uint64_t match_branch_nodes(const TermPtr& t);

// in-branch fix unfolds charged to the interpreter's expression layer
std::uint64_t expr_layer_in_branch_unfolds(const EncodedInterp& interp, const Metrics& m);

// deepest chain of interpreter applications nested in argument positions
std::uint32_t interp_nesting(const TermPtr& t, const std::string& interp_name);

} // namespace cbnlab
