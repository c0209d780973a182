#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cbnlab/ast.hpp"
#include "cbnlab/memory.hpp"

namespace cbnlab {

/// Fuel counters per semantic layer. With shared=true everything draws from
/// k_stt and the other two are ignored. Fuel copies downward (it bounds
/// recursion depth and loop turns, it is never threaded back up).
struct FuelConfig {
    std::uint64_t k_stt = 64;
    std::uint64_t k_expr = 32;
    std::uint64_t k_fun = 8;
    bool shared = false;

    static FuelConfig shared_fuel(std::uint64_t k) { return {k, 0, 0, true}; }
    static FuelConfig per_layer(std::uint64_t s, std::uint64_t e, std::uint64_t f) {
        return {s, e, f, false};
    }
};

struct Env {
    FuelConfig fuel;
    std::uint64_t scope_id = 0;
    const Env* parent = nullptr;
};

enum class OutcomeKind { Normal, Error, OutOfFuel };

struct Outcome {
    OutcomeKind kind = OutcomeKind::Normal;
    std::string message;
};

const char* outcome_name(OutcomeKind k);

/// Expression evaluation under a fuel budget. k is spent once per node entry
/// and copies down to the children. Absent on fuel exhaustion, operand type
/// mismatch or an uninitialized read.
std::optional<Value> eval_expr(const MemoryState& m, const Env& env, const ExprPtr& e,
                               std::uint64_t k);

/// Big-step evaluation of the nested form. Absent covers both error and
/// out-of-fuel; run_program keeps them apart.
std::optional<MemoryState> exec_nested(const MemoryState& m0, const Env& env,
                                       const FunTable& funtab, const StmtNPtr& s);

/// Big-step evaluation of the list form (head first, then the tail on the
/// produced state).
std::optional<MemoryState> exec_list(const MemoryState& m0, const Env& env,
                                     const FunTable& funtab, const Program& p);

struct RunResult {
    Outcome outcome;
    MemoryState memory;  // reverted to the initial snapshot on throw/error/out-of-fuel
};

RunResult run_program(const Program& p, const FuelConfig& fuel, const FunTable& funtab);
RunResult run_program(const StmtNPtr& s, const FuelConfig& fuel, const FunTable& funtab);

/// Detailed variants used where Error and OutOfFuel must be told apart.
struct ExecDetail {
    OutcomeKind kind = OutcomeKind::Normal;
    MemoryState memory;
    std::string message;
};

ExecDetail exec_nested_detail(const MemoryState& m0, const FuelConfig& fuel,
                              const FunTable& funtab, const StmtNPtr& s);
ExecDetail exec_list_detail(const MemoryState& m0, const FuelConfig& fuel, const FunTable& funtab,
                            const Program& p);

} // namespace cbnlab
