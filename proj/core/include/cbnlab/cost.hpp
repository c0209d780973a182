#pragma once

#include "cbnlab/ast.hpp"
#include "cbnlab/encode.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cbnlab {

/// Per-level counts for one layer of the interpreter's match structure.
/// A "level" is one stratum of nested pattern matches: level 0 is the
/// statement dispatch, level i+1 collects the matches nested inside the
/// branch bodies of level i.
struct LevelParams {
    std::uint64_t c_nosub = 0;  // branches without nested matches
    std::uint64_t c_sub = 0;    // branches that open another match level
    std::uint64_t es = 0;       // directly evaluable applications
    std::uint64_t ds = 0;       // distinct definition entry points
    std::vector<std::uint64_t> r_counts;  // constructed values, grouped by constructor
    std::vector<std::uint64_t> r_sizes;   // node size of one such construction
    std::uint64_t m_count = 0;  // memory-state terms and memory-helper references
    std::uint64_t a_count = 0;  // address constructors
};

struct StructuralParams {
    std::uint64_t num_stmts = 1;
    std::vector<LevelParams> levels;
    std::uint64_t m_size = 0;
    std::uint64_t program_size = 0;
    std::uint64_t stmt_size = 0;
    std::uint64_t e_r = 0;
    std::uint64_t d_r = 0;
};

inline constexpr std::size_t kMaxCostLevels = 8;

/// num * sum_i (es_i + ds_i + c_nosub_i + r_counts·r_sizes) * P(i) + program_size,
/// where P(i) is the running product of c_sub over shallower levels, P(0) = 1.
/// nullopt on more than kMaxCostLevels levels or a value above 2^63.
std::optional<std::uint64_t> infor_naive(const StructuralParams& p);

/// infor_naive plus (m_count_i + a_count_i) * m_size inside each level term.
std::optional<std::uint64_t> infor_memory_aware(const StructuralParams& p);

/// e_r + d_r + stmt_size; independent of num_stmts and of the level structure.
std::optional<std::uint64_t> infor_opt(const StructuralParams& p);

/// Walks the variant's statement-dispatch match inside defs and counts the
/// formula inputs. num_stmts and program_size are left at the single-statement
/// defaults; callers override them per measured program.
StructuralParams extract_params(const DefEnv& defs, Variant v, const StmtLPtr& sample_stmt);

/// Applies the variant's formula: memory-aware for naive, the plain factorial
/// form at num_stmts = 1 for s1 and s1s2, the optimized form for full.
std::optional<std::uint64_t> predict_peak(const DefEnv& defs, Variant v, std::uint64_t num_stmts,
                                          std::uint64_t program_size, const StmtLPtr& sample_stmt);

struct ComparePoint {
    std::uint64_t predicted = 0;
    std::uint64_t measured = 0;
    double predicted_rank = 0;
    double measured_rank = 0;
};

struct CompareReport {
    double spearman = 0;
    std::vector<ComparePoint> points;
};

/// Spearman rank correlation with average ranks on ties.
/// nullopt unless both lists have the same length >= 3.
std::optional<CompareReport> compare_report(const std::vector<std::uint64_t>& predicted,
                                            const std::vector<std::uint64_t>& measured);

} // namespace cbnlab
