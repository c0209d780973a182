#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "cbnlab/ast.hpp"

namespace cbnlab {

struct DiffOptions {
    std::size_t count = 1000;
    std::uint64_t seed = 0;
    std::size_t max_stmts = 30;
    std::size_t max_depth = 4;
    std::size_t encoded_count = 200;
    std::uint64_t max_steps = 1000000;
    /// List-to-nested conversion under test; empty means translate_to_nested.
    /// Injection point for mutation fixtures that must be caught.
    std::function<StmtNPtr(const Program&)> make_nested;
};

struct DiffReport {
    std::size_t cases_run = 0;
    std::size_t exec_mismatches = 0;
    std::size_t roundtrip_failures = 0;
    std::size_t encoded_cases_run = 0;
    std::size_t encoded_mismatches = 0;
    std::string first_counterexample;

    bool ok() const {
        return exec_mismatches == 0 && roundtrip_failures == 0 && encoded_mismatches == 0;
    }
};

DiffReport run_diff(const DiffOptions& opts);

std::string diff_summary(const DiffReport& rep);

} // namespace cbnlab
