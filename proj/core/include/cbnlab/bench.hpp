#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbnlab/encode.hpp"

namespace cbnlab {

struct BenchRow {
    std::size_t n = 0;
    Variant variant = Variant::Naive;
    bool abstract_tail = false;
    std::uint64_t steps = 0;
    std::uint64_t peak_size = 0;
    std::uint64_t working_size = 0;
    std::uint64_t fix_unfolds_outer = 0;
    std::uint64_t delta_unfolds_total = 0;
    std::uint64_t predicted = 0;
    bool budget_exhausted = false;
};

struct BenchOptions {
    std::vector<std::size_t> ns = {5, 10, 20, 40};
    std::vector<Variant> variants = {Variant::Naive, Variant::S1, Variant::S1S2, Variant::Full};
    bool abstract_tail = false;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 1000000;
};

/// Fuel that lets a straight-line program of length n run to completion.
/// Shared-fuel variants walk the statement chain on fuel, so concrete runs get
/// a generous constant and abstract runs get n + 2: just enough to reach the
/// free tail, which keeps the in-branch expression cascade at the stuck
/// statement shallow. The full variant's layers bound nesting, not length, so
/// its fuels stay small and independent of n.
FuelConfig bench_fuel(Variant v, std::size_t n, bool abstract_tail);

BenchRow bench_point(const EncodedInterp& interp, std::size_t n, bool abstract_tail,
                     std::uint64_t seed, std::uint64_t max_steps);

std::vector<BenchRow> run_bench(const BenchOptions& opts);

extern const char* const kBenchCsvHeader;
std::string bench_csv(const std::vector<BenchRow>& rows);

} // namespace cbnlab
