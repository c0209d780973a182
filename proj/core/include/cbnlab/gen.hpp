#pragma once

#include <cstdint>

#include "cbnlab/ast.hpp"

namespace cbnlab {

/// A generated program; tail_hole marks a trailing free statement variable,
/// representable only once encoded (native evaluation rejects holes).
struct GenProgram {
    Program stmts;
    bool tail_hole = false;
};

struct GenShape {
    enum class Kind { StraightLine, Random, AbstractTail };
    Kind kind = Kind::StraightLine;
    std::size_t n = 0;        // StraightLine / AbstractTail length
    std::size_t depth = 2;    // Random: max nesting
    std::size_t max_len = 8;  // Random: max statements per block

    static GenShape straight_line(std::size_t n) { return {Kind::StraightLine, n, 0, 0}; }
    static GenShape abstract_tail(std::size_t n) { return {Kind::AbstractTail, n, 0, 0}; }
    static GenShape random(std::size_t depth, std::size_t max_len) {
        return {Kind::Random, 0, depth, max_len};
    }
};

/// Deterministic for a given seed.
GenProgram gen_program(std::uint64_t seed, const GenShape& shape);

/// Random well-typed program: reads only definitely-initialized cells, loops
/// terminate by construction, literals stay small. Knows the callable names.
Program gen_checked_program(std::uint64_t seed, std::size_t max_stmts, std::size_t max_depth,
                            const FunTable& funtab);

/// count straight-line function bodies named f0..f{count-1}.
FunTable gen_funtable(std::uint64_t seed, std::size_t count);

} // namespace cbnlab
