#pragma once

#include <optional>
#include <string>

#include "cbnlab/ast.hpp"

namespace cbnlab {

struct TranslateResult {
    std::optional<Program> program;
    std::string error;  // nonempty iff !program

    explicit operator bool() const { return program.has_value(); }
};

/// Flattens a right-nested Seq spine into a statement list, recursing into
/// If/While sub-blocks. Snil maps to the empty list; a trailing non-Snil
/// statement maps to a singleton. Fails on a Seq in head position.
TranslateResult translate_to_list(const StmtNPtr& s);

/// Right-folds the list with Seq, terminating in Snil. Total.
StmtNPtr translate_to_nested(const Program& p);

/// Reassociates Seq chains to right-nested, Snil-terminated form (also in
/// If/While children). Idempotent; semantics-preserving.
StmtNPtr canonicalize(const StmtNPtr& s);

} // namespace cbnlab
