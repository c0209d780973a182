#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cbnlab/ast.hpp"

namespace cbnlab {

struct ParseError {
    std::size_t line = 0;
    std::size_t col = 0;
    std::string message;

    std::string to_string() const {
        return std::to_string(line) + ":" + std::to_string(col) + ": " + message;
    }
};

struct ParseResult {
    std::optional<Program> program;
    std::optional<ParseError> error;

    explicit operator bool() const { return program.has_value(); }
};

/// Parses whitespace-insensitive s-expressions into list-form statements.
/// "(skip)" contributes nothing; a file of blanks is the empty program.
ParseResult parse_program(std::string_view text);

} // namespace cbnlab
