#pragma once

// Shared tokenizer for the line-oriented input formats.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ceg::detail {

struct Token {
    std::string text;
    std::size_t line;
    std::size_t column;
};

struct Line {
    std::size_t number;
    std::vector<Token> tokens;
};

// Splits on whitespace after dropping "#" comments. Characters in
// `punctuation` always form single-character tokens. Blank lines are skipped.
std::vector<Line> tokenize(std::string_view text, std::string_view punctuation = {});

}  // namespace ceg::detail
