#include "lexer.hpp"

#include <cctype>

namespace ceg::detail {

std::vector<Line> tokenize(std::string_view text, std::string_view punctuation) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(start, end - start);
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            unsigned char c = static_cast<unsigned char>(raw[i]);
            if (std::isspace(c)) {
                ++i;
                continue;
            }
            if (punctuation.find(raw[i]) != std::string_view::npos) {
                line.tokens.push_back({std::string(1, raw[i]), number, i + 1});
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j])) &&
                   punctuation.find(raw[j]) == std::string_view::npos)
                ++j;
            line.tokens.push_back({std::string(raw.substr(i, j - i)), number, i + 1});
            i = j;
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

}  // namespace ceg::detail
