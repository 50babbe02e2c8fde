#include "ceg/rational.hpp"

#include <cctype>

namespace ceg {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

// cpp_int reads a leading zero as octal, so strip them first.
boost::multiprecision::cpp_int decimal_int(std::string_view s) {
    auto first = s.find_first_not_of('0');
    if (first == std::string_view::npos) return 0;
    return boost::multiprecision::cpp_int(std::string(s.substr(first)));
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
    using boost::multiprecision::cpp_int;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = text.substr(0, slash);
        auto den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        cpp_int d = decimal_int(den);
        if (d == 0) return std::nullopt;
        return Rational(decimal_int(num), d);
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) {
        if (!all_digits(text)) return std::nullopt;
        return Rational(decimal_int(text));
    }
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    if (!whole.empty() && !all_digits(whole)) return std::nullopt;
    if (!all_digits(frac)) return std::nullopt;
    cpp_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    cpp_int digits = decimal_int(std::string(whole) + std::string(frac));
    return Rational(digits, scale);
}

std::string to_string(const Rational& value) {
    auto num = boost::multiprecision::numerator(value);
    auto den = boost::multiprecision::denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace ceg
