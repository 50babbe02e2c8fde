#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace ceg {

using Rational = boost::multiprecision::cpp_rational;

// Accepts "3", "0.25", ".5" and "2/7". Signs and exponents are rejected.
std::optional<Rational> parse_rational(std::string_view text);

// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& value);

}  // namespace ceg
