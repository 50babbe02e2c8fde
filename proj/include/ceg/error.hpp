#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ceg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed DSL input; line and column are 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
    }
    std::size_t line_;
    std::size_t column_;
};

// Well-formed input that breaks a model invariant (sum-to-one, partition, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// An operation was called on arguments outside its domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace ceg
