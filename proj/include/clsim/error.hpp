#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clsim {

/// Malformed input file. Carries the 1-based line number when one applies.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

/// A raw tag that the tag mapping does not cover.
class UnknownTagError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scorer was asked to run without a resource it needs.
class MissingResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace clsim
