#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetgeo {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error while parsing an expression string.
/// Carries the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& what_arg)
        : Error("parse error at byte " + std::to_string(offset) + ": " + what_arg),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Raised by expression evaluation: unbound symbol or numeric domain
/// violation.  The message names the offending subexpression.
class EvalError : public Error {
public:
    using Error::Error;
};

/// Raised by metric construction or pointwise validity checks
/// (asymmetry, loss of positive definiteness, non-positive time metric).
class MetricError : public Error {
public:
    using Error::Error;
};

/// Raised by system builders and spec-file parsing on structural
/// violations (bad shapes, forbidden symbols, unknown keys).
class SpecError : public Error {
public:
    using Error::Error;
};

} // namespace jetgeo
