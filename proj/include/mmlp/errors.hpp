#pragma once

#include <stdexcept>
#include <string>

namespace mmlp {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text; positions are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line(line), column(column) {}
    int line;
    int column;
};

// A configured ceiling (derived facts, Herbrand base size, join steps) was exceeded.
class ResourceLimitError : public Error {
public:
    using Error::Error;
};

// A rule or program does not fit the declared syntactic bias.
class BiasViolationError : public Error {
public:
    using Error::Error;
};

// A rule whose groundings cannot be enumerated against a finite model
// (some variable is not anchored by any body literal).
class UnsafeRuleError : public Error {
public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

} // namespace mmlp
