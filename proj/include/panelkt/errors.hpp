#pragma once

#include <stdexcept>
#include <string>

namespace panelkt {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can map categories onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied malformed or inconsistent input (shapes, files, metadata).
class InputError : public Error {
public:
    using Error::Error;
};

class DimensionError : public InputError {
public:
    using InputError::InputError;
};

class SampleSizeError : public InputError {
public:
    using InputError::InputError;
};

class ParameterError : public InputError {
public:
    using InputError::InputError;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

/// Raised while reading a CSV or config file; carries the 1-based line number.
class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t line)
        : InputError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Two records claim the same cell.
class ConflictError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Numerically degenerate situation: zero median bandwidth, zero-variance
/// column, non-positive null moments, no finite search criterion, ...
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// No grid point produced a finite power criterion.
class SearchError : public DegenerateError {
public:
    using DegenerateError::DegenerateError;
};

}  // namespace panelkt
