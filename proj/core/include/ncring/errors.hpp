#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncring {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Validation failures: caller supplied something outside an operation's domain.
class ValidationError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConstraintUnsatisfiable : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidGrid : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidInput : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Malformed measurement file. `line()` is 1-based; file-level problems such
/// as too few rows report the last line read (0 for an empty file).
class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string& what)
        : ValidationError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Pipeline failures: input was well-formed but the analysis could not proceed.
class PipelineError : public Error {
public:
    using Error::Error;
};

class InsufficientData : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class PipelineOrderError : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class EstimationFailed : public PipelineError {
public:
    using PipelineError::PipelineError;
};

} // namespace ncring
