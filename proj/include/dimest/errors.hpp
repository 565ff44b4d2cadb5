#pragma once

#include <stdexcept>
#include <string>

namespace dimest {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// No scale pair on the search grid has a positive gap.
class InfeasiblePlan : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sampler hit its point cap before reaching the requested pair count.
class SamplingCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed point-cloud or manifold-spec input. `line` is 1-based, 0 if unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace dimest
