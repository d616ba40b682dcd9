#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvkit {

/// Base class for all curvkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (expressions, chart files). Carries the byte offset
/// of the offending token within the source string.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation outside the domain of a function (log of a nonpositive value,
/// division by zero, pow of a nonpositive base, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Metric matrix not invertible at the evaluation point.
class SingularMetricError : public Error {
public:
    using Error::Error;
};

} // namespace curvkit
