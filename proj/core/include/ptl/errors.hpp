#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptl {

/// Raised when an operation requires the tunneling regime but
/// (r/sigma) * width^2 >= 1, i.e. the range width reaches past the
/// turning point sqrt(sigma/r).
class NoBarrierError : public std::domain_error {
public:
    NoBarrierError(double r, double sigma, double width);

    double r() const noexcept { return r_; }
    double sigma() const noexcept { return sigma_; }
    double width() const noexcept { return width_; }

private:
    double r_;
    double sigma_;
    double width_;
};

/// Syntax-level failure while reading a file or stream. Carries the
/// source name plus 1-based line and column of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, std::size_t column,
               const std::string& message);

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string source_;
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed input that violates a domain invariant (high < low,
/// non-positive vol, duplicate dates, ...). line() is 0 when the
/// violation is not tied to a specific input line.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& message, std::size_t line = 0);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Adaptive quadrature failed to meet its tolerance before hitting the
/// refinement-depth cap. The best available estimate is attached.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& message, double best_estimate);

    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

/// Journal I/O or writer-lock failure.
class JournalError : public std::runtime_error {
public:
    explicit JournalError(const std::string& message);
};

}  // namespace ptl
