#include "ptl/errors.hpp"

namespace ptl {

namespace {

std::string location_prefix(const std::string& source, std::size_t line,
                            std::size_t column) {
    return source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": ";
}

}  // namespace

NoBarrierError::NoBarrierError(double r, double sigma, double width)
    : std::domain_error("not in tunneling regime: K >= sqrt(sigma/r)"),
      r_(r),
      sigma_(sigma),
      width_(width) {}

ParseError::ParseError(std::string source, std::size_t line, std::size_t column,
                       const std::string& message)
    : std::runtime_error(location_prefix(source, line, column) + message),
      source_(std::move(source)),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(const std::string& message, std::size_t line)
    : std::runtime_error(line == 0 ? message
                                   : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

QuadratureError::QuadratureError(const std::string& message, double best_estimate)
    : std::runtime_error(message), best_estimate_(best_estimate) {}

JournalError::JournalError(const std::string& message) : std::runtime_error(message) {}

}  // namespace ptl
