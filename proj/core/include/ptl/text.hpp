#pragma once

#include <string>
#include <string_view>

namespace ptl {

/// Shortest decimal form that parses back to the identical double.
/// Locale-independent (std::to_chars).
std::string fmt_double(double value);

/// Fixed-precision formatting for human-facing tables, C locale.
std::string fmt_fixed(double value, int digits);

/// Locale-independent full-string double parse. Returns false on
/// trailing garbage, empty input, inf/nan, or overflow.
bool parse_double(std::string_view text, double& out);

/// Full-string non-negative integer parse.
bool parse_int(std::string_view text, int& out);

/// Strip ASCII whitespace from both ends.
std::string_view trim(std::string_view text) noexcept;

}  // namespace ptl
