#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace ptl {

/// Calendar date (UTC), daily resolution. ISO-8601 YYYY-MM-DD on the wire.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    /// Strict "YYYY-MM-DD": four-two-two digits, dashes, nothing else.
    /// nullopt on syntax or calendar violations (2013-02-30, month 13, ...).
    static std::optional<Date> parse(std::string_view text) noexcept;

    bool ok() const noexcept;
    std::string to_string() const;

    friend auto operator<=>(const Date&, const Date&) = default;
};

}  // namespace ptl
