#pragma once

#include "ptl/market_data.hpp"
#include "ptl/tunneling.hpp"

#include <optional>
#include <span>

namespace ptl {

/// Trailing-window extrema detection with touch-count confirmation.
struct RangeConfig {
    int window = 20;           ///< lookback length in bars
    int touch_count = 2;       ///< minimum touches per side
    double tolerance = 0.005;  ///< relative band for counting a touch

    /// window >= 2 * touch_count, touch_count >= 2, tolerance in (0, 0.05).
    void validate() const;

    friend bool operator==(const RangeConfig&, const RangeConfig&) = default;
};

enum class NoRangeReason {
    Trending,             ///< closes march monotonically through the window
    InsufficientTouches,  ///< a side was not confirmed touch_count times
    BreachedWindow,       ///< a close escaped the levels, or the window is degenerate
};

const char* to_string(NoRangeReason reason) noexcept;

/// Either a confirmed RangeBound or the reason there is none.
struct RangeDetection {
    std::optional<RangeBound> range;
    NoRangeReason reason = NoRangeReason::InsufficientTouches;  // meaningful when !range
};

/// Examine the trailing cfg.window bars: resistance = max high,
/// support = min low; confirmed only if each side is touched at least
/// cfg.touch_count times within the relative tolerance band and no
/// close escapes the levels. Bars before the trailing window never
/// influence the result. Throws std::invalid_argument when the series
/// is shorter than the window.
RangeDetection detect_range(std::span<const OhlcBar> bars, const RangeConfig& cfg);

/// resistance - support. Positive by RangeBound construction.
double range_width(const RangeBound& range) noexcept;

}  // namespace ptl
