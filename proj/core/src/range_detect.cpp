#include "ptl/range_detect.hpp"

#include <algorithm>
#include <stdexcept>

namespace ptl {

namespace {

bool strictly_monotone_closes(std::span<const OhlcBar> window) {
    bool increasing = true;
    bool decreasing = true;
    for (std::size_t i = 1; i < window.size(); ++i) {
        increasing = increasing && window[i].close > window[i - 1].close;
        decreasing = decreasing && window[i].close < window[i - 1].close;
    }
    return increasing || decreasing;
}

}  // namespace

void RangeConfig::validate() const {
    if (touch_count < 2) {
        throw std::invalid_argument("touch_count must be >= 2");
    }
    if (window < 2 * touch_count) {
        throw std::invalid_argument("window must be >= 2 * touch_count");
    }
    if (!(tolerance > 0.0 && tolerance < 0.05)) {
        throw std::invalid_argument("tolerance must lie in (0, 0.05)");
    }
}

const char* to_string(NoRangeReason reason) noexcept {
    switch (reason) {
        case NoRangeReason::Trending: return "trending";
        case NoRangeReason::InsufficientTouches: return "insufficient_touches";
        case NoRangeReason::BreachedWindow: return "breached_window";
    }
    return "unknown";
}

RangeDetection detect_range(std::span<const OhlcBar> bars, const RangeConfig& cfg) {
    cfg.validate();
    if (bars.size() < static_cast<std::size_t>(cfg.window)) {
        throw std::invalid_argument("series shorter than the detection window");
    }
    const auto window = bars.subspan(bars.size() - static_cast<std::size_t>(cfg.window));

    double resistance = window[0].high;
    double support = window[0].low;
    for (const auto& bar : window) {
        resistance = std::max(resistance, bar.high);
        support = std::min(support, bar.low);
    }
    // Degenerate flat window: no width, nothing to trade.
    if (!(resistance > support)) {
        return {std::nullopt, NoRangeReason::BreachedWindow};
    }

    int high_touches = 0;
    int low_touches = 0;
    bool breached = false;
    for (const auto& bar : window) {
        if (resistance - bar.high <= cfg.tolerance * resistance) {
            ++high_touches;
        }
        if (bar.low - support <= cfg.tolerance * support) {
            ++low_touches;
        }
        breached = breached || bar.close > resistance || bar.close < support;
    }
    if (breached) {
        return {std::nullopt, NoRangeReason::BreachedWindow};
    }
    if (high_touches < cfg.touch_count || low_touches < cfg.touch_count) {
        const auto reason = strictly_monotone_closes(window)
                                ? NoRangeReason::Trending
                                : NoRangeReason::InsufficientTouches;
        return {std::nullopt, reason};
    }
    return {RangeBound(support, resistance), NoRangeReason::InsufficientTouches};
}

double range_width(const RangeBound& range) noexcept {
    return range.width();
}

}  // namespace ptl
