#pragma once

#include <array>

namespace ptl::tools {

/// Built-in cross-check set: four documented 2013 range-bound breakout
/// episodes with the rate, implied vol, range width, and the recorded
/// transmission coefficient and penetration distance for each.
struct ReferenceRow {
    const char* symbol;
    const char* window;
    double r;
    double sigma;
    double width;
    double t_recorded;
    double d_recorded;
};

inline constexpr std::array<ReferenceRow, 4> kReferenceRows = {{
    {"LNKD", "2013-02-07..2013-02-08", 0.03, 0.47, 3.90, 0.998675, 0.058114},
    {"GOOG", "2013-01-22..2013-01-23", 0.03, 0.15, 2.10, 0.95, 0.136068},
    {"HUM", "2013-03-28..2013-04-02", 0.03, 0.31, 3.13, 0.9948, 0.08455},
    {"NFLX", "2013-01-23..2013-01-24", 0.03, 0.55, 3.36, 0.933, 0.921744},
}};

}  // namespace ptl::tools
