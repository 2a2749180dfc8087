#pragma once

#include "ptl/date.hpp"
#include "ptl/market_data.hpp"
#include "ptl/tunneling.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace ptl::testing {

inline Date next_day(Date d) {
    const bool leap = (d.year % 4 == 0 && d.year % 100 != 0) || d.year % 400 == 0;
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const int dim = (d.month == 2 && leap) ? 29 : kDays[d.month - 1];
    if (d.day < dim) {
        return {d.year, d.month, d.day + 1};
    }
    if (d.month < 12) {
        return {d.year, d.month + 1, 1};
    }
    return {d.year + 1, 1, 1};
}

inline Date plus_days(Date d, int n) {
    for (int i = 0; i < n; ++i) {
        d = next_day(d);
    }
    return d;
}

/// Oscillating range-bound bars: exact touches of both levels every
/// four bars, all opens/closes strictly inside. A 20-bar window gets
/// five touches per side.
inline std::vector<OhlcBar> make_range_bars(double support, double resistance, int count,
                                            Date start = {2013, 1, 10}) {
    const double mid = (support + resistance) / 2.0;
    const double quarter = (resistance - support) / 4.0;
    std::vector<OhlcBar> bars;
    bars.reserve(static_cast<std::size_t>(count));
    Date date = start;
    for (int i = 0; i < count; ++i) {
        OhlcBar bar;
        bar.date = date;
        switch (i % 4) {
            case 0:  // tags the resistance
                bar = {date, mid, resistance, mid - quarter, mid + quarter};
                break;
            case 1:
                bar = {date, mid + quarter, mid + quarter, mid - quarter, mid};
                break;
            case 2:  // tags the support
                bar = {date, mid, mid + quarter, support, mid - quarter};
                break;
            default:
                bar = {date, mid - quarter, mid + quarter, mid - quarter, mid};
                break;
        }
        bars.push_back(bar);
        date = next_day(date);
    }
    return bars;
}

/// Upward breakout bar: opens inside the range, closes well above
/// resistance.
inline OhlcBar make_breakout_bar(Date date, double support, double resistance) {
    const double w = resistance - support;
    return {date, resistance - 0.1 * w, resistance + 0.8 * w, resistance - 0.2 * w,
            resistance + 0.7 * w};
}

/// Downward breakout (for the put side).
inline OhlcBar make_breakdown_bar(Date date, double support, double resistance) {
    const double w = resistance - support;
    return {date, support + 0.1 * w, support + 0.2 * w, support - 0.8 * w,
            support - 0.7 * w};
}

inline std::vector<VolPoint> make_vols(std::initializer_list<std::pair<Date, double>> points) {
    std::vector<VolPoint> vols;
    for (const auto& [date, iv] : points) {
        vols.push_back({date, iv});
    }
    return vols;
}

/// Scratch directory under the system temp root, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("ptl_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        const auto file = path_ / name;
        std::ofstream out(file, std::ios::binary);
        out << content;
        return file;
    }

private:
    std::filesystem::path path_;
};

// --- deterministic random generators for property tests ---

/// Tunneling-regime parameter triples: width strictly inside (0, s_star).
struct RandomTunnelingSpec {
    double r;
    double sigma;
    double width;
};

inline RandomTunnelingSpec random_tunneling_spec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> r_dist(0.005, 0.12);
    std::uniform_real_distribution<double> sigma_dist(0.08, 1.2);
    std::uniform_real_distribution<double> frac_dist(0.05, 0.98);
    const double r = r_dist(rng);
    const double sigma = sigma_dist(rng);
    const double width = frac_dist(rng) * std::sqrt(sigma / r);
    return {r, sigma, width};
}

inline std::vector<OhlcBar> random_ohlc_series(std::mt19937_64& rng, int max_len = 40) {
    std::uniform_int_distribution<int> len_dist(0, max_len);
    std::uniform_real_distribution<double> base_dist(5.0, 500.0);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const int n = len_dist(rng);
    const double base = base_dist(rng);
    std::vector<OhlcBar> bars;
    Date date{2013, 1, 2};
    for (int i = 0; i < n; ++i) {
        const double low = base * (0.8 + 0.2 * frac(rng));
        const double high = low * (1.0 + 0.1 * frac(rng));
        const double open = low + (high - low) * frac(rng);
        const double close = low + (high - low) * frac(rng);
        bars.push_back({date, open, high, low, close});
        date = plus_days(date, 1 + static_cast<int>(frac(rng) * 3));
    }
    return bars;
}

inline std::vector<VolPoint> random_vol_series(std::mt19937_64& rng, int max_len = 40) {
    std::uniform_int_distribution<int> len_dist(0, max_len);
    std::uniform_real_distribution<double> iv_dist(0.05, 1.5);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const int n = len_dist(rng);
    std::vector<VolPoint> vols;
    Date date{2013, 1, 2};
    for (int i = 0; i < n; ++i) {
        vols.push_back({date, iv_dist(rng)});
        date = plus_days(date, 1 + static_cast<int>(frac(rng) * 3));
    }
    return vols;
}

}  // namespace ptl::testing
