#pragma once

#include "ptl/date.hpp"
#include "ptl/errors.hpp"
#include "ptl/tunneling.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ptl {

/// One daily price bar. Series-level invariants (strictly increasing
/// dates) live in the loaders.
struct OhlcBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;

    friend bool operator==(const OhlcBar&, const OhlcBar&) = default;
};

/// One daily implied-volatility mark, annualized decimal fraction.
struct VolPoint {
    Date date;
    double iv = 0.0;

    friend bool operator==(const VolPoint&, const VolPoint&) = default;
};

/// One closed-form evaluation, journaled. eval is empty when the inputs
/// were outside the tunneling regime (the NoBarrier marker); such rows
/// are recorded, never dropped.
struct EvaluationRecord {
    Date date;
    std::string symbol;
    RangeBound range;
    MarketParams params;
    std::optional<TunnelEvaluation> eval;

    friend bool operator==(const EvaluationRecord&, const EvaluationRecord&) = default;
};

// ---------------------------------------------------------------------------
// CSV formats. Headers are fixed:
//   ohlc: date,open,high,low,close
//   vols: date,iv
// Dates ISO-8601, prices/vols locale-independent decimals.
// ---------------------------------------------------------------------------

/// Parse and validate an OHLC CSV. Result is sorted ascending by date;
/// duplicate dates, inverted high/low, and non-positive lows are
/// rejected. Header-only input is an empty series, not an error.
std::vector<OhlcBar> parse_ohlc_csv(std::string_view text, const std::string& source);
std::vector<OhlcBar> load_ohlc(const std::filesystem::path& path);

std::vector<VolPoint> parse_vols_csv(std::string_view text, const std::string& source);
std::vector<VolPoint> load_vols(const std::filesystem::path& path);

/// Serializers for the same formats, shortest round-trip doubles:
/// parse(to_csv(x)) == x field-for-field.
std::string to_csv(std::span<const OhlcBar> bars);
std::string to_csv(std::span<const VolPoint> vols);

// ---------------------------------------------------------------------------
// Journal line format: one JSON object per line, schema:
//   {"date","symbol","support","resistance","r","sigma","regime",
//    "lambda","u","exponent","t","d"}
// The five numeric evaluation fields are present only when regime is
// not "no_barrier".
// ---------------------------------------------------------------------------

std::string to_json_line(const EvaluationRecord& record);
EvaluationRecord evaluation_record_from_json_line(std::string_view line);

// ---------------------------------------------------------------------------
// Run configuration: "key = value" lines, '#' comments, blank lines ok.
// Unknown keys are rejected.
// ---------------------------------------------------------------------------

struct RunConfig {
    double risk_free_rate = 0.03;
    double t_threshold = 0.95;
    double vol_drop_ratio = 0.30;
    int range_window = 20;
    int range_touch_count = 2;
    double range_tolerance = 0.005;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_run_config(std::string_view text, const std::string& source);
RunConfig load_run_config(const std::filesystem::path& path);

/// Carry-forward fill: the last known mark at or before each bar date.
/// Bars that precede the first mark get no value.
std::vector<std::optional<double>> fill_iv_by_bar(std::span<const OhlcBar> bars,
                                                  std::span<const VolPoint> vols);

}  // namespace ptl
