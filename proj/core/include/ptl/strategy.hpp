#pragma once

#include "ptl/market_data.hpp"
#include "ptl/range_detect.hpp"
#include "ptl/tunneling.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptl {

enum class OptionSide { Call, Put };
enum class Outcome { Hit, Expired, Open };

const char* to_string(OptionSide side) noexcept;
const char* to_string(Outcome outcome) noexcept;

inline constexpr double kDefaultTick = 0.01;

/// Trigger rule: transmission above t_threshold AND a volatility fall
/// of at least vol_drop_ratio over the lookback. vol_drop_ratio == 0
/// disables the fall gate (threshold-only triggering).
struct StrategyConfig {
    double t_threshold = 0.95;
    double vol_drop_ratio = 0.30;
    int vol_lookback = 5;
    OptionSide side = OptionSide::Call;

    void validate() const;

    friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

/// A detected short-horizon collapse in implied vol.
struct VolFallEvent {
    Date date;
    double vol_from = 0.0;  ///< lookback maximum
    double vol_to = 0.0;    ///< current mark
    double drop_ratio = 0.0;

    friend bool operator==(const VolFallEvent&, const VolFallEvent&) = default;
};

/// A triggered entry: strike parked at the barrier level, exit one
/// penetration distance beyond it.
struct SignalRecord {
    Date date;
    std::string symbol;
    OptionSide side = OptionSide::Call;
    double strike = 0.0;
    double entry_ref = 0.0;    ///< close at signal time
    double exit_target = 0.0;  ///< resistance + d for calls, support - d for puts
    TunnelEvaluation eval;
    double vol_from = 0.0;
    double vol_to = 0.0;

    friend bool operator==(const SignalRecord&, const SignalRecord&) = default;
};

struct SignalOutcome {
    SignalRecord signal;
    Outcome outcome = Outcome::Open;
    int bars_to_resolve = 0;  ///< bars from signal to hit; 0 unless Hit
    double pnl = 0.0;         ///< underlying-move proxy: barrier-to-exit distance on hits

    friend bool operator==(const SignalOutcome&, const SignalOutcome&) = default;
};

/// Deterministic walk results. Serialization is line-oriented so
/// reports diff and stream cleanly.
struct BacktestReport {
    int bars = 0;
    std::vector<EvaluationRecord> evaluations;
    std::vector<SignalOutcome> signals;

    int hits() const noexcept;
    int expired() const noexcept;
    int open() const noexcept;
    double total_pnl() const noexcept;

    /// One JSON object per signal outcome.
    std::string to_jsonl() const;
    /// Single-row summary: symbol,bars,evaluations,signals,hits,expired,open,total_pnl
    std::string summary_csv(const std::string& symbol) const;

    friend bool operator==(const BacktestReport&, const BacktestReport&) = default;
};

/// Re-evaluate the closed form at every implied-vol change (first point
/// included). NoBarrier outcomes are recorded with the empty-eval
/// marker, never dropped.
std::vector<EvaluationRecord> evaluate_on_vol_change(const std::string& symbol,
                                                     const RangeBound& range, double r,
                                                     std::span<const VolPoint> vols);

/// Fall event iff (max iv over the trailing lookback - current iv) / max
/// >= cfg.vol_drop_ratio. Series shorter than the lookback yields none.
std::optional<VolFallEvent> detect_vol_fall(std::span<const VolPoint> vols,
                                            const StrategyConfig& cfg);

/// Compose the trigger: Tunneling-regime eval (required), T at or above
/// threshold, and a fall event present. The strike snaps to the nearest
/// tick at or inside the barrier level so the level must genuinely be
/// crossed. Returns nothing when any leg of the conjunction fails.
std::optional<SignalRecord> generate_signal(const Date& date, const std::string& symbol,
                                            const RangeBound& range,
                                            const TunnelEvaluation& eval,
                                            const std::optional<VolFallEvent>& fall,
                                            const StrategyConfig& cfg, double close,
                                            double tick = kDefaultTick);

/// Bars a signal has to reach its exit target before it expires.
inline constexpr int kOutcomeHorizonBars = 10;

/// Walk the history: per bar, refresh the trailing-window range,
/// re-evaluate when the carried implied vol changes, emit a signal on
/// the rising edge of the trigger conjunction, then resolve each signal
/// against the next kOutcomeHorizonBars bars. fixed_range bypasses
/// detection (manually supplied levels). Uses only data at or before
/// each bar: truncating the input after bar i never changes what was
/// emitted up to i.
BacktestReport backtest(std::span<const OhlcBar> bars, std::span<const VolPoint> vols,
                        double r, const RangeConfig& range_cfg,
                        const StrategyConfig& strat_cfg,
                        const std::string& symbol = "",
                        std::optional<RangeBound> fixed_range = std::nullopt,
                        double tick = kDefaultTick);

std::string to_json_line(const SignalRecord& signal);
std::string to_json_line(const SignalOutcome& outcome);

}  // namespace ptl
