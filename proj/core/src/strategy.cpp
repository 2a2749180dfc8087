#include "ptl/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "ptl/text.hpp"

namespace ptl {

namespace {

using json = nlohmann::ordered_json;

constexpr double kTickSnapEps = 1e-9;

double snap_down_to_tick(double level, double tick) {
    return std::floor(level / tick + kTickSnapEps) * tick;
}

double snap_up_to_tick(double level, double tick) {
    return std::ceil(level / tick - kTickSnapEps) * tick;
}

json signal_to_json(const SignalRecord& signal) {
    json obj;
    obj["date"] = signal.date.to_string();
    obj["symbol"] = signal.symbol;
    obj["side"] = to_string(signal.side);
    obj["strike"] = signal.strike;
    obj["entry_ref"] = signal.entry_ref;
    obj["exit_target"] = signal.exit_target;
    obj["t"] = signal.eval.t;
    obj["d"] = signal.eval.d;
    obj["lambda"] = signal.eval.lambda;
    obj["u"] = signal.eval.u;
    obj["exponent"] = signal.eval.exponent;
    obj["vol_from"] = signal.vol_from;
    obj["vol_to"] = signal.vol_to;
    return obj;
}

}  // namespace

const char* to_string(OptionSide side) noexcept {
    return side == OptionSide::Call ? "call" : "put";
}

const char* to_string(Outcome outcome) noexcept {
    switch (outcome) {
        case Outcome::Hit: return "hit";
        case Outcome::Expired: return "expired";
        case Outcome::Open: return "open";
    }
    return "unknown";
}

void StrategyConfig::validate() const {
    if (!(t_threshold > 0.0 && t_threshold < 1.0)) {
        throw std::invalid_argument("t_threshold must lie in (0, 1)");
    }
    // 0 is allowed: it turns the vol-fall gate off.
    if (!(vol_drop_ratio >= 0.0 && vol_drop_ratio < 1.0)) {
        throw std::invalid_argument("vol_drop_ratio must lie in [0, 1)");
    }
    if (vol_lookback < 2) {
        throw std::invalid_argument("vol_lookback must be >= 2");
    }
}

std::vector<EvaluationRecord> evaluate_on_vol_change(const std::string& symbol,
                                                     const RangeBound& range, double r,
                                                     std::span<const VolPoint> vols) {
    std::vector<EvaluationRecord> records;
    std::optional<double> previous_iv;
    for (const auto& point : vols) {
        if (previous_iv && *previous_iv == point.iv) {
            continue;
        }
        previous_iv = point.iv;
        MarketParams params(r, point.iv);
        EvaluationRecord record{point.date, symbol, range, params, std::nullopt};
        if (classify_regime(params, range.width()) != Regime::NoBarrier) {
            record.eval = transmission_coefficient(params, range.width());
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::optional<VolFallEvent> detect_vol_fall(std::span<const VolPoint> vols,
                                            const StrategyConfig& cfg) {
    cfg.validate();
    if (vols.size() < static_cast<std::size_t>(cfg.vol_lookback)) {
        return std::nullopt;
    }
    const auto window = vols.subspan(vols.size() - static_cast<std::size_t>(cfg.vol_lookback));
    double max_iv = window[0].iv;
    for (const auto& point : window) {
        max_iv = std::max(max_iv, point.iv);
    }
    const double current = window.back().iv;
    const double drop_ratio = (max_iv - current) / max_iv;
    if (drop_ratio < cfg.vol_drop_ratio) {
        return std::nullopt;
    }
    return VolFallEvent{window.back().date, max_iv, current, drop_ratio};
}

std::optional<SignalRecord> generate_signal(const Date& date, const std::string& symbol,
                                            const RangeBound& range,
                                            const TunnelEvaluation& eval,
                                            const std::optional<VolFallEvent>& fall,
                                            const StrategyConfig& cfg, double close,
                                            double tick) {
    cfg.validate();
    if (eval.regime != Regime::Tunneling) {
        throw std::invalid_argument("generate_signal requires a tunneling-regime evaluation");
    }
    if (!(tick > 0.0) || !std::isfinite(tick)) {
        throw std::invalid_argument("tick must be positive and finite");
    }
    if (!fall || eval.t < cfg.t_threshold) {
        return std::nullopt;
    }

    SignalRecord signal;
    signal.date = date;
    signal.symbol = symbol;
    signal.side = cfg.side;
    signal.entry_ref = close;
    signal.eval = eval;
    signal.vol_from = fall->vol_from;
    signal.vol_to = fall->vol_to;
    if (cfg.side == OptionSide::Call) {
        signal.strike = snap_down_to_tick(range.resistance(), tick);
        signal.exit_target = range.resistance() + eval.d;
    } else {
        signal.strike = snap_up_to_tick(range.support(), tick);
        signal.exit_target = range.support() - eval.d;
    }
    return signal;
}

BacktestReport backtest(std::span<const OhlcBar> bars, std::span<const VolPoint> vols,
                        double r, const RangeConfig& range_cfg,
                        const StrategyConfig& strat_cfg, const std::string& symbol,
                        std::optional<RangeBound> fixed_range, double tick) {
    range_cfg.validate();
    strat_cfg.validate();
    if (bars.empty() || vols.empty()) {
        throw std::invalid_argument("backtest needs non-empty bar and vol series");
    }
    if (vols.back().date < bars.front().date || vols.front().date > bars.back().date) {
        throw std::invalid_argument("bar and vol date ranges do not overlap");
    }

    const auto iv_by_bar = fill_iv_by_bar(bars, vols);

    BacktestReport report;
    report.bars = static_cast<int>(bars.size());

    std::vector<VolPoint> marks;  // carried daily iv, one per bar once known
    marks.reserve(bars.size());

    struct PendingSignal {
        std::size_t outcome_index;
        std::size_t emitted_bar;
    };
    std::vector<PendingSignal> pending;
    std::optional<double> last_eval_iv;
    bool trigger_was_met = false;

    const std::size_t window = static_cast<std::size_t>(range_cfg.window);
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const OhlcBar& bar = bars[i];

        // Resolve signals emitted strictly before this bar.
        for (auto it = pending.begin(); it != pending.end();) {
            auto& outcome = report.signals[it->outcome_index];
            const std::size_t elapsed = i - it->emitted_bar;
            const bool is_call = outcome.signal.side == OptionSide::Call;
            const bool hit = elapsed <= static_cast<std::size_t>(kOutcomeHorizonBars) &&
                             (is_call ? bar.high >= outcome.signal.exit_target
                                      : bar.low <= outcome.signal.exit_target);
            if (hit) {
                outcome.outcome = Outcome::Hit;
                outcome.bars_to_resolve = static_cast<int>(elapsed);
                outcome.pnl = is_call
                                  ? outcome.signal.exit_target - outcome.signal.strike
                                  : outcome.signal.strike - outcome.signal.exit_target;
                it = pending.erase(it);
            } else {
                ++it;
            }
        }

        if (iv_by_bar[i]) {
            marks.push_back({bar.date, *iv_by_bar[i]});
        }

        std::optional<RangeBound> range = fixed_range;
        if (!range && i + 1 >= window) {
            const auto detection =
                detect_range(bars.subspan(i + 1 - window, window), range_cfg);
            range = detection.range;
        }

        const bool iv_changed =
            iv_by_bar[i] && (!last_eval_iv || *last_eval_iv != *iv_by_bar[i]);
        if (!range || !iv_changed) {
            continue;
        }
        last_eval_iv = iv_by_bar[i];

        MarketParams params(r, *iv_by_bar[i]);
        EvaluationRecord record{bar.date, symbol, *range, params, std::nullopt};
        if (classify_regime(params, range->width()) != Regime::NoBarrier) {
            record.eval = transmission_coefficient(params, range->width());
        }
        report.evaluations.push_back(record);

        std::optional<SignalRecord> signal;
        if (record.eval && record.eval->regime == Regime::Tunneling) {
            const auto fall = detect_vol_fall(marks, strat_cfg);
            signal = generate_signal(bar.date, symbol, *range, *record.eval, fall,
                                     strat_cfg, bar.close, tick);
        }
        // Rising-edge emission: one signal per entry into the trigger state.
        if (signal && !trigger_was_met) {
            report.signals.push_back({*signal, Outcome::Open, 0, 0.0});
            pending.push_back({report.signals.size() - 1, i});
        }
        trigger_was_met = signal.has_value();
    }

    // Anything unresolved either ran out its horizon or ran out of data.
    for (const auto& p : pending) {
        auto& outcome = report.signals[p.outcome_index];
        const std::size_t last_index = bars.size() - 1;
        if (last_index - p.emitted_bar >= static_cast<std::size_t>(kOutcomeHorizonBars)) {
            outcome.outcome = Outcome::Expired;
        } else {
            outcome.outcome = Outcome::Open;
        }
    }
    return report;
}

int BacktestReport::hits() const noexcept {
    return static_cast<int>(std::count_if(signals.begin(), signals.end(), [](const auto& s) {
        return s.outcome == Outcome::Hit;
    }));
}

int BacktestReport::expired() const noexcept {
    return static_cast<int>(std::count_if(signals.begin(), signals.end(), [](const auto& s) {
        return s.outcome == Outcome::Expired;
    }));
}

int BacktestReport::open() const noexcept {
    return static_cast<int>(std::count_if(signals.begin(), signals.end(), [](const auto& s) {
        return s.outcome == Outcome::Open;
    }));
}

double BacktestReport::total_pnl() const noexcept {
    double total = 0.0;
    for (const auto& s : signals) {
        total += s.pnl;
    }
    return total;
}

std::string BacktestReport::to_jsonl() const {
    std::string out;
    for (const auto& signal : signals) {
        out += to_json_line(signal);
        out += '\n';
    }
    return out;
}

std::string BacktestReport::summary_csv(const std::string& symbol) const {
    std::string out = "symbol,bars,evaluations,signals,hits,expired,open,total_pnl\n";
    out += symbol;
    out += ',';
    out += std::to_string(bars);
    out += ',';
    out += std::to_string(evaluations.size());
    out += ',';
    out += std::to_string(signals.size());
    out += ',';
    out += std::to_string(hits());
    out += ',';
    out += std::to_string(expired());
    out += ',';
    out += std::to_string(open());
    out += ',';
    out += fmt_double(total_pnl());
    out += '\n';
    return out;
}

std::string to_json_line(const SignalRecord& signal) {
    return signal_to_json(signal).dump();
}

std::string to_json_line(const SignalOutcome& outcome) {
    json obj = signal_to_json(outcome.signal);
    obj["outcome"] = to_string(outcome.outcome);
    obj["bars_to_resolve"] = outcome.bars_to_resolve;
    obj["pnl"] = outcome.pnl;
    return obj.dump();
}

}  // namespace ptl
