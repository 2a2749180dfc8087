#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptl/barrier_lab.hpp"
#include "ptl/journal.hpp"
#include "ptl/market_data.hpp"
#include "ptl/range_detect.hpp"
#include "ptl/strategy.hpp"
#include "ptl/text.hpp"
#include "ptl/tunneling.hpp"

#include "reference_rows.hpp"
#include "svg.hpp"

namespace {

using namespace ptl;
using json = nlohmann::ordered_json;

// Exit contract: 0 success, 1 domain error, 2 usage error, 3 I/O or parse error.
constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

constexpr std::uint64_t kVerifySeed = 20130207;

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::ios_base::failure("cannot write " + path.string());
    }
    return out;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(double r, double sigma, double width, bool as_json) {
    const MarketParams params(r, sigma);
    const TunnelEvaluation eval = transmission_coefficient(params, width);
    if (as_json) {
        json obj;
        obj["lambda"] = eval.lambda;
        obj["u"] = eval.u;
        obj["exponent"] = eval.exponent;
        obj["t"] = eval.t;
        obj["d"] = eval.d;
        obj["regime"] = to_string(eval.regime);
        std::cout << obj.dump() << "\n";
    } else {
        std::cout << "lambda = " << fmt_double(eval.lambda) << "\n"
                  << "u = " << fmt_double(eval.u) << "\n"
                  << "exponent = " << fmt_double(eval.exponent) << "\n"
                  << "t = " << fmt_double(eval.t) << "\n"
                  << "d = " << fmt_double(eval.d) << "\n"
                  << "regime = " << to_string(eval.regime) << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// table1
// ---------------------------------------------------------------------------

int cmd_table1(std::optional<double> tolerance, const std::string& row_filter) {
    const double tol_t = tolerance.value_or(1e-3);
    const double tol_d = tolerance.value_or(1e-4);

    std::vector<tools::ReferenceRow> rows;
    for (const auto& row : tools::kReferenceRows) {
        if (row_filter.empty() || row_filter == row.symbol) {
            rows.push_back(row);
        }
    }
    if (rows.empty()) {
        throw std::invalid_argument("unknown row '" + row_filter + "'");
    }

    std::vector<std::string> breaches;
    std::cout << "symbol,t_computed,t_recorded,t_delta,d_computed,d_recorded,d_delta,status\n";
    for (const auto& row : rows) {
        const auto eval = transmission_coefficient(MarketParams(row.r, row.sigma), row.width);
        const double t_delta = std::abs(eval.t - row.t_recorded);
        const double d_delta = std::abs(eval.d - row.d_recorded);
        const bool pass = t_delta <= tol_t && d_delta <= tol_d;
        if (t_delta > tol_t) {
            breaches.push_back(std::string(row.symbol) + ":t");
        }
        if (d_delta > tol_d) {
            breaches.push_back(std::string(row.symbol) + ":d");
        }
        std::cout << row.symbol << ',' << fmt_double(eval.t) << ','
                  << fmt_double(row.t_recorded) << ',' << fmt_double(t_delta) << ','
                  << fmt_double(eval.d) << ',' << fmt_double(row.d_recorded) << ','
                  << fmt_double(d_delta) << ',' << (pass ? "PASS" : "FAIL") << "\n";
    }
    if (!breaches.empty()) {
        std::cerr << "tolerance breach:";
        for (const auto& cell : breaches) {
            std::cerr << ' ' << cell;
        }
        std::cerr << "\n";
        return kExitDomain;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(double rel_tol, std::uint64_t seed) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
        throw std::invalid_argument("--rel-tol must lie in (0, 1)");
    }
    const double quad_tol = std::clamp(rel_tol / 100.0, 2e-14, 1e-4);

    struct Spec {
        std::string name;
        MarketParams params;
        double width;
    };
    std::vector<Spec> specs;
    for (const auto& row : tools::kReferenceRows) {
        specs.push_back({row.symbol, MarketParams(row.r, row.sigma), row.width});
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> r_dist(0.005, 0.12);
    std::uniform_real_distribution<double> sigma_dist(0.08, 1.2);
    std::uniform_real_distribution<double> frac_dist(0.05, 0.98);
    for (int i = 0; i < 50; ++i) {
        const double r = r_dist(rng);
        const double sigma = sigma_dist(rng);
        const MarketParams params(r, sigma);
        const double width = frac_dist(rng) * turning_point(params);
        char name[16];
        std::snprintf(name, sizeof(name), "rand%02d", i);
        specs.push_back({name, params, width});
    }

    double max_deviation = 0.0;
    std::cout << "spec,exponent_closed,exponent_numeric,rel_deviation\n";
    for (const auto& spec : specs) {
        const double closed =
            transmission_coefficient(spec.params, spec.width).exponent;
        const double numeric =
            wkb_exponent_numeric(BarrierSpec(spec.params, spec.width), quad_tol);
        const double deviation = std::abs(numeric - closed) / closed;
        max_deviation = std::max(max_deviation, deviation);
        std::cout << spec.name << ',' << fmt_double(closed) << ',' << fmt_double(numeric)
                  << ',' << fmt_double(deviation) << "\n";
    }
    std::cout << "max,,," << fmt_double(max_deviation) << "\n";
    std::cerr << "max relative deviation " << fmt_double(max_deviation) << " over "
              << specs.size() << " specs (tolerance " << fmt_double(rel_tol) << ")\n";
    return max_deviation <= rel_tol ? kExitOk : kExitDomain;
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

int cmd_plot(const std::string& kind, const std::filesystem::path& out_prefix,
             std::optional<double> r, std::optional<double> sigma,
             std::optional<double> width, int points) {
    if (points < 8) {
        throw std::invalid_argument("--points must be >= 8");
    }
    const auto need = [](const std::optional<double>& value, const char* flag) {
        if (!value) {
            throw std::invalid_argument(std::string("missing ") + flag +
                                        " for this plot kind");
        }
        return *value;
    };

    std::vector<double> xs;
    std::vector<double> ys;
    std::string csv;
    std::string x_label;
    std::string y_label = "t";

    if (kind == "t-vs-k") {
        const MarketParams params(need(r, "--r"), need(sigma, "--sigma"));
        const double s_star = turning_point(params);
        csv = "k,t\n";
        for (int i = 1; i <= points; ++i) {
            const double k = s_star * i / (points + 1);
            const double t = transmission_coefficient(params, k).t;
            xs.push_back(k);
            ys.push_back(t);
            csv += fmt_double(k) + "," + fmt_double(t) + "\n";
        }
        x_label = "k";
    } else if (kind == "t-vs-sigma") {
        const double rate = need(r, "--r");
        const double k = need(width, "--k");
        if (!(rate > 0.0) || !(k > 0.0)) {
            throw std::invalid_argument("--r and --k must be positive");
        }
        const double sigma_lo = rate * k * k * (1.0 + 1e-3);
        const double sigma_hi = sigma_lo * 2000.0;
        csv = "sigma,t\n";
        for (int i = 0; i < points; ++i) {
            const double s =
                sigma_lo * std::pow(sigma_hi / sigma_lo, double(i) / (points - 1));
            const double t = transmission_coefficient(MarketParams(rate, s), k).t;
            xs.push_back(s);
            ys.push_back(t);
            csv += fmt_double(s) + "," + fmt_double(t) + "\n";
        }
        x_label = "sigma";
    } else if (kind == "psi-profile") {
        const MarketParams params(need(r, "--r"), need(sigma, "--sigma"));
        const BarrierSpec spec(params, need(width, "--k"));
        const auto profile = integrate_wavefunction(spec, 2000);
        std::ostringstream buffer;
        write_profile_csv(profile, buffer);
        csv = buffer.str();
        xs = profile.s;
        ys = profile.psi;
        x_label = "s";
        y_label = "psi";
    } else {
        throw std::invalid_argument("unknown plot kind '" + kind + "'");
    }

    auto csv_out = open_output(out_prefix.string() + ".csv");
    csv_out << csv;
    if (!csv_out.flush()) {
        throw std::ios_base::failure("write failed: " + out_prefix.string() + ".csv");
    }
    auto svg_out = open_output(out_prefix.string() + ".svg");
    tools::write_line_chart_svg(svg_out, xs, ys, x_label, y_label);
    if (!svg_out.flush()) {
        throw std::ios_base::failure("write failed: " + out_prefix.string() + ".svg");
    }
    std::cout << out_prefix.string() << ".csv\n" << out_prefix.string() << ".svg\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

struct SymbolScan {
    std::string symbol;
    std::vector<EvaluationRecord> records;
    std::vector<SignalRecord> signals;
    std::string diagnostic;  // non-empty marks a failed symbol
};

SymbolScan scan_symbol(const std::string& symbol, const std::filesystem::path& dir,
                       const RunConfig& cfg, const StrategyConfig& strat_cfg,
                       double tick) {
    SymbolScan result;
    result.symbol = symbol;
    try {
        const auto bars = load_ohlc(dir / (symbol + ".ohlc.csv"));
        const auto vols = load_vols(dir / (symbol + ".vols.csv"));
        const RangeConfig range_cfg{cfg.range_window, cfg.range_touch_count,
                                    cfg.range_tolerance};
        const auto detection = detect_range(bars, range_cfg);
        if (!detection.range) {
            // processed, just nothing to evaluate
            result.diagnostic =
                symbol + ": no range (" + std::string(to_string(detection.reason)) + ")";
            return result;
        }
        const RangeBound range = *detection.range;
        result.records =
            evaluate_on_vol_change(symbol, range, cfg.risk_free_rate, vols);

        for (const auto& record : result.records) {
            if (!record.eval || record.eval->regime != Regime::Tunneling) {
                continue;
            }
            // vol prefix up to and including this change point
            const auto end = std::upper_bound(
                vols.begin(), vols.end(), record.date,
                [](const Date& d, const VolPoint& v) { return d < v.date; });
            const std::span<const VolPoint> prefix(vols.data(),
                                                   static_cast<std::size_t>(end - vols.begin()));
            const auto fall = detect_vol_fall(prefix, strat_cfg);
            // last close at or before the evaluation date
            const OhlcBar* reference_bar = nullptr;
            for (const auto& bar : bars) {
                if (bar.date <= record.date) {
                    reference_bar = &bar;
                } else {
                    break;
                }
            }
            if (!reference_bar) {
                continue;
            }
            const auto signal =
                generate_signal(record.date, symbol, range, *record.eval, fall,
                                strat_cfg, reference_bar->close, tick);
            if (signal) {
                result.signals.push_back(*signal);
            }
        }
    } catch (const std::exception& e) {
        result.records.clear();
        result.signals.clear();
        result.diagnostic = symbol + ": " + e.what();
        result.symbol.clear();  // marks failure
    }
    return result;
}

int cmd_scan(const std::filesystem::path& dir,
             const std::optional<std::filesystem::path>& config_path,
             std::optional<std::filesystem::path> journal_path, int vol_lookback,
             const std::string& side, double tick) {
    const RunConfig cfg =
        config_path ? load_run_config(*config_path) : RunConfig{};
    StrategyConfig strat_cfg;
    strat_cfg.t_threshold = cfg.t_threshold;
    strat_cfg.vol_drop_ratio = cfg.vol_drop_ratio;
    strat_cfg.vol_lookback = vol_lookback;
    strat_cfg.side = side == "put" ? OptionSide::Put : OptionSide::Call;
    strat_cfg.validate();

    if (!std::filesystem::is_directory(dir)) {
        throw ValidationError("not a directory: " + dir.string());
    }
    std::vector<std::string> symbols;
    const std::string suffix = ".ohlc.csv";
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            symbols.push_back(name.substr(0, name.size() - suffix.size()));
        }
    }
    std::sort(symbols.begin(), symbols.end());

    if (!journal_path) {
        journal_path = dir / "journal.jsonl";
    }
    Journal journal(*journal_path);

    std::vector<std::future<SymbolScan>> futures;
    futures.reserve(symbols.size());
    for (const auto& symbol : symbols) {
        futures.push_back(std::async(std::launch::async, scan_symbol, symbol, dir, cfg,
                                     strat_cfg, tick));
    }

    std::size_t failed = 0;
    for (auto& future : futures) {
        const SymbolScan scan = future.get();
        if (!scan.diagnostic.empty()) {
            std::cerr << scan.diagnostic << "\n";
        }
        if (scan.symbol.empty()) {
            ++failed;
            continue;
        }
        for (const auto& record : scan.records) {
            journal.append(record);
        }
        for (const auto& signal : scan.signals) {
            std::cout << to_json_line(signal) << "\n";
        }
    }
    if (!symbols.empty() && failed == symbols.size()) {
        return kExitIo;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// backtest
// ---------------------------------------------------------------------------

int cmd_backtest(const std::filesystem::path& ohlc_path,
                 const std::filesystem::path& vols_path,
                 const std::optional<std::filesystem::path>& config_path,
                 std::optional<double> r_override, std::string symbol,
                 const std::string& side, std::optional<double> support,
                 std::optional<double> resistance, int vol_lookback, double tick,
                 const std::optional<std::filesystem::path>& summary_path) {
    if (support.has_value() != resistance.has_value()) {
        throw std::invalid_argument("--support and --resistance must be given together");
    }
    const RunConfig cfg =
        config_path ? load_run_config(*config_path) : RunConfig{};
    const double r = r_override.value_or(cfg.risk_free_rate);
    const RangeConfig range_cfg{cfg.range_window, cfg.range_touch_count,
                                cfg.range_tolerance};
    StrategyConfig strat_cfg;
    strat_cfg.t_threshold = cfg.t_threshold;
    strat_cfg.vol_drop_ratio = cfg.vol_drop_ratio;
    strat_cfg.vol_lookback = vol_lookback;
    strat_cfg.side = side == "put" ? OptionSide::Put : OptionSide::Call;

    if (symbol.empty()) {
        symbol = ohlc_path.stem().string();
        const auto dot = symbol.find('.');
        if (dot != std::string::npos) {
            symbol = symbol.substr(0, dot);
        }
    }

    const auto bars = load_ohlc(ohlc_path);
    const auto vols = load_vols(vols_path);
    std::optional<RangeBound> fixed;
    if (support) {
        fixed = RangeBound(*support, *resistance);
    }

    const auto report =
        backtest(bars, vols, r, range_cfg, strat_cfg, symbol, fixed, tick);
    std::cout << report.to_jsonl();
    if (summary_path) {
        auto out = open_output(*summary_path);
        out << report.summary_csv(symbol);
    }
    std::cerr << "bars=" << report.bars << " evaluations=" << report.evaluations.size()
              << " signals=" << report.signals.size() << " hits=" << report.hits()
              << " expired=" << report.expired() << " open=" << report.open()
              << " total_pnl=" << fmt_double(report.total_pnl()) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"range-bound market timing: transmission-coefficient analytics"};
    app.require_subcommand(1);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate lambda, u, T, d for one (r, sigma, K)");
    double eval_r = 0.0, eval_sigma = 0.0, eval_width = 0.0;
    bool eval_json = false;
    eval_cmd->add_option("--r", eval_r, "risk-free rate, annualized")->required();
    eval_cmd->add_option("--sigma", eval_sigma, "implied volatility, annualized")->required();
    eval_cmd->add_option("--k", eval_width, "range width, price units")->required();
    eval_cmd->add_flag("--json", eval_json, "emit a single JSON object");

    // table1
    auto* table_cmd =
        app.add_subcommand("table1", "Recompute the built-in reference episodes");
    std::optional<double> table_tol;
    std::string table_row;
    table_cmd->add_option("--tolerance", table_tol,
                          "override both tolerances (default t 1e-3, d 1e-4)");
    table_cmd->add_option("--row", table_row, "check a single symbol");

    // scan
    auto* scan_cmd =
        app.add_subcommand("scan", "Scan a directory of per-symbol CSVs for signals");
    std::filesystem::path scan_dir;
    std::optional<std::filesystem::path> scan_config;
    std::optional<std::filesystem::path> scan_journal;
    int scan_lookback = 5;
    std::string scan_side = "call";
    double scan_tick = kDefaultTick;
    scan_cmd->add_option("--data-dir", scan_dir, "directory of SYM.ohlc.csv / SYM.vols.csv")
        ->required();
    scan_cmd->add_option("--config", scan_config, "key = value run configuration");
    scan_cmd->add_option("--journal", scan_journal,
                         "evaluation journal (default <data-dir>/journal.jsonl)");
    scan_cmd->add_option("--vol-lookback", scan_lookback, "fall-detection lookback, points");
    scan_cmd->add_option("--side", scan_side, "call or put")
        ->check(CLI::IsMember({"call", "put"}));
    scan_cmd->add_option("--tick", scan_tick, "strike tick size");

    // backtest
    auto* bt_cmd = app.add_subcommand("backtest", "Walk one symbol's history");
    std::filesystem::path bt_ohlc, bt_vols;
    std::optional<std::filesystem::path> bt_config, bt_summary;
    std::optional<double> bt_r, bt_support, bt_resistance;
    std::string bt_symbol, bt_side = "call";
    int bt_lookback = 5;
    double bt_tick = kDefaultTick;
    bt_cmd->add_option("--ohlc", bt_ohlc, "OHLC CSV")->required();
    bt_cmd->add_option("--vols", bt_vols, "implied-vol CSV")->required();
    bt_cmd->add_option("--config", bt_config, "key = value run configuration");
    bt_cmd->add_option("--r", bt_r, "risk-free rate override");
    bt_cmd->add_option("--symbol", bt_symbol, "symbol label for the report");
    bt_cmd->add_option("--side", bt_side, "call or put")
        ->check(CLI::IsMember({"call", "put"}));
    bt_cmd->add_option("--support", bt_support, "manual support level (with --resistance)");
    bt_cmd->add_option("--resistance", bt_resistance, "manual resistance level");
    bt_cmd->add_option("--vol-lookback", bt_lookback, "fall-detection lookback, bars");
    bt_cmd->add_option("--tick", bt_tick, "strike tick size");
    bt_cmd->add_option("--summary", bt_summary, "write the one-row summary CSV here");

    // verify
    auto* verify_cmd = app.add_subcommand(
        "verify", "Cross-check the closed-form exponent against quadrature");
    double verify_tol = 1e-9;
    std::uint64_t verify_seed = kVerifySeed;
    verify_cmd->add_option("--rel-tol", verify_tol, "max allowed relative deviation");
    verify_cmd->add_option("--seed", verify_seed, "seed for the random spec set");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "Emit sweep CSV plus a minimal SVG chart");
    std::string plot_kind;
    std::filesystem::path plot_out;
    std::optional<double> plot_r, plot_sigma, plot_k;
    int plot_points = 200;
    plot_cmd->add_option("--kind", plot_kind, "t-vs-sigma | t-vs-k | psi-profile")
        ->required()
        ->check(CLI::IsMember({"t-vs-sigma", "t-vs-k", "psi-profile"}));
    plot_cmd->add_option("--out", plot_out, "output path prefix (.csv/.svg appended)")
        ->required();
    plot_cmd->add_option("--r", plot_r, "risk-free rate");
    plot_cmd->add_option("--sigma", plot_sigma, "implied volatility");
    plot_cmd->add_option("--k", plot_k, "range width");
    plot_cmd->add_option("--points", plot_points, "samples per sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(eval_cmd)) {
            return cmd_eval(eval_r, eval_sigma, eval_width, eval_json);
        }
        if (app.got_subcommand(table_cmd)) {
            return cmd_table1(table_tol, table_row);
        }
        if (app.got_subcommand(scan_cmd)) {
            return cmd_scan(scan_dir, scan_config, scan_journal, scan_lookback, scan_side,
                            scan_tick);
        }
        if (app.got_subcommand(bt_cmd)) {
            return cmd_backtest(bt_ohlc, bt_vols, bt_config, bt_r, bt_symbol, bt_side,
                                bt_support, bt_resistance, bt_lookback, bt_tick,
                                bt_summary);
        }
        if (app.got_subcommand(verify_cmd)) {
            return cmd_verify(verify_tol, verify_seed);
        }
        if (app.got_subcommand(plot_cmd)) {
            return cmd_plot(plot_kind, plot_out, plot_r, plot_sigma, plot_k, plot_points);
        }
    } catch (const NoBarrierError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const QuadratureError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const JournalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
