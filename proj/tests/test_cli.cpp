#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "ptl/journal.hpp"
#include "ptl/market_data.hpp"
#include "support/fixtures.hpp"

using namespace ptl;
using namespace ptl::testing;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args) {
    static const std::string binary = PTL_CLI_PATH;
    const TempDir scratch;
    const auto out_path = scratch.path() / "out";
    const auto err_path = scratch.path() / "err";
    const std::string command = "\"" + binary + "\" " + args + " >\"" +
                                out_path.string() + "\" 2>\"" + err_path.string() + "\"";
    const int status = std::system(command.c_str());
    RunResult result;
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

std::vector<nlohmann::json> parse_jsonl(const std::string& text) {
    std::vector<nlohmann::json> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            lines.push_back(nlohmann::json::parse(line));
        }
    }
    return lines;
}

void write_scan_symbol(const TempDir& dir, const std::string& symbol, double support,
                       double resistance, double vol_start, double vol_end) {
    const auto bars = make_range_bars(support, resistance, 20, {2013, 1, 10});
    std::vector<VolPoint> vols;
    for (int i = 0; i < 5; ++i) {
        vols.push_back({bars[static_cast<std::size_t>(i)].date, vol_start});
    }
    vols.push_back({bars.back().date, vol_end});
    dir.write(symbol + ".ohlc.csv", to_csv(bars));
    dir.write(symbol + ".vols.csv", to_csv(std::span<const VolPoint>(vols)));
}

const std::string kFixtureConfig =
    "risk_free_rate = 0.03\n"
    "t_threshold = 0.95\n"
    "vol_drop_ratio = 0.2\n"
    "range_window = 20\n"
    "range_touch_count = 2\n"
    "range_tolerance = 0.005\n";

/// The LNKD-style walk: oscillation, the vol drop, the breakout day.
struct CliBacktestFixture {
    TempDir dir;
    std::filesystem::path ohlc;
    std::filesystem::path vols;
    std::filesystem::path config;

    CliBacktestFixture() {
        auto bars = make_range_bars(123.3, 127.2, 21, {2013, 1, 18});
        bars.push_back(make_breakout_bar(next_day(bars.back().date), 123.3, 127.2));
        const auto vol_series = make_vols({{bars[0].date, 0.63},
                                           {bars[20].date, 0.47},
                                           {bars[21].date, 0.39}});
        ohlc = dir.write("LNKD.ohlc.csv", to_csv(std::span<const OhlcBar>(bars)));
        vols = dir.write("LNKD.vols.csv", to_csv(std::span<const VolPoint>(vol_series)));
        config = dir.write("run.cfg", kFixtureConfig);
    }
};

}  // namespace

TEST_CASE("eval prints the evaluation and honors the exit contract") {
    const auto ok = run_cli("eval --r 0.03 --sigma 0.47 --k 3.9");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("t = 0.9986745634065536") != std::string::npos);
    CHECK(ok.out.find("d = 0.058114") != std::string::npos);
    CHECK(ok.out.find("regime = tunneling") != std::string::npos);

    const auto as_json = run_cli("eval --r 0.03 --sigma 0.47 --k 3.9 --json");
    CHECK(as_json.code == 0);
    const auto obj = nlohmann::json::parse(as_json.out);
    CHECK(obj["t"].get<double>() == doctest::Approx(0.998675).epsilon(1e-5));
    CHECK(obj["d"].get<double>() == doctest::Approx(0.058114).epsilon(1e-4));
    CHECK(obj["regime"] == "tunneling");

    const auto turning = run_cli("eval --r 0.03 --sigma 0.03 --k 1");
    CHECK(turning.code == 0);
    CHECK(turning.out.find("t = 1") != std::string::npos);
    CHECK(turning.out.find("regime = at_turning_point") != std::string::npos);

    const auto no_barrier = run_cli("eval --r 0.03 --sigma 0.15 --k 3");
    CHECK(no_barrier.code == 1);
    CHECK(no_barrier.err.find("not in tunneling regime: K >= sqrt(sigma/r)") !=
          std::string::npos);

    CHECK(run_cli("eval --r 0.03 --sigma 0.47").code == 2);      // missing --k
    CHECK(run_cli("eval --r -1 --sigma 0.47 --k 1").code == 2);  // invalid params
    CHECK(run_cli("nonsense").code == 2);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("table1 recomputes the reference episodes") {
    const auto all = run_cli("table1");
    CHECK(all.code == 0);
    const auto lines = [&] {
        std::vector<std::string> rows;
        std::istringstream in(all.out);
        std::string line;
        while (std::getline(in, line)) {
            rows.push_back(line);
        }
        return rows;
    }();
    REQUIRE(lines.size() == 5);  // header + 4 rows
    CHECK(lines[0] ==
          "symbol,t_computed,t_recorded,t_delta,d_computed,d_recorded,d_delta,status");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        CHECK(lines[i].find(",PASS") != std::string::npos);
    }

    const auto tight = run_cli("table1 --tolerance 1e-9");
    CHECK(tight.code == 1);
    CHECK(tight.out.find("FAIL") != std::string::npos);
    CHECK(tight.err.find("tolerance breach") != std::string::npos);
    CHECK(tight.err.find("GOOG:t") != std::string::npos);
    CHECK(tight.err.find("NFLX:t") != std::string::npos);

    const auto one = run_cli("table1 --row GOOG");
    CHECK(one.code == 0);
    CHECK(one.out.find("GOOG") != std::string::npos);
    CHECK(one.out.find("LNKD") == std::string::npos);

    CHECK(run_cli("table1 --row WXYZ").code == 2);
}

TEST_CASE("verify cross-checks the exponent and stays deterministic") {
    const auto first = run_cli("verify");
    CHECK(first.code == 0);
    CHECK(first.out.rfind("spec,exponent_closed,exponent_numeric,rel_deviation\n", 0) == 0);
    CHECK(first.out.find("\nmax,,,") != std::string::npos);
    CHECK(first.err.find("max relative deviation") != std::string::npos);

    const auto second = run_cli("verify");
    CHECK(first.out == second.out);  // fixed seed, bit-stable quadrature

    const auto tight = run_cli("verify --rel-tol 1e-15");
    CHECK(tight.code == 1);
}

TEST_CASE("plot emits deterministic sweep data") {
    TempDir dir;

    SUBCASE("t-vs-k is monotone increasing") {
        const auto prefix = (dir.path() / "tk").string();
        const auto run = run_cli("plot --kind t-vs-k --r 0.03 --sigma 0.47 --out " + prefix);
        CHECK(run.code == 0);
        const auto csv = slurp(prefix + ".csv");
        CHECK(csv.rfind("k,t\n", 0) == 0);
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        double previous_t = -1.0;
        int rows = 0;
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            const double t = std::stod(line.substr(comma + 1));
            CHECK(t > previous_t);
            previous_t = t;
            ++rows;
        }
        CHECK(rows == 200);
        const auto svg = slurp(prefix + ".svg");
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("polyline") != std::string::npos);

        const auto again = run_cli("plot --kind t-vs-k --r 0.03 --sigma 0.47 --out " +
                                   (dir.path() / "tk2").string());
        CHECK(again.code == 0);
        CHECK(slurp((dir.path() / "tk2.csv")) == csv);
    }

    SUBCASE("psi-profile ends at the normalized turning point") {
        const auto prefix = (dir.path() / "psi").string();
        const auto run =
            run_cli("plot --kind psi-profile --r 0.03 --sigma 0.47 --k 3.9 --out " + prefix);
        CHECK(run.code == 0);
        const auto csv = slurp(prefix + ".csv");
        CHECK(csv.rfind("s,psi,kappa\n", 0) == 0);
        const auto last_line = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
        CHECK(last_line.find(",1,0") != std::string::npos);  // psi = 1, kappa = 0 at s*
    }

    SUBCASE("t-vs-sigma approaches one at both extremes") {
        const auto prefix = (dir.path() / "ts").string();
        const auto run =
            run_cli("plot --kind t-vs-sigma --r 0.03 --k 2.1 --out " + prefix);
        CHECK(run.code == 0);
        std::istringstream in(slurp(prefix + ".csv"));
        std::string line;
        std::getline(in, line);
        std::vector<double> ts;
        while (std::getline(in, line)) {
            ts.push_back(std::stod(line.substr(line.find(',') + 1)));
        }
        REQUIRE(ts.size() == 200);
        const double interior_min = *std::min_element(ts.begin(), ts.end());
        CHECK(ts.front() > 0.999);
        CHECK(ts.back() > 0.99);
        CHECK(interior_min < ts.front());
        CHECK(interior_min < ts.back());
    }

    SUBCASE("unwritable output is an I/O error") {
        CHECK(run_cli("plot --kind t-vs-k --r 0.03 --sigma 0.47 --out "
                      "/nonexistent_dir/sweep")
                  .code == 3);
    }

    SUBCASE("no-barrier profile parameters are a domain error") {
        CHECK(run_cli("plot --kind psi-profile --r 0.03 --sigma 0.15 --k 3 --out " +
                      (dir.path() / "x").string())
                  .code == 1);
    }

    SUBCASE("a bad kind is a usage error") {
        CHECK(run_cli("plot --kind t-vs-q --r 0.03 --sigma 0.47 --out " +
                      (dir.path() / "x").string())
                  .code == 2);
    }
}

TEST_CASE("scan walks a fixture directory and journals every evaluation") {
    TempDir dir;
    write_scan_symbol(dir, "LNKD", 123.3, 127.2, 0.63, 0.47);
    write_scan_symbol(dir, "GOOG", 702.6, 704.7, 0.40, 0.15);
    write_scan_symbol(dir, "HUM", 66.95, 70.08, 0.43, 0.31);
    write_scan_symbol(dir, "NFLX", 97.81, 101.17, 0.95, 0.55);
    write_scan_symbol(dir, "TEST", 100.0, 104.0, 0.80, 0.40);  // ends outside the regime
    const auto config = dir.write("run.cfg", kFixtureConfig);
    const auto journal = dir.path() / "journal.jsonl";

    const auto run = run_cli("scan --data-dir " + dir.path().string() + " --config " +
                             config.string() + " --journal " + journal.string());
    CHECK(run.code == 0);

    const auto signals = parse_jsonl(run.out);
    REQUIRE(signals.size() == 2);  // only rows whose T clears the threshold
    CHECK(signals[0]["symbol"] == "HUM");
    CHECK(signals[0]["side"] == "call");
    CHECK(signals[0]["t"].get<double>() == doctest::Approx(0.9948).epsilon(1e-4));
    CHECK(signals[1]["symbol"] == "LNKD");
    CHECK(signals[1]["t"].get<double>() == doctest::Approx(0.998675).epsilon(1e-5));
    CHECK(signals[1]["exit_target"].get<double>() ==
          doctest::Approx(127.2 + 0.058114).epsilon(1e-6));

    const auto records = Journal::read_all(journal);
    CHECK(records.size() == 10);  // two change points per symbol
    int no_barrier = 0;
    for (const auto& record : records) {
        if (!record.eval) {
            ++no_barrier;
            CHECK(record.symbol == "TEST");
        }
    }
    CHECK(no_barrier == 1);

    // determinism of stdout across reruns (fresh journal)
    const auto rerun = run_cli("scan --data-dir " + dir.path().string() + " --config " +
                               config.string() + " --journal " +
                               (dir.path() / "journal2.jsonl").string());
    CHECK(rerun.out == run.out);
}

TEST_CASE("scan isolates per-symbol failures") {
    TempDir dir;
    write_scan_symbol(dir, "GOOD", 123.3, 127.2, 0.63, 0.47);
    dir.write("BAD.ohlc.csv", "date,open,high,low,close\n2013-01-10,banana\n");
    dir.write("BAD.vols.csv", "date,iv\n2013-01-10,0.5\n");
    const auto config = dir.write("run.cfg", kFixtureConfig);

    const auto run = run_cli("scan --data-dir " + dir.path().string() + " --config " +
                             config.string());
    CHECK(run.code == 0);
    CHECK(run.err.find("BAD:") != std::string::npos);
    const auto signals = parse_jsonl(run.out);
    REQUIRE(signals.size() == 1);
    CHECK(signals[0]["symbol"] == "GOOD");
}

TEST_CASE("scan of an empty directory succeeds with no signals") {
    TempDir dir;
    const auto run = run_cli("scan --data-dir " + dir.path().string());
    CHECK(run.code == 0);
    CHECK(run.out.empty());
}

TEST_CASE("scan fails only when every symbol fails") {
    TempDir dir;
    dir.write("A.ohlc.csv", "garbage");
    dir.write("A.vols.csv", "garbage");
    dir.write("B.ohlc.csv", "also garbage");
    dir.write("B.vols.csv", "also garbage");
    const auto run = run_cli("scan --data-dir " + dir.path().string());
    CHECK(run.code == 3);
    CHECK(run.err.find("A:") != std::string::npos);
    CHECK(run.err.find("B:") != std::string::npos);
}

TEST_CASE("backtest reproduces the single hit from the walk fixture") {
    const CliBacktestFixture fx;
    const std::string base = "backtest --ohlc " + fx.ohlc.string() + " --vols " +
                             fx.vols.string() + " --config " + fx.config.string();

    const auto run = run_cli(base + " --summary " + (fx.dir.path() / "sum.csv").string());
    CHECK(run.code == 0);
    const auto outcomes = parse_jsonl(run.out);
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0]["symbol"] == "LNKD");
    CHECK(outcomes[0]["side"] == "call");
    CHECK(outcomes[0]["outcome"] == "hit");
    CHECK(outcomes[0]["bars_to_resolve"] == 1);
    CHECK(outcomes[0]["date"] == "2013-02-07");
    CHECK(outcomes[0]["exit_target"].get<double>() ==
          doctest::Approx(127.2 + 0.058114).epsilon(1e-6));

    const auto summary = slurp(fx.dir.path() / "sum.csv");
    CHECK(summary.rfind("symbol,bars,evaluations,signals,hits,expired,open,total_pnl\n",
                        0) == 0);
    CHECK(summary.find("LNKD,22,2,1,1,0,0,") != std::string::npos);

    const auto rerun = run_cli(base);
    CHECK(rerun.code == 0);
    CHECK(rerun.out == run.out);  // byte-identical reports
}

TEST_CASE("backtest accepts manually drawn levels") {
    const CliBacktestFixture fx;
    const std::string base = "backtest --ohlc " + fx.ohlc.string() + " --vols " +
                             fx.vols.string() + " --config " + fx.config.string();

    const auto run = run_cli(base + " --support 123.3 --resistance 127.2");
    CHECK(run.code == 0);
    const auto outcomes = parse_jsonl(run.out);
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0]["outcome"] == "hit");

    CHECK(run_cli(base + " --support 123.3").code == 2);  // missing partner flag
}

TEST_CASE("backtest maps missing files to the I/O exit code") {
    const CliBacktestFixture fx;
    CHECK(run_cli("backtest --ohlc /nonexistent.csv --vols " + fx.vols.string()).code == 3);
}
