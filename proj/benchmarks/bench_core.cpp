#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ptl/barrier_lab.hpp"
#include "ptl/market_data.hpp"
#include "ptl/range_detect.hpp"
#include "ptl/strategy.hpp"
#include "ptl/tunneling.hpp"

namespace {

using namespace ptl;

std::vector<OhlcBar> oscillating_bars(double support, double resistance, int count) {
    const double mid = (support + resistance) / 2.0;
    const double quarter = (resistance - support) / 4.0;
    std::vector<OhlcBar> bars;
    bars.reserve(static_cast<std::size_t>(count));
    Date date{2013, 1, 2};
    for (int i = 0; i < count; ++i) {
        switch (i % 4) {
            case 0: bars.push_back({date, mid, resistance, mid - quarter, mid + quarter}); break;
            case 1: bars.push_back({date, mid + quarter, mid + quarter, mid - quarter, mid}); break;
            case 2: bars.push_back({date, mid, mid + quarter, support, mid - quarter}); break;
            default: bars.push_back({date, mid - quarter, mid + quarter, mid - quarter, mid}); break;
        }
        // next calendar day, cheap and good enough for synthetic series
        if (++date.day > 28) {
            date.day = 1;
            if (++date.month > 12) {
                date.month = 1;
                ++date.year;
            }
        }
    }
    return bars;
}

void BM_TransmissionCoefficient(benchmark::State& state) {
    const MarketParams params(0.03, 0.47);
    for (auto _ : state) {
        benchmark::DoNotOptimize(transmission_coefficient(params, 3.9));
    }
}
BENCHMARK(BM_TransmissionCoefficient);

void BM_WkbExponentNumeric(benchmark::State& state) {
    const BarrierSpec spec(MarketParams(0.03, 0.47), 3.9);
    const double rel_tol = 1.0 / std::pow(10.0, state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(wkb_exponent_numeric(spec, rel_tol));
    }
}
BENCHMARK(BM_WkbExponentNumeric)->Arg(6)->Arg(9)->Arg(11);

void BM_IntegrateWavefunction(benchmark::State& state) {
    const BarrierSpec spec(MarketParams(0.03, 0.55), 3.36);
    const int n_steps = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate_wavefunction(spec, n_steps));
    }
}
BENCHMARK(BM_IntegrateWavefunction)->Arg(100)->Arg(1000)->Arg(10000);

void BM_DetectRange(benchmark::State& state) {
    const int window = static_cast<int>(state.range(0));
    const auto bars = oscillating_bars(123.3, 127.2, window);
    RangeConfig cfg;
    cfg.window = window;
    for (auto _ : state) {
        benchmark::DoNotOptimize(detect_range(bars, cfg));
    }
}
BENCHMARK(BM_DetectRange)->Arg(20)->Arg(100)->Arg(500);

void BM_Backtest(benchmark::State& state) {
    const int bars_count = static_cast<int>(state.range(0));
    auto bars = oscillating_bars(123.3, 127.2, bars_count);
    std::vector<VolPoint> vols;
    for (std::size_t i = 0; i < bars.size(); i += 5) {
        vols.push_back({bars[i].date, 0.47 + 0.01 * static_cast<double>(i % 7)});
    }
    StrategyConfig strat_cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            backtest(bars, vols, 0.03, RangeConfig{}, strat_cfg, "BENCH"));
    }
}
BENCHMARK(BM_Backtest)->Arg(250)->Arg(2000);

void BM_ParseOhlcCsv(benchmark::State& state) {
    const auto bars = oscillating_bars(123.3, 127.2, static_cast<int>(state.range(0)));
    const std::string csv = to_csv(std::span<const OhlcBar>(bars));
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_ohlc_csv(csv, "bench"));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(csv.size()));
}
BENCHMARK(BM_ParseOhlcCsv)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
