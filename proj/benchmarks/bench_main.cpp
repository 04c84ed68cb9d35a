#include <algorithm>
#include <vector>

#include <benchmark/benchmark.h>

#include "hfmargin/descstats.hpp"
#include "hfmargin/garch.hpp"
#include "hfmargin/marketdata.hpp"
#include "hfmargin/margins.hpp"
#include "hfmargin/rng.hpp"
#include "hfmargin/synth.hpp"
#include "hfmargin/tails.hpp"

using namespace hfmargin;

namespace {

std::vector<double> student(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.student_t(3.0);
    return v;
}

TickSeries one_year() {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::TickWalk;
    spec.params = TickWalkParams{};
    spec.seed = 1;
    return generate_ticks(spec);
}

}  // namespace

// 247 daily points up to a year of 5-minute returns.
static void BM_Huisman(benchmark::State& state) {
    auto v = student(static_cast<std::size_t>(state.range(0)), 1);
    std::sort(v.begin(), v.end());
    for (auto _ : state) benchmark::DoNotOptimize(huisman_estimate(v, 0));
}
BENCHMARK(BM_Huisman)->Arg(247)->Arg(2223)->Arg(27911);

static void BM_GarchFit(benchmark::State& state) {
    Garch11Params p;
    Rng rng(2);
    const auto sim = simulate_garch11(p, static_cast<std::size_t>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(fit_garch11(sim.returns));
}
BENCHMARK(BM_GarchFit)->Arg(247)->Arg(2223)->Unit(benchmark::kMillisecond);

static void BM_ResampleFiveMinute(benchmark::State& state) {
    const auto ticks = one_year();
    const TradingCalendar cal;
    for (auto _ : state) benchmark::DoNotOptimize(resample_intraday(ticks, std::chrono::minutes{5}, cal));
}
BENCHMARK(BM_ResampleFiveMinute)->Unit(benchmark::kMillisecond);

static void BM_ResampleAnchored(benchmark::State& state) {
    const auto ticks = one_year();
    for (auto _ : state) benchmark::DoNotOptimize(resample_anchored_daily(ticks, std::chrono::hours{12}));
}
BENCHMARK(BM_ResampleAnchored)->Unit(benchmark::kMillisecond);

static void BM_KsNull(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(KsNullDistribution(247, 1000, 3));
}
BENCHMARK(BM_KsNull)->Unit(benchmark::kMillisecond);

static void BM_MarginGrid(benchmark::State& state) {
    std::vector<std::vector<double>> series;
    std::vector<LabelledSeries> data;
    for (int i = 0; i < 9; ++i) series.push_back(student(247, 10 + i));
    for (int i = 0; i < 9; ++i) data.push_back({std::to_string(i), series[i]});
    const std::vector<double> cov{0.95, 0.99, 0.996, 0.998};
    const std::vector<Model> models{Model::Gaussian, Model::ExtremeValue, Model::Historical, Model::Garch};
    const auto specs = full_grid(cov, models);
    for (auto _ : state) benchmark::DoNotOptimize(margin_table(data, specs));
}
BENCHMARK(BM_MarginGrid)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
