#include <benchmark/benchmark.h>
#include <omp.h>

#include "reference.hpp"
#include "specfreq/specfreq.hpp"

using namespace specfreq;

namespace {

Matrix panel_values(std::size_t n, std::size_t p) {
    Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    CounterRng rng(StreamKey{42, 0});
    rng.fill_normal(std::span<double>(x.data(), static_cast<std::size_t>(x.size())));
    return x;
}

reference::PairList pair_list(const IndexSet& pairs) {
    reference::PairList out;
    for (const auto& pr : pairs) out.emplace_back(pr.first, pr.second);
    return out;
}

void set_threads(benchmark::State& state) {
    omp_set_num_threads(static_cast<int>(state.range(1)));
    state.counters["threads"] = static_cast<double>(state.range(1));
}

void BM_SpectrumParallel(benchmark::State& state) {
    set_threads(state);
    const TimePanel panel(panel_values(256, static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_spectrum(panel, Bandwidth{3}, FlatTopKernel(0.5), FrequencySet::monthly()));
    }
}

void BM_SpectrumSerial(benchmark::State& state) {
    const Matrix x = panel_values(256, static_cast<std::size_t>(state.range(0)));
    const auto grid = FrequencySet::monthly().grid();
    for (auto _ : state) {
        for (double omega : grid) benchmark::DoNotOptimize(reference::spectrum(x, 3, 0.5, omega));
    }
}

void BM_LagPanelParallel(benchmark::State& state) {
    set_threads(state);
    const auto p = static_cast<std::size_t>(state.range(0));
    const TimePanel panel(panel_values(256, p));
    const IndexSet pairs = IndexSet::lower_off_diagonal(p);
    for (auto _ : state) benchmark::DoNotOptimize(build_lag_panel(panel, pairs, Bandwidth{2}));
}

void BM_LagPanelSerial(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const Matrix x = panel_values(256, p);
    const auto pairs = pair_list(IndexSet::lower_off_diagonal(p));
    for (auto _ : state) benchmark::DoNotOptimize(reference::lag_panel(x, pairs, 2));
}

void BM_LongRunParallel(benchmark::State& state) {
    set_threads(state);
    const auto p = static_cast<std::size_t>(state.range(0));
    const LagPanel lag = build_lag_panel(TimePanel(panel_values(256, p)), IndexSet::lower_off_diagonal(p), Bandwidth{2});
    for (auto _ : state) benchmark::DoNotOptimize(estimate_longrun(lag, 3.0));
}

void BM_LongRunSerial(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const LagPanel lag = build_lag_panel(TimePanel(panel_values(256, p)), IndexSet::lower_off_diagonal(p), Bandwidth{2});
    for (auto _ : state) benchmark::DoNotOptimize(reference::longrun(lag.rows(), 3.0));
}

constexpr std::size_t kDraws = 200;

void BM_BootstrapParallel(benchmark::State& state) {
    set_threads(state);
    const auto p = static_cast<std::size_t>(state.range(0));
    const LagPanel lag = build_lag_panel(TimePanel(panel_values(256, p)), IndexSet::lower_off_diagonal(p), Bandwidth{2});
    MultiplierConfig cfg;
    cfg.replicates = kDraws;
    cfg.route = MultiplierRoute::TimeDomain;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            run_bootstrap(lag, FrequencySet::quarterly(), Bandwidth{2}, FlatTopKernel(0.5), 3.0, cfg));
    }
}

void BM_BootstrapSerial(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const IndexSet pairs = IndexSet::lower_off_diagonal(p);
    const LagPanel lag = build_lag_panel(TimePanel(panel_values(256, p)), pairs, Bandwidth{2});
    const ToeplitzFactor factor = factor_theta(lag.length(), 3.0, 1e-10);
    const auto grid = FrequencySet::quarterly().grid();
    for (auto _ : state) {
        for (std::size_t b = 0; b < kDraws; ++b) {
            const Vector eps = draw_multipliers(factor, StreamKey{0, 0}.child(b));
            benchmark::DoNotOptimize(reference::xi(lag.rows(), pairs.size(), 2, 0.5, grid, eps));
        }
    }
}

void parallel_args(benchmark::internal::Benchmark* b) {
    const int max_threads = omp_get_max_threads();
    for (int p : {4, 12}) {
        b->Args({p, 1});
        if (max_threads > 1) b->Args({p, max_threads});
    }
    b->Unit(benchmark::kMillisecond);
}

void serial_args(benchmark::internal::Benchmark* b) {
    b->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_SpectrumParallel)->Apply(parallel_args);
BENCHMARK(BM_SpectrumSerial)->Apply(serial_args);
BENCHMARK(BM_LagPanelParallel)->Apply(parallel_args);
BENCHMARK(BM_LagPanelSerial)->Apply(serial_args);
BENCHMARK(BM_LongRunParallel)->Apply(parallel_args);
BENCHMARK(BM_LongRunSerial)->Apply(serial_args);
BENCHMARK(BM_BootstrapParallel)->Apply(parallel_args);
BENCHMARK(BM_BootstrapSerial)->Apply(serial_args);

BENCHMARK_MAIN();
