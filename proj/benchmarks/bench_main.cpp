#include <benchmark/benchmark.h>

#include "polytube/estimates.hpp"
#include "polytube/spectral.hpp"

namespace {

using namespace ptb;

void BM_TraceSquare(benchmark::State& state) {
    auto P = make_box({1.0, 1.0});
    Vec pos(2), dir(2);
    pos << 0.3, 0.0;
    dir << std::sqrt(2.0) / 2.0 + 1e-3, std::sqrt(2.0) / 2.0;
    dir.normalize();
    TraceLimits lim;
    lim.max_events = state.range(0);
    for (auto _ : state) {
        auto res = trace(P, {pos, dir, std::nullopt}, lim, 0.0);
        benchmark::DoNotOptimize(res.trajectory.total_length);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EnumerateSquare(benchmark::State& state) {
    auto P = make_box({1.0, 1.0});
    TubeSearchBounds bounds;
    bounds.max_word_period = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto atlas = enumerate_tubes(P, 0.2, bounds);
        benchmark::DoNotOptimize(atlas.tubes.size());
    }
}

void BM_OrbitDensity(benchmark::State& state) {
    Mat R(2, 2);
    double a = 2.0 * std::numbers::pi * 0.6180339887498949;
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    double eps = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto res = orbit_density_N(R, eps, 1.0);
        benchmark::DoNotOptimize(res.N);
    }
}

void BM_BoxMass(benchmark::State& state) {
    std::vector<double> dims{std::numbers::pi, std::numbers::pi,
                             std::numbers::pi};
    std::vector<int> idx{static_cast<int>(state.range(0)), 2, 3};
    for (auto _ : state) {
        double m = box_mode_mass(dims, idx, 0.3);
        benchmark::DoNotOptimize(m);
    }
}

}  // namespace

BENCHMARK(BM_TraceSquare)->Arg(100)->Arg(1000);
BENCHMARK(BM_EnumerateSquare)->Arg(4)->Arg(8);
BENCHMARK(BM_OrbitDensity)->Arg(10)->Arg(100);
BENCHMARK(BM_BoxMass)->Arg(1)->Arg(20);

BENCHMARK_MAIN();
