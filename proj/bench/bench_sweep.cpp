#include <benchmark/benchmark.h>

#include <vector>

#include "qes/darboux.hpp"

namespace {

std::vector<qes::SweepPoint> grid(int n_k2) {
    std::vector<qes::SweepPoint> pts;
    for (int l = -4; l <= 4; ++l)
        for (int m = -7; m <= 9; m += 2)
            for (int j = 1; j <= n_k2; ++j) pts.push_back({qes::Rational(l, 2), qes::Rational(m, 2), j / (n_k2 + 1.0)});
    return pts;
}

void BM_sweep_serial(benchmark::State& st) {
    const auto pts = grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(qes::sweep_serial(pts));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(pts.size()));
}

void BM_sweep_parallel(benchmark::State& st) {
    const auto pts = grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(qes::sweep_parallel(pts));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(pts.size()));
}

}  // namespace

BENCHMARK(BM_sweep_serial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_sweep_parallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
