// OpenMP kernels against their serial references.
//
//   ./bench_kernels --benchmark_filter=FillSample

#include "bandlab/kernels.hpp"
#include "bandlab/profile.hpp"
#include "bandlab/spectra.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace bandlab;

namespace {

const VarianceProfile& profile_for(int n) {
    static std::map<int, VarianceProfile> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, VarianceProfile::circulant(n, static_cast<int>(std::sqrt(n)) * 2, ProfileFunction::indicator()))
                 .first;
    return it->second;
}

template <bool Parallel>
void BM_FillSample(benchmark::State& state) {
    const auto& p = profile_for(static_cast<int>(state.range(0)));
    CMatrix out;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::parallel::fill_sample(p, DistTag::gaussian_complex, seed++, out);
        else
            kernels::reference::fill_sample(p, DistTag::gaussian_complex, seed++, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <bool Parallel>
void BM_MaxRowAbsSum(benchmark::State& state) {
    const auto n = state.range(0);
    const CMatrix m = CMatrix::Random(n, n);
    for (auto _ : state) {
        double v = Parallel ? kernels::parallel::max_row_abs_sum(m) : kernels::reference::max_row_abs_sum(m);
        benchmark::DoNotOptimize(v);
    }
}

template <bool Parallel>
void BM_StieltjesCurve(benchmark::State& state) {
    const auto n = state.range(0);
    std::vector<double> svals(n);
    for (int k = 0; k < n; ++k) svals[k] = 3.0 * (k + 0.5) / n;
    std::vector<double> etas(64);
    for (int k = 0; k < 64; ++k) etas[k] = 10.0 * std::pow(1e-4, k / 63.0);
    for (auto _ : state) {
        auto m = Parallel ? kernels::parallel::stieltjes_curve(svals, etas) : kernels::reference::stieltjes_curve(svals, etas);
        benchmark::DoNotOptimize(m.data());
    }
}

template <bool Parallel>
void BM_NormScan(benchmark::State& state) {
    const auto& p = profile_for(static_cast<int>(state.range(0)));
    ScanOptions opts;
    opts.parallel = Parallel;
    for (auto _ : state) {
        auto r = scan_norm_condition(p, {0.5, 0.0}, 0.02, 3, opts);
        benchmark::DoNotOptimize(r.max_norm);
    }
}

}  // namespace

BENCHMARK(BM_FillSample<true>)->Name("FillSample/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_FillSample<false>)->Name("FillSample/reference")->Arg(256)->Arg(1024);
BENCHMARK(BM_MaxRowAbsSum<true>)->Name("MaxRowAbsSum/parallel")->Arg(512)->Arg(2048);
BENCHMARK(BM_MaxRowAbsSum<false>)->Name("MaxRowAbsSum/reference")->Arg(512)->Arg(2048);
BENCHMARK(BM_StieltjesCurve<true>)->Name("StieltjesCurve/parallel")->Arg(1024)->Arg(4096);
BENCHMARK(BM_StieltjesCurve<false>)->Name("StieltjesCurve/reference")->Arg(1024)->Arg(4096);
BENCHMARK(BM_NormScan<true>)->Name("NormScan/parallel")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormScan<false>)->Name("NormScan/reference")->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
