// Serial references against the blocked OpenMP kernels.
//   ./bench_kernels --benchmark_filter=fit_multi
// The thread cap follows OFF_THREADS.

#include "off/glm.hpp"
#include "off/models.hpp"
#include "off/parallel.hpp"
#include "off/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <map>

namespace {

using namespace off;

const LabeledDataset& data(Index rows)
{
    static std::map<Index, LabeledDataset> cache;
    auto it = cache.find(rows);
    if (it == cache.end()) {
        it = cache.emplace(rows, synthetic::sample_family(synthetic::paper_synthetic(), rows, 1)).first;
    }
    return it->second;
}

Matrix design(const LabeledDataset& ds)
{
    Matrix X(ds.rows(), ds.n() + ds.r());
    X << ds.base(), ds.optional_values().array().isFinite().select(ds.optional_values(), 0.0);
    return X;
}

void fit_logistic_parallel(benchmark::State& state)
{
    const auto& ds = data(state.range(0));
    const Matrix X = design(ds);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_logistic(X, ds.labels()));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void fit_logistic_serial(benchmark::State& state)
{
    const auto& ds = data(state.range(0));
    const Matrix X = design(ds);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::fit_logistic_serial(X, ds.labels()));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void fit_multi_parallel(benchmark::State& state)
{
    const auto& ds = data(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_multi(ds));
    }
}

void fit_multi_serial(benchmark::State& state)
{
    const auto& ds = data(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::fit_multi_serial(ds));
    }
}

void fit_off_lr_parallel(benchmark::State& state)
{
    const auto& ds = data(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_off_lr(ds));
    }
}

void fit_off_lr_serial(benchmark::State& state)
{
    const auto& ds = data(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::fit_off_lr_serial(ds));
    }
}

void sample_parallel(benchmark::State& state)
{
    const auto p = synthetic::paper_synthetic();
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthetic::sample_family(p, state.range(0), 3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void sample_serial(benchmark::State& state)
{
    const auto p = synthetic::paper_synthetic();
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthetic::reference::sample_family_serial(p, state.range(0), 3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(fit_logistic_parallel)->Arg(10000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK(fit_logistic_serial)->Arg(10000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK(fit_multi_parallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(fit_multi_serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(fit_off_lr_parallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(fit_off_lr_serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(sample_parallel)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(sample_serial)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv)
{
    off::parallel::set_max_threads(off::parallel::threads_from_env());
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) {
        return 1;
    }
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
