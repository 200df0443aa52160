#include <benchmark/benchmark.h>

#include "trunc/bodies.hpp"
#include "trunc/gauss.hpp"
#include "trunc/lb.hpp"
#include "trunc/rng.hpp"
#include "trunc/samplers.hpp"
#include "trunc/testers.hpp"

namespace {

using namespace trunctest;

void bm_normal(benchmark::State& state) {
    RngStream rng(1, 0);
    double acc = 0.0;
    for (auto _ : state) acc += rng.normal();
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(bm_normal);

void bm_gaussian_batch(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    RngStream rng(1, 0);
    for (auto _ : state) {
        const SampleBatch b = gaussian_batch(n, 1000, rng);
        benchmark::DoNotOptimize(b.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 1000 * n);
}
BENCHMARK(bm_gaussian_batch)->Arg(10)->Arg(100);

void bm_sample_halfspace(benchmark::State& state) {
    ConvexBody body;
    body.n = 100;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(100);
    v[0] = 1.0;
    body.shape = Halfspace{v, 0.5};
    const SamplerPlan plan = SamplerPlan::automatic(TruncationSpec::single(body));
    RngStream rng(1, 0);
    for (auto _ : state) {
        const SampleBatch b = sample_truncated(plan, 1000, rng);
        benchmark::DoNotOptimize(b.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(bm_sample_halfspace);

void bm_statistic_m(benchmark::State& state) {
    const SampleBatch batch = gaussian_batch(100, 5000, RngStream(1, 0));
    for (auto _ : state) benchmark::DoNotOptimize(statistic_M(batch));
}
BENCHMARK(bm_statistic_m);

void bm_wishart_logdet(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    RngStream rng(1, 0);
    std::uint64_t i = 0;
    for (auto _ : state) {
        PsdMatrix w = wishart_sample({p, 2 * p}, rng.substream(i++));
        benchmark::DoNotOptimize(chol_logdet(w).logdet);
    }
}
BENCHMARK(bm_wishart_logdet)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
