#include <benchmark/benchmark.h>

#include "alt/calibration.hpp"

namespace {

alt::SyntheticData make_data(std::size_t n) {
    alt::MsmParams p{};
    p.c1 = 0.10;
    p.c2 = -0.16;
    p.sigma_eps2 = 0.0025;
    p.lambda_rate = p.mu_rate = 0.5;
    p.L1 = 0.25;
    p.T1 = 0.35;
    return alt::generate_synthetic(p, n, 42, std::vector<double>(n, 0.02));
}

void BM_ForwardPaths(benchmark::State& state) {
    const alt::SyntheticData data = make_data(168);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            alt::forward_paths(data.params, data.states, data.series));
}
BENCHMARK(BM_ForwardPaths);

void BM_LogLikelihood(benchmark::State& state) {
    const alt::SyntheticData data = make_data(168);
    const alt::StatePath path = alt::forward_paths(data.params, data.states, data.series);
    for (auto _ : state)
        benchmark::DoNotOptimize(alt::log_likelihood(data.params, path, data.series));
}
BENCHMARK(BM_LogLikelihood);

void BM_GibbsIteration(benchmark::State& state) {
    const alt::SyntheticData data = make_data(168);
    alt::GibbsConfig cfg;
    cfg.iterations = 2;
    cfg.burn_in = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(alt::gibbs_run(data.series, cfg, 7));
}
BENCHMARK(BM_GibbsIteration)->Unit(benchmark::kMillisecond);

}  // namespace
