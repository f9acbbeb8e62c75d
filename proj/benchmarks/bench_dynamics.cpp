#include <benchmark/benchmark.h>

#include "alt/closed_form.hpp"
#include "alt/phase_portrait.hpp"
#include "alt/stability.hpp"
#include "alt/trajectory.hpp"

namespace {

const alt::Params kRegular{0.05, 0.06, 0.04, 0.05};
const alt::Params kCrisis{0.05, -0.01, 0.04, 0.05};

void BM_Derivatives(benchmark::State& state) {
    const alt::EconState s{1.0, 0.2, 0.4};
    for (auto _ : state) benchmark::DoNotOptimize(alt::derivatives(s, kRegular));
}
BENCHMARK(BM_Derivatives);

void BM_Jacobian(benchmark::State& state) {
    for (auto _ : state) {
        const alt::Matrix2 j = alt::jacobian(0.3, 0.6, kRegular);
        benchmark::DoNotOptimize(alt::eigenvalues(j));
    }
}
BENCHMARK(BM_Jacobian);

void BM_TrajectoryAdaptive(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(alt::integrate({1.0, 0.2, 0.4}, kRegular, {}));
}
BENCHMARK(BM_TrajectoryAdaptive);

void BM_TrajectoryToPoint(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(alt::integrate({1.0, 0.1, 0.5}, kCrisis, {}));
}
BENCHMARK(BM_TrajectoryToPoint);

void BM_TrajectoryEuler(benchmark::State& state) {
    alt::IntegratorConfig cfg;
    cfg.method = alt::StepMethod::Euler;
    cfg.step = 1e-3;
    for (auto _ : state)
        benchmark::DoNotOptimize(alt::integrate({1.0, 0.2, 0.4}, kRegular, cfg));
}
BENCHMARK(BM_TrajectoryEuler);

void BM_ClosedFormEval(benchmark::State& state) {
    const alt::ClosedFormTrajectory curve = alt::fit_through(0.4, 0.2, kRegular);
    double trust = 0.41;
    for (auto _ : state) {
        benchmark::DoNotOptimize(alt::leverage_of_trust(trust, curve));
        trust = trust < 0.99 ? trust + 1e-4 : 0.41;
    }
}
BENCHMARK(BM_ClosedFormEval);

void BM_BasinMap21(benchmark::State& state) {
    const alt::GridSpec grid{21, 21, 1e-3};
    for (auto _ : state)
        benchmark::DoNotOptimize(alt::basin_map(kCrisis, grid, {}, 1));
}
BENCHMARK(BM_BasinMap21)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
