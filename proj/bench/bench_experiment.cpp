#include "uavqoe/log.hpp"
#include "uavqoe/runner.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace uavqoe;

namespace
{

std::vector<PolicySpec> every_policy()
{
    std::vector<PolicySpec> specs;
    for (PolicyKind k : all_policies())
        specs.push_back(PolicySpec::of(k));
    return specs;
}

WorldConfig bench_config(int T)
{
    WorldConfig cfg;
    cfg.horizon_T = T;
    return cfg;
}

void BM_ExperimentSerial(benchmark::State &state)
{
    const auto cfg = bench_config(static_cast<int>(state.range(0)));
    const auto specs = every_policy();
    for (auto _ : state)
        benchmark::DoNotOptimize(run_experiment_serial(specs, cfg, 4, 1));
}

void BM_ExperimentParallel(benchmark::State &state)
{
    const auto cfg = bench_config(static_cast<int>(state.range(0)));
    const auto specs = every_policy();
    state.counters["threads"] = omp_get_max_threads();
    for (auto _ : state)
        benchmark::DoNotOptimize(run_experiment(specs, cfg, 4, 1));
}

void BM_SingleRun(benchmark::State &state)
{
    const auto cfg = bench_config(20);
    const auto spec = PolicySpec::of(static_cast<PolicyKind>(state.range(0)));
    state.SetLabel(to_string(spec.kind));
    for (auto _ : state)
        benchmark::DoNotOptimize(run_policy(spec, cfg, 1));
}

} // namespace

BENCHMARK(BM_ExperimentSerial)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExperimentParallel)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SingleRun)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

int main(int argc, char **argv)
{
    init_logging("warn");
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv))
        return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
