#include <benchmark/benchmark.h>

#include "socsim/engine.hpp"
#include "socsim/sched_heuristic.hpp"
#include "socsim/sched_neural.hpp"
#include "socsim/workload.hpp"

using namespace socsim;

namespace {

Platform bench_platform(int pes = 4) {
    Platform p;
    for (int i = 0; i < pes; ++i) {
        ProcessingElement pe;
        pe.pe_id = i;
        pe.name = "pe" + std::to_string(i);
        p.pes.push_back(pe);
    }
    for (int i = 0; i < pes; ++i)
        for (int j = 0; j < pes; ++j)
            if (i != j) p.bandwidth[{i, j}] = 1.0;
    p.mu = 0.5;
    return p;
}

std::vector<JobDag> bench_workloads(int count) {
    DagGenParams params;
    params.v = 10;
    params.alpha = 0.8;
    CompCostModel costs;
    costs.cost_mean = 13.3;
    costs.cost_std = 4.1;
    std::vector<JobDag> out;
    Rng root(1);
    for (int i = 0; i < count; ++i) {
        Rng rng = root.split(static_cast<std::uint64_t>(i));
        out.push_back(synthesize_dag(params, rng, costs));
    }
    return out;
}

} // namespace

static void BM_SynthesizeDag(benchmark::State& state) {
    DagGenParams params;
    params.v = static_cast<int>(state.range(0));
    params.alpha = 0.8;
    std::uint64_t i = 0;
    for (auto _ : state) {
        Rng rng(i++);
        JobDag dag = synthesize_dag(params, rng);
        benchmark::DoNotOptimize(dag);
    }
}
BENCHMARK(BM_SynthesizeDag)->Arg(10)->Arg(50)->Arg(200);

static void BM_RunEpisode(benchmark::State& state) {
    Platform platform = bench_platform();
    auto workloads = bench_workloads(20);
    SimConfig cfg;
    cfg.sim_length = state.range(0);
    cfg.capacity = 3;
    cfg.num_workloads = 200;
    cfg.quasi_steady = true;
    cfg.seed = 7;
    for (auto _ : state) {
        auto scheduler = make_heuristic_scheduler("stf");
        EpisodeResult result = run_episode(workloads, platform, *scheduler, cfg);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_RunEpisode)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_RunEpisodeHeft(benchmark::State& state) {
    Platform platform = bench_platform();
    auto workloads = bench_workloads(20);
    SimConfig cfg;
    cfg.sim_length = state.range(0);
    cfg.capacity = 3;
    cfg.num_workloads = 200;
    cfg.quasi_steady = true;
    cfg.seed = 7;
    for (auto _ : state) {
        auto scheduler = make_heuristic_scheduler("heft_rt");
        EpisodeResult result = run_episode(workloads, platform, *scheduler, cfg);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_RunEpisodeHeft)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_TaskWindowReturns(benchmark::State& state) {
    Rng rng(3);
    const std::int64_t CLK = 10000;
    std::vector<double> rewards(CLK);
    for (auto& r : rewards) r = rng.normal(0.0, 5.0);
    std::vector<ActionWindow> windows;
    for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
        std::int64_t start = 1 + rng.uniform_int(CLK - 50);
        windows.push_back({start, start + rng.uniform_int(40), false});
    }
    for (auto _ : state) {
        auto out = task_window_returns(windows, rewards, 0.98);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_TaskWindowReturns)->Arg(1000)->Arg(4000);

static void BM_PolicyForward(benchmark::State& state) {
    ObservationSpec spec;
    spec.capacity = 3;
    spec.v_max = 10;
    spec.num_pes = 4;
    PolicyModel model(spec.query_dim(ActionMode::independent, 1), spec.num_pes, 128);
    Rng rng(5);
    model.init_params(rng);
    std::vector<double> input(static_cast<std::size_t>(model.input_dim()));
    for (auto& x : input) x = rng.normal(0.0, 1.0);
    for (auto _ : state) {
        auto fwd = model.forward(input);
        benchmark::DoNotOptimize(fwd);
    }
}
BENCHMARK(BM_PolicyForward);

BENCHMARK_MAIN();
