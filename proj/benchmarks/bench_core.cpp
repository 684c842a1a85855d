#include <benchmark/benchmark.h>

#include "sbench/profiles.hpp"
#include "sbench/pt.hpp"
#include "sbench/wishart.hpp"

using namespace sbench;

namespace {

IsingInstance make_instance(int n) {
    return generate_wishart({n, 0.5, 42, 1})[0];
}

void bm_energy(benchmark::State& state) {
    const auto inst = make_instance(static_cast<int>(state.range(0)));
    SpinConfig s;
    s.spins.assign(inst.n(), 1);
    for (auto _ : state) benchmark::DoNotOptimize(inst.energy(s));
}
BENCHMARK(bm_energy)->Arg(32)->Arg(128);

void bm_delta_energy(benchmark::State& state) {
    const auto inst = make_instance(static_cast<int>(state.range(0)));
    SpinConfig s;
    s.spins.assign(inst.n(), 1);
    int i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(inst.delta_energy(s, i));
        i = (i + 1) % inst.n();
    }
}
BENCHMARK(bm_delta_energy)->Arg(32)->Arg(128);

void bm_metropolis_sweep(benchmark::State& state) {
    const auto inst = make_instance(static_cast<int>(state.range(0)));
    SpinConfig s;
    s.spins.assign(inst.n(), 1);
    Rng rng(7);
    double e = inst.energy(s);
    for (auto _ : state) {
        e = metropolis_sweep(inst, s, 1.0, rng, e);
        benchmark::DoNotOptimize(e);
    }
}
BENCHMARK(bm_metropolis_sweep)->Arg(32)->Arg(128);

void bm_bootstrap_profile(benchmark::State& state) {
    SampleSet set;
    set.instance_id = "inst";
    set.solver_id = "pt";
    set.params = {"pt", {{"sweeps", 10.0}}};
    Rng rng(11);
    for (int k = 0; k < 100; ++k) {
        set.records.push_back({-rng.uniform(0.0, 1.0), std::nullopt, 10.0,
                               static_cast<std::uint64_t>(k)});
        set.total_resource += 10.0;
    }
    const ResourceGrid grid = ResourceGrid::log_spaced(10.0, 1000.0, 10);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            bootstrap_profile(set, grid, static_cast<int>(state.range(0)), 0.95, -1.0, 0.0, 3));
}
BENCHMARK(bm_bootstrap_profile)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
