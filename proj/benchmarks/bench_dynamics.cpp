#include <plateswarm/control.hpp>
#include <plateswarm/presets.hpp>
#include <plateswarm/sampling.hpp>
#include <plateswarm/sim.hpp>

#include <benchmark/benchmark.h>

using namespace plateswarm;

namespace {

SystemState moderate_state() {
    sampling::Rng rng(1);
    return sampling::random_state(rng, sampling::moderate_ranges());
}

ControlInput some_input() {
    ControlInput u = ControlInput::zero();
    for (int i = 0; i < kVehicles; ++i) u.u[i] = Vec3(0.5, -0.3, 12.0);
    return u;
}

void BM_FullDynamics(benchmark::State& st) {
    const SystemParams p;
    const SystemState s = moderate_state();
    const ControlInput u = some_input();
    for (auto _ : st) benchmark::DoNotOptimize(model::full_dynamics(s, u, p));
}
BENCHMARK(BM_FullDynamics);

void BM_AllocateTensions(benchmark::State& st) {
    const SystemParams p;
    const Wrench w{Vec3(1, 2, 9), Vec3(0.1, -0.2, 0.05)};
    const Rotation R = geom::exp_so3(Vec3(0.2, 0.1, -0.3));
    for (auto _ : st) benchmark::DoNotOptimize(control::allocate_tensions(w, R, p));
}
BENCHMARK(BM_AllocateTensions);

void BM_ComputeControls(benchmark::State& st) {
    const Scenario sc = presets::paper_scenario();
    ControlOptions opt;
    opt.rates = static_cast<RateSource>(st.range(0));
    for (auto _ : st) {
        benchmark::DoNotOptimize(
            control::compute_controls(sc.initial, sc.gains, {}, sc.params, sc.integrator.dt, opt));
    }
}
BENCHMARK(BM_ComputeControls)
    ->Arg(static_cast<int>(RateSource::ReducedModel))
    ->Arg(static_cast<int>(RateSource::BackwardDifference));

void BM_Step(benchmark::State& st) {
    const SystemParams p;
    const SystemState s = moderate_state();
    const ControlInput u = some_input();
    for (auto _ : st) benchmark::DoNotOptimize(sim::step(s, u, p, 1e-3));
}
BENCHMARK(BM_Step);

void BM_SimulateOneSecond(benchmark::State& st) {
    Scenario sc = presets::paper_scenario();
    sc.integrator.duration = 1.0;
    for (auto _ : st) benchmark::DoNotOptimize(sim::simulate(sc));
    st.SetItemsProcessed(st.iterations() * 1000);
}
BENCHMARK(BM_SimulateOneSecond)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
