#include "bbcpl/analysis.hpp"
#include "bbcpl/controllers.hpp"
#include "bbcpl/energy.hpp"
#include "bbcpl/sim.hpp"

#include <benchmark/benchmark.h>

namespace {

constexpr double kD = 0.59384078253350030422;

void BM_Hamiltonian(benchmark::State& state)
{
    const bbcpl::State x{0.9, 3.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(bbcpl::hamiltonian(x, kD, 0.01, 2.98943));
    }
}
BENCHMARK(BM_Hamiltonian);

void BM_Hessian(benchmark::State& state)
{
    const bbcpl::State x{0.9, 3.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(bbcpl::hessian(x, kD, 0.01, 2.98943));
    }
}
BENCHMARK(BM_Hessian);

void BM_IdaControl(benchmark::State& state)
{
    const bbcpl::State x{0.9, 3.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(bbcpl::ida_control(x, kD, 0.01, 2.98943));
    }
}
BENCHMARK(BM_IdaControl);

void BM_GainBounds(benchmark::State& state)
{
    const bbcpl::Equilibrium eq = bbcpl::equilibrium_for(4.0, kD);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bbcpl::make_gain_set(eq, kD, 0.01));
    }
}
BENCHMARK(BM_GainBounds);

void BM_SimulateIda(benchmark::State& state)
{
    bbcpl::Scenario s;
    s.initial_state = {0.4, 3.9};
    s.d_schedule = {{0.0, kD}};
    s.duration = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bbcpl::simulate(s));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_SimulateIda)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_FindSaddle(benchmark::State& state)
{
    const bbcpl::Equilibrium eq = bbcpl::equilibrium_for(4.0, kD);
    const double k2 = bbcpl::compute_k2(eq, kD, 0.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bbcpl::find_saddle(eq, kD, 0.01, k2, bbcpl::default_saddle_box(eq)));
    }
}
BENCHMARK(BM_FindSaddle)->Unit(benchmark::kMillisecond);

void BM_EstimateDomain(benchmark::State& state)
{
    const bbcpl::Equilibrium eq = bbcpl::equilibrium_for(4.0, kD);
    const double k2 = bbcpl::compute_k2(eq, kD, 0.01);
    bbcpl::DomainOptions opt;
    opt.grid_resolution = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bbcpl::estimate_domain(eq, kD, 0.01, k2, opt));
    }
}
BENCHMARK(BM_EstimateDomain)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
