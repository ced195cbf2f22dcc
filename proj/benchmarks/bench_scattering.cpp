#include <benchmark/benchmark.h>

#include "atomflux/scattering.hpp"
#include "reference.hpp"

namespace {

void BM_SolveMatching(benchmark::State& state) {
    const atomflux::FieldSetup f = bench::field(static_cast<double>(state.range(0)));
    const double k0 = bench::spec().k0;
    double k = k0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(atomflux::solve_matching(f, k));
        k = k < 1.01 * k0 ? k * 1.0001 : k0;
    }
}
// on resonance and 20 kHz off
BENCHMARK(BM_SolveMatching)->Arg(0)->Arg(125664);

void BM_StationaryState(benchmark::State& state) {
    const atomflux::FieldSetup f = bench::field();
    const atomflux::ScatteringSolution s = atomflux::solve_matching(f, bench::spec().k0);
    const double x = 1e-6 * static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(atomflux::stationary_state(s, f, x));
}
BENCHMARK(BM_StationaryState)->Arg(-50)->Arg(50)->Arg(150);

}  // namespace
