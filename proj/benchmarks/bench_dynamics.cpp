#include <benchmark/benchmark.h>

#include "atomflux/bohmian.hpp"
#include "atomflux/tdse_oracle.hpp"
#include "atomflux/times.hpp"
#include "reference.hpp"

namespace {

void BM_Velocity(benchmark::State& state) {
    const atomflux::SpectralPacket& p = bench::packet();
    double t = 0.02;
    for (auto _ : state) {
        benchmark::DoNotOptimize(atomflux::velocity(p, 20e-6, t));
        t += 1e-9;
    }
}
BENCHMARK(BM_Velocity)->Unit(benchmark::kMicrosecond);

// one guidance trajectory through the field, 0 to 60 ms
void BM_Trajectory(benchmark::State& state) {
    const atomflux::SpectralPacket& p = bench::packet();
    for (auto _ : state) benchmark::DoNotOptimize(atomflux::integrate_trajectory(p, -115e-6, 0.06));
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMillisecond);

void BM_BifurcationStart(benchmark::State& state) {
    const atomflux::SpectralPacket& p = bench::packet();
    for (auto _ : state) benchmark::DoNotOptimize(atomflux::bifurcation_start(p));
}
BENCHMARK(BM_BifurcationStart)->Unit(benchmark::kMillisecond);

void BM_PointSeries(benchmark::State& state) {
    const atomflux::SpectralPacket& p = bench::packet();
    const auto t = atomflux::time_grid(1.2, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(atomflux::point_series(p, 1e-4, t));
}
BENCHMARK(BM_PointSeries)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_SplitStep(benchmark::State& state) {
    const atomflux::FieldSetup f = bench::field();
    const atomflux::PacketSpec s = bench::spec();
    const auto cells = static_cast<std::size_t>(state.range(0));
    atomflux::GridState g = atomflux::init_grid(f, s, atomflux::aligned_layout(f, -0.3e-3, 0.3e-3, cells));
    atomflux::SplitStepPropagator prop(f, s, g, atomflux::default_time_step(f, s));
    for (auto _ : state) prop.advance(10);
    state.SetItemsProcessed(state.iterations() * 10);
    state.counters["points"] = static_cast<double>(g.n);
}
BENCHMARK(BM_SplitStep)->Arg(1600)->Arg(6400)->Unit(benchmark::kMillisecond);

}  // namespace
