#include <benchmark/benchmark.h>

#include "atomflux/wavepacket.hpp"
#include "reference.hpp"

namespace {

void BM_BuildPacket(benchmark::State& state) {
    atomflux::PacketOptions o;
    o.n_nodes = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(atomflux::build_packet(bench::field(), bench::spec(), o));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildPacket)->RangeMultiplier(2)->Range(256, 4096)->Complexity(benchmark::oN)->Unit(benchmark::kMicrosecond);

// density left of, inside and right of the field at 30 ms
void BM_Density(benchmark::State& state) {
    const atomflux::SpectralPacket& p = bench::packet();
    const double x = 1e-6 * static_cast<double>(state.range(0));
    double t = 0.03;
    for (auto _ : state) {
        benchmark::DoNotOptimize(atomflux::density(p, x, t));
        t += 1e-9;
    }
}
BENCHMARK(BM_Density)->Arg(-50)->Arg(50)->Arg(150)->Unit(benchmark::kMicrosecond);

void BM_PresenceSpatial(benchmark::State& state) {
    const atomflux::SpectralPacket& p = bench::packet();
    const double t = 1e-3 * static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(atomflux::presence_probability(p, 1e-4, t, atomflux::PresenceMethod::spatial));
    }
}
BENCHMARK(BM_PresenceSpatial)->Arg(0)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_TransmissionProbability(benchmark::State& state) {
    const atomflux::SpectralPacket& p = bench::packet();
    for (auto _ : state) benchmark::DoNotOptimize(atomflux::transmission_probability(p));
}
BENCHMARK(BM_TransmissionProbability);

}  // namespace
