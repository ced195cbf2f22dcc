#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "atomflux/errors.hpp"
#include "atomflux/tdse_oracle.hpp"
#include "oracles.hpp"

using namespace atomflux;

namespace {

GridLayout reference_layout(const FieldSetup& f, const PacketSpec& s, std::size_t cells) {
    return aligned_layout(f, s.x0 - 9.0 * s.sigma0, f.length + 9.0 * s.sigma0, cells);
}

}  // namespace

TEST_SUITE("tdse") {

TEST_CASE("aligned layout puts both field edges on nodes") {
    const FieldSetup f = oracle::field();
    const GridLayout g = aligned_layout(f, -301.7e-6, 250e-6, 1600);
    CHECK(g.dx == doctest::Approx(f.length / 1600).epsilon(1e-15));
    CHECK(std::has_single_bit(g.n));
    CHECK(g.x_min <= -301.7e-6);
    CHECK(g.x_min + g.dx * static_cast<double>(g.n - 1) >= 250e-6);
    const double i0 = -g.x_min / g.dx;
    CHECK(std::abs(i0 - std::round(i0)) < 1e-6);
    CHECK_THROWS_AS(aligned_layout(f, 1.0, 0.0, 1600), InvalidArgument);
    CHECK_THROWS_AS(aligned_layout(f, 0.0, 1.0, 0), InvalidArgument);
}

TEST_CASE("initial grid") {
    const FieldSetup f = oracle::field();
    const PacketSpec s = oracle::packet_spec();
    SUBCASE("matches the spectral packet") {
        const GridState g = init_grid(f, s, reference_layout(f, s, 1600));
        CHECK(std::abs(g.norm() - 1.0) < 1e-9);
        CHECK(g.t == 0.0);
        const SpectralPacket p = build_packet(f, s);
        const OracleReport r = compare_with_spectral(g, p, 1e-3);
        CHECK(r.passed);
        CHECK(r.l2_relative < 1e-3);
        CHECK(r.grid_beyond < 1e-12);
    }
    SUBCASE("domain too small") {
        CHECK_THROWS_AS(init_grid(f, s, aligned_layout(f, -100e-6, 300e-6, 1600)), InvalidArgument);
        CHECK_THROWS_AS(init_grid(f, s, aligned_layout(f, s.x0 - 9.0 * s.sigma0, 150e-6, 1600)), InvalidArgument);
    }
}

TEST_CASE("time step precondition") {
    const FieldSetup f = oracle::field();
    const PacketSpec s = oracle::packet_spec();
    GridState g = init_grid(f, s, reference_layout(f, s, 400));
    const double dt_max = max_time_step(f, s);
    CHECK(default_time_step(f, s) == doctest::Approx(0.5 * dt_max).epsilon(1e-15));
    // the Rabi term sets the scale in the reference scenario
    CHECK(dt_max == doctest::Approx(0.1 / f.rabi).epsilon(1e-12));
    CHECK_THROWS_AS(SplitStepPropagator(f, s, g, 1.01 * dt_max), InvalidArgument);
    CHECK_THROWS_AS(SplitStepPropagator(f, s, g, 0.0), InvalidArgument);
    CHECK_NOTHROW(SplitStepPropagator(f, s, g, 0.99 * dt_max));
}

TEST_CASE("free spreading matches the analytic Gaussian") {
    const FieldSetup f = oracle::field(0.0, 0.0);
    // a narrow packet spreads visibly within a thousand steps
    const PacketSpec s = oracle::packet_spec(1e-6, -10e-6);
    GridState g = init_grid(f, s, reference_layout(f, s, 3200));
    const double dt = 0.9 * max_time_step(f, s);
    SplitStepPropagator prop(f, s, g, dt);
    prop.advance(1000);
    CHECK(g.t == doctest::Approx(1000 * dt).epsilon(1e-12));
    const oracle::FreeGaussian exact = oracle::free_gaussian(s);
    REQUIRE(exact.width(g.t) > 1.01 * s.sigma0);
    double worst = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const cplx e = exact.psi(g.x(i), g.t);
        worst = std::max(worst, std::abs(g.psi1[i] - e));
        peak = std::max(peak, std::abs(e));
    }
    CHECK(worst < 1e-6 * peak);
    CHECK(*std::max_element(g.psi2.begin(), g.psi2.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); }) == cplx{});
    CHECK(std::abs(g.norm() - 1.0) < 1e-9);
}

TEST_CASE("uniform state inside the field undergoes Rabi oscillation") {
    const PacketSpec s = oracle::packet_spec();
    for (double detuning : {0.0, 0.5 * oracle::rabi, -0.8 * oracle::rabi}) {
        const FieldSetup f = oracle::field(detuning);
        GridState g;
        g.n = 64;
        g.dx = f.length / 100.0;
        g.x_min = g.dx;
        g.psi1.assign(g.n, cplx(1.0, 0.0));
        g.psi2.assign(g.n, cplx{});
        const double dt = default_time_step(f, s);
        SplitStepPropagator prop(f, s, g, dt);
        for (int block = 0; block < 8; ++block) {
            prop.advance(97);
            const double excited = std::norm(g.psi2[g.n / 2]);
            CAPTURE(detuning);
            CAPTURE(g.t);
            CHECK(std::abs(excited - oracle::rabi_population(f.rabi, detuning, g.t)) < 1e-10);
            CHECK(std::abs(std::norm(g.psi1[0]) + std::norm(g.psi2[0]) - 1.0) < 1e-12);
            CHECK(std::abs(g.psi2[0] - g.psi2[g.n - 1]) < 1e-12);
        }
    }
}

TEST_CASE("reference propagation") {
    const FieldSetup f = oracle::field();
    const PacketSpec s = oracle::packet_spec();
    GridState g = init_grid(f, s, reference_layout(f, s, 1600));
    SplitStepPropagator prop(f, s, g, default_time_step(f, s));
    prop.advance(2000);
    CHECK(std::abs(g.norm() - 1.0) < 1e-10);
    // the packet has not reached the field yet, so the excited channel is still empty
    CHECK(g.probability_beyond(0.0) < 1e-6);
    SUBCASE("advance_to stops on the first step boundary at or after t") {
        const double target = g.t + 10.5 * prop.dt();
        prop.advance_to(target);
        CHECK(g.t >= target);
        CHECK(g.t - target < prop.dt());
        const double before = g.t;
        prop.advance_to(before - prop.dt());
        CHECK(g.t == before);
    }
}

TEST_CASE("free propagation agrees with the spectral packet") {
    const FieldSetup f = oracle::field(0.0, 0.0);
    const PacketSpec s = oracle::packet_spec();
    GridState g = init_grid(f, s, reference_layout(f, s, 1600));
    SplitStepPropagator prop(f, s, g, 0.9 * max_time_step(f, s));
    prop.advance_to(5e-3);
    const OracleReport r = compare_with_spectral(g, build_packet(f, s), 1e-4);
    CHECK(r.l2_relative < 1e-4);
    CHECK(r.passed);
}

TEST_CASE("single step matches the propagator") {
    const FieldSetup f = oracle::field();
    const PacketSpec s = oracle::packet_spec();
    GridState a = init_grid(f, s, reference_layout(f, s, 400));
    GridState b = a;
    const double dt = default_time_step(f, s);
    step(a, f, s, dt);
    SplitStepPropagator prop(f, s, b, dt);
    prop.step();
    CHECK(a.t == b.t);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) worst = std::max(worst, std::abs(a.psi1[i] - b.psi1[i]));
    CHECK(worst == 0.0);
}

TEST_CASE("grid probability bookkeeping") {
    GridState g;
    g.n = 5;
    g.dx = 0.5;
    g.x_min = -1.0;
    g.psi1.assign(g.n, cplx(1.0, 0.0));
    g.psi2.assign(g.n, cplx{});
    CHECK(g.norm() == doctest::Approx(2.5));
    CHECK(g.probability_beyond(0.0) == doctest::Approx(1.25));  // node at 0 counts half
    CHECK(g.probability_beyond(0.25) == doctest::Approx(1.0));
    g.psi2[4] = cplx(0.0, 2.0);
    CHECK(g.edge_density(1) == doctest::Approx(5.0));
}

}  // TEST_SUITE
