#include <doctest.h>

#include <random>
#include <tuple>

#include "atomflux/errors.hpp"
#include "atomflux/scattering.hpp"
#include "atomflux/wavepacket.hpp"
#include "oracles.hpp"

using namespace atomflux;

namespace {

constexpr cplx I(0.0, 1.0);

}  // namespace

TEST_SUITE("scattering") {

TEST_CASE("dressed eigenvalues on resonance") {
    const FieldSetup f = oracle::field();
    const DressedData d = dressed_decomposition(f);
    CHECK(d.lambda_plus == doctest::Approx(0.5 * f.rabi).epsilon(1e-14));
    CHECK(d.lambda_minus == doctest::Approx(-0.5 * f.rabi).epsilon(1e-14));
    CHECK(d.rabi_prime == doctest::Approx(f.rabi).epsilon(1e-14));
    CHECK(std::abs(d.c_plus - cplx(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(d.c_minus - cplx(-1.0, 0.0)) < 1e-14);
}

TEST_CASE("weak coupling limit") {
    const double delta = 2.0e4;
    const DressedData d = dressed_decomposition(oracle::field(delta, 1e-3));
    CHECK(std::abs(d.lambda_plus) < 1e-9);
    CHECK(d.lambda_minus == doctest::Approx(-delta).epsilon(1e-12));
}

TEST_CASE("dressed product identity and spinor phase") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> det(-1e6, 1e6), rab(1e2, 1e6), ph(-pi, pi);
    for (int i = 0; i < 1000; ++i) {
        const FieldSetup f = oracle::field(det(rng), rab(rng), ph(rng));
        const DressedData d = dressed_decomposition(f);
        const double target = -0.25 * f.rabi * f.rabi;
        REQUIRE(std::abs(d.lambda_plus * d.lambda_minus - target) <= 1e-12 * std::abs(target) + 1e-12 * d.rabi_prime * d.rabi_prime);
        REQUIRE(d.rabi_prime == doctest::Approx(std::hypot(f.detuning, f.rabi)).epsilon(1e-14));
        // each (1, c) solves the internal eigenproblem: (Omega/2) e^{i phi} c = lambda
        const cplx lhs = 0.5 * f.rabi * std::exp(I * f.phase) * d.c_plus;
        REQUIRE(std::abs(lhs - d.lambda_plus) <= 1e-12 * d.rabi_prime);
        // the two dressed spinors are orthogonal
        REQUIRE(std::abs(1.0 + std::conj(d.c_plus) * d.c_minus) <= 1e-12 * (1.0 + std::norm(d.c_plus)));
    }
}

TEST_CASE("zero coupling is degenerate") {
    CHECK_THROWS_AS(dressed_decomposition(oracle::field(0.0, 0.0)), DegenerateCoupling);
}

TEST_CASE("setup validation") {
    CHECK_NOTHROW(oracle::field().validate());
    CHECK_THROWS_AS((FieldSetup{-1.0, 0.0, 1.0, 0.0, 1e-4}.validate()), InvalidArgument);
    CHECK_THROWS_AS((FieldSetup{oracle::mass, 0.0, 1.0, 0.0, 0.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((FieldSetup{oracle::mass, 0.0, -1.0, 0.0, 1e-4}.validate()), InvalidArgument);
    CHECK_THROWS_AS((FieldSetup{oracle::mass, NAN, 1.0, 0.0, 1e-4}.validate()), InvalidArgument);
}

TEST_CASE("channel wavenumbers") {
    SUBCASE("on resonance q equals k") {
        const ChannelWavenumbers w = channel_wavenumbers(oracle::field(), oracle::k0);
        CHECK(w.q == cplx(oracle::k0, 0.0));
    }
    SUBCASE("below the barrier the upper dressed channel decays") {
        const FieldSetup f = oracle::field();
        const double k = 0.5 * oracle::k0;
        const ChannelWavenumbers w = channel_wavenumbers(f, k);
        const double expect = std::sqrt(2.0 * f.mass * 0.5 * f.rabi / hbar - k * k);
        CHECK(w.k_plus.real() == 0.0);
        CHECK(w.k_plus.imag() == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("reference scenario: upper channel open but slow") {
        const ChannelWavenumbers w = channel_wavenumbers(oracle::field(), oracle::k0);
        CHECK(w.k_plus.imag() == 0.0);
        CHECK(w.k_plus.real() > 0.0);
        CHECK(w.k_plus.real() < 0.2 * oracle::k0);
        const double ratio = hbar * oracle::rabi / (0.5 * oracle::mass * oracle::v0 * oracle::v0);
        CHECK(ratio == doctest::Approx(1.96).epsilon(0.01));
    }
    SUBCASE("dispersion identities and branch totality") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> det(-5e5, 5e5), rab(0.0, 5e5), kk(0.05, 2.0);
        for (int i = 0; i < 1000; ++i) {
            const FieldSetup f = oracle::field(det(rng), rab(rng));
            const double k = kk(rng) * oracle::k0;
            const ChannelWavenumbers w = channel_wavenumbers(f, k);
            const double scale = k * k + 2.0 * f.mass * (std::abs(f.detuning) + f.rabi) / hbar;
            REQUIRE(std::abs(w.q * w.q - (k * k + 2.0 * f.mass * f.detuning / hbar)) <= 1e-13 * scale);
            for (cplx c : {w.q, w.k_plus, w.k_minus}) {
                REQUIRE(c.real() >= 0.0);
                REQUIRE(c.imag() >= 0.0);
                REQUIRE((c.real() == 0.0 || c.imag() == 0.0));
            }
            if (f.rabi > 0.0) {
                const DressedData d = dressed_decomposition(f);
                REQUIRE(std::abs(w.k_plus * w.k_plus - (k * k - 2.0 * f.mass * d.lambda_plus / hbar)) <= 1e-12 * scale);
                REQUIRE(std::abs(w.k_minus * w.k_minus - (k * k - 2.0 * f.mass * d.lambda_minus / hbar)) <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("uncoupled matching is free propagation") {
    for (double delta : {0.0, 3e4, -3e4}) {
        const ScatteringSolution s = solve_matching(oracle::field(delta, 0.0), oracle::k0);
        CHECK(std::abs(s.t1 - cplx(1.0, 0.0)) < 1e-14);
        CHECK(std::abs(s.r1) < 1e-14);
        CHECK(std::abs(s.r2) < 1e-14);
        CHECK(std::abs(s.t2) < 1e-14);
        CHECK(stationary_transmission(s) == 1.0);
    }
}

TEST_CASE("resonant matching agrees with the square-step formula") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> kk(0.6, 1.4), rr(0.1, 3.0), ll(0.2, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double k = kk(rng) * oracle::k0;
        const double rabi = rr(rng) * oracle::rabi;
        const double len = ll(rng) * oracle::length;
        const FieldSetup f = oracle::field(0.0, rabi, 0.0, len);
        const ScatteringSolution s = solve_matching(f, k);
        const oracle::ResonantAmplitudes ref = oracle::resonant_amplitudes(f.mass, rabi, len, k);
        CAPTURE(k);
        CAPTURE(rabi);
        CAPTURE(len);
        REQUIRE(std::abs(s.t1 - ref.t1) < 1e-10);
        REQUIRE(std::abs(s.t2 * std::exp(-I * k * len) - ref.t2) < 1e-10);
        const double t_ref = std::norm(ref.t1) + std::norm(ref.t2);
        REQUIRE(stationary_transmission(s) == doctest::Approx(t_ref).epsilon(1e-9));
    }
}

TEST_CASE("flux conservation over the reference packet grid") {
    const SpectralPacket p = build_packet(oracle::field(), oracle::packet_spec());
    double worst = 0.0, worst_match = 0.0;
    for (const auto& node : p.nodes()) {
        worst = std::max(worst, std::abs(node.sol.unitarity_residual()));
        worst_match = std::max(worst_match, matching_residual(node.sol, p.setup()));
    }
    CHECK(worst < 1e-10);
    CHECK(worst_match < 1e-10);
}

TEST_CASE("closed excited channel") {
    // q^2 = k^2 + 2 m Delta / hbar < 0
    const double delta = -2.5e5;
    const FieldSetup f = oracle::field(delta, 1e5);
    const ScatteringSolution s = solve_matching(f, oracle::k0);
    REQUIRE_FALSE(s.channel2_open());
    CHECK(s.q.imag() > 0.0);
    CHECK(std::abs(std::norm(s.r1) + std::norm(s.t1) - 1.0) < 1e-10);
    CHECK(stationary_transmission(s) == doctest::Approx(std::norm(s.t1)).epsilon(1e-15));
    // excited-channel amplitudes only multiply decaying exponentials
    const SpinorValue far_left = stationary_state(s, f, -50e-6);
    const SpinorValue far_right = stationary_state(s, f, f.length + 50e-6);
    CHECK(std::abs(far_left.psi2) < 1e-6 * std::abs(s.r2) + 1e-300);
    CHECK(std::abs(far_right.psi2) < 1e-6 * std::abs(s.t2) + 1e-300);
    CHECK(matching_residual(s, f) < 1e-10);
}

TEST_CASE("stationary state pieces") {
    SUBCASE("free wave left of the field") {
        const FieldSetup f = oracle::field(0.0, 0.0);
        const ScatteringSolution s = solve_matching(f, oracle::k0);
        const double x = -37e-6;
        const SpinorValue v = stationary_state(s, f, x);
        const cplx expect = std::exp(I * oracle::k0 * x) / std::sqrt(2.0 * pi);
        CHECK(std::abs(v.psi1 - expect) < 1e-14);
        CHECK(std::abs(v.psi2) == 0.0);
    }
    SUBCASE("one-sided limits agree at both edges") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> kk(0.8, 1.2), det(-3e5, 3e5), ph(-pi, pi);
        for (int i = 0; i < 50; ++i) {
            const FieldSetup f = oracle::field(det(rng), oracle::rabi, ph(rng));
            const ScatteringSolution s = solve_matching(f, kk(rng) * oracle::k0);
            for (auto [x, a, b] : {std::tuple{0.0, Region::left, Region::interior},
                                   std::tuple{f.length, Region::interior, Region::right}}) {
                const SpinorValue u = stationary_state(s, f, x, a);
                const SpinorValue w = stationary_state(s, f, x, b);
                const double scale = std::abs(u.psi1) + std::abs(u.psi2) + 1.0 / std::sqrt(2.0 * pi);
                const double dscale = scale * s.k;
                REQUIRE(std::abs(u.psi1 - w.psi1) < 1e-10 * scale);
                REQUIRE(std::abs(u.psi2 - w.psi2) < 1e-10 * scale);
                REQUIRE(std::abs(u.dpsi1 - w.dpsi1) < 1e-10 * dscale);
                REQUIRE(std::abs(u.dpsi2 - w.dpsi2) < 1e-10 * dscale);
            }
        }
    }
    SUBCASE("interior value on resonance is the superposition of two square steps") {
        const FieldSetup f = oracle::field();
        for (double kr : {0.9, 1.0, 1.1}) {
            const double k = kr * oracle::k0;
            const ScatteringSolution s = solve_matching(f, k);
            const double x = 0.5 * f.length;
            const cplx up = oracle::square_barrier_interior(f.mass, 0.5 * hbar * f.rabi, f.length, k, x);
            const cplx down = oracle::square_barrier_interior(f.mass, -0.5 * hbar * f.rabi, f.length, k, x);
            const SpinorValue v = stationary_state(s, f, x);
            const double norm = std::sqrt(2.0 * pi);
            CHECK(std::abs(v.psi1 - 0.5 * (up + down) / norm) < 1e-10);
            CHECK(std::abs(v.psi2 - 0.5 * (up - down) / norm) < 1e-10);
        }
    }
}

TEST_CASE("resonant transmission is the mean of the dressed transmissions") {
    const FieldSetup f = oracle::field();
    for (double kr : {0.95, 1.0, 1.05}) {
        const double k = kr * oracle::k0;
        const double tp = std::norm(oracle::square_barrier_t(f.mass, 0.5 * hbar * f.rabi, f.length, k));
        const double tm = std::norm(oracle::square_barrier_t(f.mass, -0.5 * hbar * f.rabi, f.length, k));
        CHECK(stationary_transmission(solve_matching(f, k)) == doctest::Approx(0.5 * (tp + tm)).epsilon(1e-10));
    }
}

}  // TEST_SUITE
