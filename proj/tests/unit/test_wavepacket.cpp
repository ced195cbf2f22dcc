#include <doctest.h>

#include <random>

#include "atomflux/errors.hpp"
#include "atomflux/wavepacket.hpp"
#include "oracles.hpp"

using namespace atomflux;

namespace {

const SpectralPacket& reference_packet() {
    static const SpectralPacket p = build_packet(oracle::field(), oracle::packet_spec());
    return p;
}

const SpectralPacket& free_packet() {
    static const SpectralPacket p = build_packet(oracle::field(0.0, 0.0), oracle::packet_spec());
    return p;
}

}  // namespace

TEST_SUITE("wavepacket") {

TEST_CASE("packet specification") {
    const PacketSpec s = oracle::packet_spec();
    CHECK(s.k0 == doctest::Approx(oracle::mass * oracle::v0 / hbar).epsilon(1e-15));
    CHECK_NOTHROW(s.validate());
    CHECK_THROWS_AS(oracle::packet_spec(20e-6, 1e-6).validate(), InvalidArgument);
    CHECK_THROWS_AS(oracle::packet_spec(-1e-6).validate(), InvalidArgument);
    // fewer than 20 spectral widths between k0 and zero
    CHECK_THROWS_AS(oracle::packet_spec(0.4e-6).validate(), InvalidArgument);
}

TEST_CASE("spectral grid") {
    const SpectralPacket& p = reference_packet();
    const auto nodes = p.nodes();
    REQUIRE(nodes.size() == 1024);
    CHECK(nodes.front().k > 0.0);
    for (std::size_t i = 1; i < nodes.size(); ++i) REQUIRE(nodes[i].k > nodes[i - 1].k);
    const double half = 6.0 * p.spec().spectral_width();
    CHECK(nodes.front().k == doctest::Approx(p.spec().k0 - half).epsilon(1e-14));
    CHECK(nodes.back().k == doctest::Approx(p.spec().k0 + half).epsilon(1e-14));
    CHECK(std::abs(p.spectral_norm() - 1.0) < 1e-6);
    // a grid reaching k <= 0 is rejected
    PacketOptions wide;
    wide.span = 2.0 * p.spec().k0 / p.spec().spectral_width();
    CHECK_THROWS_AS(build_packet(oracle::field(), oracle::packet_spec(), wide), InvalidArgument);
}

TEST_CASE("free packet matches the analytic Gaussian") {
    const SpectralPacket& p = free_packet();
    const oracle::FreeGaussian g = oracle::free_gaussian(p.spec());
    SUBCASE("initial density at x0 and x0 +- sigma0") {
        for (double x : {oracle::x0 - oracle::sigma0, oracle::x0, oracle::x0 + oracle::sigma0}) {
            CHECK(density(p, x, 0.0) == doctest::Approx(g.density(x, 0.0)).epsilon(1e-4));
        }
        CHECK(std::abs(p.psi(oracle::x0, 0.0).psi1) ==
              doctest::Approx(std::pow(2.0 * pi * oracle::sigma0 * oracle::sigma0, -0.25)).epsilon(1e-4));
    }
    SUBCASE("wave function and slope at later times") {
        // the spectral grid stops at 6 spectral widths, which caps pointwise accuracy near 2e-5
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> tt(0.0, 0.1), uu(-2.5, 2.5);
        for (int i = 0; i < 40; ++i) {
            const double t = tt(rng);
            const double x = oracle::x0 + oracle::v0 * t + uu(rng) * g.width(t);
            const PacketValue v = p.psi(x, t);
            const double scale = std::abs(g.psi(oracle::x0, 0.0));
            REQUIRE(std::abs(v.psi1 - g.psi(x, t)) < 1e-4 * scale);
            REQUIRE(std::abs(v.dpsi1 - g.dpsi(x, t)) < 1e-4 * scale * p.spec().k0);
            REQUIRE(std::abs(v.psi2) == 0.0);
        }
    }
    SUBCASE("peak follows the classical path") {
        const double t = -oracle::x0 / oracle::v0;
        double best_x = 0.0, best = -1.0;
        const double h = 0.05e-6;
        for (int i = -400; i <= 400; ++i) {
            const double x = i * h;
            const double r = density(p, x, t);
            if (r > best) {
                best = r;
                best_x = x;
            }
        }
        CHECK(std::abs(best_x - (oracle::x0 + oracle::v0 * t)) <= h);
    }
}

TEST_CASE("plane-wave current") {
    const double k = 1.7e7;
    const double x = 3e-6;
    const cplx e = std::exp(cplx(0.0, k * x));
    const PacketValue v{e, 0.0, cplx(0.0, k) * e, 0.0};
    CHECK(current(v, oracle::mass) / density(v) == doctest::Approx(hbar * k / oracle::mass).epsilon(1e-14));
}

TEST_CASE("wave function is continuous at the field edges") {
    const SpectralPacket& p = reference_packet();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> tt(0.0, 0.12);
    for (int i = 0; i < 20; ++i) {
        const double t = tt(rng);
        for (auto [x, outside] : {std::pair{0.0, Region::left}, std::pair{oracle::length, Region::right}}) {
            const PacketValue u = p.psi(x, t, outside);
            const PacketValue w = p.psi(x, t, Region::interior);
            const double scale = std::sqrt(density(u)) + 1e-3 * std::abs(p.psi(oracle::x0, 0.0).psi1);
            REQUIRE(std::abs(u.psi1 - w.psi1) < 1e-10 * scale);
            REQUIRE(std::abs(u.psi2 - w.psi2) < 1e-10 * scale);
            REQUIRE(std::abs(u.dpsi1 - w.dpsi1) < 1e-10 * scale * p.spec().k0);
            REQUIRE(std::abs(u.dpsi2 - w.dpsi2) < 1e-10 * scale * p.spec().k0);
        }
    }
}

TEST_CASE("continuity equation") {
    const SpectralPacket& p = reference_packet();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> tt(0.0, 0.12), xx(-1.0, 1.0);
    const double ht = 1e-4 * 0.12;
    const double hx = 2e-9;
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double t = tt(rng) + 2.0 * ht;
        // bias the samples to where the packet is at time t
        const double centre = std::min(oracle::x0 + oracle::v0 * t, 0.5 * oracle::length);
        const double x = centre + 2.0 * oracle::sigma0 * xx(rng);
        const double drho_dt = oracle::derivative([&](double s) { return density(p, x, s); }, t, ht);
        const double dj_dx = oracle::derivative([&](double y) { return current(p, y, t); }, x, hx);
        worst = std::max(worst, std::abs(drho_dt + dj_dx));
        scale = std::max(scale, std::abs(dj_dx));
    }
    CHECK(worst < 1e-6 * scale);
}

TEST_CASE("presence probability") {
    const SpectralPacket& p = reference_packet();
    SUBCASE("packet starts left of the field") {
        CHECK(presence_probability(p, 0.0, 0.0, PresenceMethod::spatial) < 1e-6);
    }
    SUBCASE("spatial and flux forms agree") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> tt(0.0, 0.12), xx(-50e-6, 150e-6);
        for (int i = 0; i < 20; ++i) {
            const double t = tt(rng);
            const double x = i < 5 ? 0.0 : i < 10 ? oracle::length : xx(rng);
            const double qs = presence_probability(p, x, t, PresenceMethod::spatial);
            const double qf = presence_probability(p, x, t, PresenceMethod::flux);
            CAPTURE(x);
            CAPTURE(t);
            REQUIRE(std::abs(qs - qf) < 2e-4);
        }
    }
    SUBCASE("late-time presence beyond the field approaches |T|^2") {
        const double q = presence_probability(p, oracle::length, 0.6, PresenceMethod::spatial);
        CHECK(std::abs(q - transmission_probability(p)) < 5e-3);
    }
}

TEST_CASE("total norm is conserved") {
    const SpectralPacket& p = reference_packet();
    for (double t : {0.0, 0.06, 0.12}) CHECK(std::abs(total_norm(p, t) - 1.0) < 1e-4);
}

TEST_CASE("transmission probability") {
    CHECK(transmission_probability(free_packet()) == doctest::Approx(1.0).epsilon(1e-6));
    const double t2 = transmission_probability(reference_packet());
    CHECK(t2 == doctest::Approx(0.61).epsilon(0.02 / 0.61));
    CHECK(std::abs(t2 + reflection_probability(reference_packet()) - reference_packet().spectral_norm()) < 1e-12);
    CHECK(std::abs(reflection_probability(free_packet())) < 1e-15);
    SUBCASE("spectral convergence") {
        PacketOptions fine;
        fine.n_nodes = 2048;
        fine.span = 12.0;
        const double t2_fine = transmission_probability(build_packet(oracle::field(), oracle::packet_spec(), fine));
        CHECK(std::abs(t2_fine - t2) < 1e-4);
    }
    SUBCASE("independent Gaussian-weighted quadrature of the stationary transmission") {
        // Simpson on a finer, independent grid
        const PacketSpec s = oracle::packet_spec();
        const FieldSetup f = oracle::field();
        const int n = 4000;
        const double a = s.k0 - 7.0 / (2.0 * s.sigma0), b = s.k0 + 7.0 / (2.0 * s.sigma0);
        const double h = (b - a) / n;
        double sum = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double k = a + i * h;
            const double w = std::sqrt(2.0 * s.sigma0 * s.sigma0 / pi) *
                             std::exp(-2.0 * s.sigma0 * s.sigma0 * (k - s.k0) * (k - s.k0));
            const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            sum += c * w * stationary_transmission(solve_matching(f, k));
        }
        CHECK(std::abs(sum * h / 3.0 - t2) < 1e-5);
    }
}

}  // TEST_SUITE
