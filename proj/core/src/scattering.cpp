#include "atomflux/scattering.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

#include "atomflux/constants.hpp"
#include "atomflux/errors.hpp"

namespace atomflux {

namespace {

constexpr double inv_sqrt_2pi = 0.39894228040143267794;
constexpr cplx I{0.0, 1.0};

// Smallest reciprocal condition number accepted from the LU factorization.
constexpr double min_rcond = 1e-13;

}  // namespace

void FieldSetup::validate() const {
    if (!std::isfinite(mass) || mass <= 0.0) throw InvalidArgument("mass must be positive");
    if (!std::isfinite(length) || length <= 0.0) throw InvalidArgument("field length must be positive");
    if (!std::isfinite(rabi) || rabi < 0.0) throw InvalidArgument("Rabi frequency must be >= 0");
    if (!std::isfinite(detuning)) throw InvalidArgument("detuning must be finite");
    if (!std::isfinite(phase)) throw InvalidArgument("phase must be finite");
}

DressedData dressed_decomposition(const FieldSetup& setup) {
    if (!setup.coupled()) throw DegenerateCoupling("dressed basis undefined for zero Rabi frequency");
    DressedData d;
    d.rabi_prime = std::hypot(setup.detuning, setup.rabi);
    // The root that would cancel is formed from the product identity lambda+ lambda- = -rabi^2/4.
    const double quarter = 0.25 * setup.rabi * setup.rabi;
    if (setup.detuning <= 0.0) {
        d.lambda_plus = 0.5 * (-setup.detuning + d.rabi_prime);
        d.lambda_minus = -quarter / d.lambda_plus;
    } else {
        d.lambda_minus = 0.5 * (-setup.detuning - d.rabi_prime);
        d.lambda_plus = -quarter / d.lambda_minus;
    }
    const cplx phase_factor = std::polar(1.0, -setup.phase);
    d.c_plus = (2.0 * d.lambda_plus / setup.rabi) * phase_factor;
    d.c_minus = (2.0 * d.lambda_minus / setup.rabi) * phase_factor;
    return d;
}

cplx branch_sqrt(double radicand) {
    if (radicand >= 0.0) return {std::sqrt(radicand), 0.0};
    return {0.0, std::sqrt(-radicand)};
}

ChannelWavenumbers channel_wavenumbers(const FieldSetup& setup, double k) {
    if (!(k > 0.0)) throw InvalidArgument("incident wavenumber must be positive");
    const double scale = 2.0 * setup.mass / hbar;
    ChannelWavenumbers w;
    w.q = branch_sqrt(k * k + scale * setup.detuning);
    if (setup.coupled()) {
        const DressedData d = dressed_decomposition(setup);
        w.k_plus = branch_sqrt(k * k - scale * d.lambda_plus);
        w.k_minus = branch_sqrt(k * k - scale * d.lambda_minus);
    } else {
        w.k_plus = w.k_minus = cplx{k, 0.0};
    }
    return w;
}

double ScatteringSolution::unitarity_residual() const {
    const double ratio = channel2_flux_ratio();
    return std::norm(r1) + std::norm(t1) + ratio * (std::norm(r2) + std::norm(t2)) - 1.0;
}

ScatteringSolution solve_matching(const FieldSetup& setup, double k) {
    setup.validate();
    const ChannelWavenumbers w = channel_wavenumbers(setup, k);

    ScatteringSolution sol;
    sol.k = k;
    sol.energy = hbar * hbar * k * k / (2.0 * setup.mass);
    sol.q = w.q;
    sol.k_plus = w.k_plus;
    sol.k_minus = w.k_minus;
    sol.coupled = setup.coupled();

    if (!sol.coupled) {
        sol.t1 = 1.0;
        return sol;
    }

    const DressedData d = dressed_decomposition(setup);
    const double l = setup.length;
    const cplx kp = w.k_plus, km = w.k_minus, q = w.q;
    const cplx ep = std::exp(I * kp * l), em = std::exp(I * km * l);
    const cplx cp = d.c_plus, cm = d.c_minus;
    const cplx eikl = std::polar(1.0, k * l);
    // Derivative rows are divided by k so every row is O(1).
    const cplx ikp = I * kp / k, ikm = I * km / k, iq = I * q / k;

    // Unknown order: r1 r2 t1 t2 a+ b+ a- b-
    Eigen::Matrix<cplx, 8, 8> m = Eigen::Matrix<cplx, 8, 8>::Zero();
    Eigen::Matrix<cplx, 8, 1> rhs = Eigen::Matrix<cplx, 8, 1>::Zero();

    // x = 0, ground component: 1 + r1 = a+ + b+ e+ + a- + b- e-
    m.row(0) << -1.0, 0.0, 0.0, 0.0, 1.0, ep, 1.0, em;
    rhs(0) = 1.0;
    // x = 0, excited component: r2 = c+(a+ + b+ e+) + c-(a- + b- e-)
    m.row(1) << 0.0, -1.0, 0.0, 0.0, cp, cp * ep, cm, cm * em;
    // x = 0, ground derivative: i(1 - r1) = ik+(a+ - b+ e+) + ik-(a- - b- e-)
    m.row(2) << I, 0.0, 0.0, 0.0, ikp, -ikp * ep, ikm, -ikm * em;
    rhs(2) = I;
    // x = 0, excited derivative: -iq r2 = c+ ik+(...) + c- ik-(...)
    m.row(3) << 0.0, iq, 0.0, 0.0, cp * ikp, -cp * ikp * ep, cm * ikm, -cm * ikm * em;
    // x = l, ground component: a+ e+ + b+ + a- e- + b- = t1 e^{ikl}
    m.row(4) << 0.0, 0.0, -eikl, 0.0, ep, 1.0, em, 1.0;
    // x = l, excited component: c+(a+ e+ + b+) + c-(a- e- + b-) = t2
    m.row(5) << 0.0, 0.0, 0.0, -1.0, cp * ep, cp, cm * em, cm;
    // x = l, ground derivative
    m.row(6) << 0.0, 0.0, -I * eikl, 0.0, ikp * ep, -ikp, ikm * em, -ikm;
    // x = l, excited derivative
    m.row(7) << 0.0, 0.0, 0.0, -iq, cp * ikp * ep, -cp * ikp, cm * ikm * em, -cm * ikm;

    const Eigen::PartialPivLU<Eigen::Matrix<cplx, 8, 8>> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > min_rcond)) throw NumericalDegeneracy(k, rcond);
    const Eigen::Matrix<cplx, 8, 1> x = lu.solve(rhs);
    if (!x.allFinite()) throw NumericalDegeneracy(k, rcond);

    sol.r1 = x(0);
    sol.r2 = x(1);
    sol.t1 = x(2);
    sol.t2 = x(3);
    sol.a_plus = x(4);
    sol.b_plus = x(5);
    sol.a_minus = x(6);
    sol.b_minus = x(7);
    return sol;
}

Region region_of(const FieldSetup& setup, double x) {
    if (x <= 0.0) return Region::left;
    if (x >= setup.length) return Region::right;
    return Region::interior;
}

SpinorValue stationary_state(const ScatteringSolution& sol, const FieldSetup& setup, double x) {
    return stationary_state(sol, setup, x, region_of(setup, x));
}

SpinorValue stationary_state(const ScatteringSolution& sol, const FieldSetup& setup, double x,
                             Region piece) {
    const double k = sol.k;
    SpinorValue v;
    if (!sol.coupled) {
        const cplx e = std::polar(inv_sqrt_2pi, k * x);
        v.psi1 = e;
        v.dpsi1 = I * k * e;
        return v;
    }
    switch (piece) {
        case Region::left: {
            const cplx in = std::polar(1.0, k * x);
            const cplx out = std::conj(in);
            const cplx e2 = std::exp(-I * sol.q * x);
            v.psi1 = in + sol.r1 * out;
            v.dpsi1 = I * k * (in - sol.r1 * out);
            v.psi2 = sol.r2 * e2;
            v.dpsi2 = -I * sol.q * v.psi2;
            break;
        }
        case Region::right: {
            const double l = setup.length;
            const cplx e1 = std::polar(1.0, k * x);
            const cplx e2 = std::exp(I * sol.q * (x - l));
            v.psi1 = sol.t1 * e1;
            v.dpsi1 = I * k * v.psi1;
            v.psi2 = sol.t2 * e2;
            v.dpsi2 = I * sol.q * v.psi2;
            break;
        }
        case Region::interior: {
            const double l = setup.length;
            const DressedData d = dressed_decomposition(setup);
            const auto channel = [&](cplx ks, cplx a, cplx b, cplx& f, cplx& df) {
                const cplx fwd = a * std::exp(I * ks * x);
                const cplx bwd = b * std::exp(-I * ks * (x - l));
                f = fwd + bwd;
                df = I * ks * (fwd - bwd);
            };
            cplx fp, dfp, fm, dfm;
            channel(sol.k_plus, sol.a_plus, sol.b_plus, fp, dfp);
            channel(sol.k_minus, sol.a_minus, sol.b_minus, fm, dfm);
            v.psi1 = fp + fm;
            v.dpsi1 = dfp + dfm;
            v.psi2 = d.c_plus * fp + d.c_minus * fm;
            v.dpsi2 = d.c_plus * dfp + d.c_minus * dfm;
            break;
        }
    }
    v.psi1 *= inv_sqrt_2pi;
    v.psi2 *= inv_sqrt_2pi;
    v.dpsi1 *= inv_sqrt_2pi;
    v.dpsi2 *= inv_sqrt_2pi;
    return v;
}

double stationary_transmission(const ScatteringSolution& sol) {
    return std::norm(sol.t1) + sol.channel2_flux_ratio() * std::norm(sol.t2);
}

double stationary_reflection(const ScatteringSolution& sol) {
    return std::norm(sol.r1) + sol.channel2_flux_ratio() * std::norm(sol.r2);
}

double matching_residual(const ScatteringSolution& sol, const FieldSetup& setup) {
    double worst = 0.0;
    const auto compare = [&](const SpinorValue& a, const SpinorValue& b) {
        const std::array<std::pair<cplx, cplx>, 4> pairs{{{a.psi1, b.psi1},
                                                          {a.psi2, b.psi2},
                                                          {a.dpsi1 / sol.k, b.dpsi1 / sol.k},
                                                          {a.dpsi2 / sol.k, b.dpsi2 / sol.k}}};
        for (const auto& [u, v] : pairs) {
            const double scale = std::max({std::abs(u), std::abs(v), inv_sqrt_2pi});
            worst = std::max(worst, std::abs(u - v) / scale);
        }
    };
    compare(stationary_state(sol, setup, 0.0, Region::left),
            stationary_state(sol, setup, 0.0, Region::interior));
    compare(stationary_state(sol, setup, setup.length, Region::interior),
            stationary_state(sol, setup, setup.length, Region::right));
    return worst;
}

}  // namespace atomflux
