#include "atomflux/tdse_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fftw3.h>

#include "atomflux/constants.hpp"
#include "atomflux/errors.hpp"
#include "atomflux/parallel.hpp"

namespace atomflux {

namespace {

fftw_complex* as_fftw(std::vector<cplx>& v) { return reinterpret_cast<fftw_complex*>(v.data()); }

// Fraction of the cell [x - dx/2, x + dx/2] inside [0, l].
double field_fraction(double x, double dx, double l) {
    const double lo = std::max(x - 0.5 * dx, 0.0);
    const double hi = std::min(x + 0.5 * dx, l);
    return std::clamp((hi - lo) / dx, 0.0, 1.0);
}

}  // namespace

double GridState::norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += density(i);
    return s * dx;
}

double GridState::probability_beyond(double x_from) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x(i);
        if (std::abs(xi - x_from) < 1e-9 * dx) {
            s += 0.5 * density(i);
        } else if (xi > x_from) {
            s += density(i);
        }
    }
    return s * dx;
}

double GridState::edge_density(std::size_t cells) const {
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(cells, n); ++i) {
        m = std::max({m, density(i), density(n - 1 - i)});
    }
    return m;
}

GridLayout aligned_layout(const FieldSetup& setup, double x_lo, double x_hi,
                          std::size_t cells_per_length) {
    if (cells_per_length == 0) throw InvalidArgument("cells_per_length must be positive");
    if (!(x_hi > x_lo)) throw InvalidArgument("empty grid domain");
    GridLayout g;
    g.dx = setup.length / static_cast<double>(cells_per_length);
    g.x_min = std::floor(x_lo / g.dx) * g.dx;
    const double span = x_hi - g.x_min;
    g.n = 1;
    while (static_cast<double>(g.n - 1) * g.dx < span) g.n *= 2;
    return g;
}

GridState init_grid(const FieldSetup& setup, const PacketSpec& spec, const GridLayout& layout) {
    setup.validate();
    spec.validate();
    if (layout.n < 16 || !(layout.dx > 0.0)) throw InvalidArgument("grid too small");
    GridState g;
    g.x_min = layout.x_min;
    g.dx = layout.dx;
    g.n = layout.n;
    const double need_lo = spec.x0 - 8.0 * spec.sigma0;
    const double need_hi = setup.length + 8.0 * spec.sigma0;
    if (g.x_min > need_lo || g.x_max() < need_hi) {
        throw InvalidArgument("grid [" + detail::num(g.x_min) + ", " + detail::num(g.x_max()) +
                              "] m does not cover [" + detail::num(need_lo) + ", " +
                              detail::num(need_hi) + "] m");
    }
    g.psi1.assign(g.n, cplx{});
    g.psi2.assign(g.n, cplx{});
    const double s = spec.sigma0;
    const double amp = std::pow(2.0 * pi * s * s, -0.25);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double d = g.x(i) - spec.x0;
        g.psi1[i] = std::polar(amp * std::exp(-d * d / (4.0 * s * s)), spec.k0 * d);
    }
    return g;
}

double max_time_step(const FieldSetup& setup, const PacketSpec& spec) {
    const double k_top = spec.k0 + 6.0 * spec.spectral_width();
    const double e_top = hbar * hbar * k_top * k_top / (2.0 * setup.mass);
    const double scale = std::max({e_top, hbar * setup.rabi, hbar * std::abs(setup.detuning)});
    return 0.1 * hbar / scale;
}

double default_time_step(const FieldSetup& setup, const PacketSpec& spec) {
    return 0.5 * max_time_step(setup, spec);
}

struct SplitStepPropagator::Plans {
    fftw_plan forward1 = nullptr, backward1 = nullptr, forward2 = nullptr, backward2 = nullptr;
    ~Plans() {
        for (fftw_plan p : {forward1, backward1, forward2, backward2}) {
            if (p) fftw_destroy_plan(p);
        }
    }
};

SplitStepPropagator::SplitStepPropagator(const FieldSetup& setup, const PacketSpec& spec,
                                         GridState& state, double dt)
    : setup_(setup), state_(state), dt_(dt), plans_(std::make_unique<Plans>()) {
    setup_.validate();
    if (!(dt > 0.0) || !(dt < max_time_step(setup, spec))) {
        throw InvalidArgument("time step " + detail::num(dt) + " s violates the limit " +
                              detail::num(max_time_step(setup, spec)) + " s");
    }
    const std::size_t n = state.n;
    const double dk = 2.0 * pi / (static_cast<double>(n) * state.dx);
    kin_half_.resize(n);
    kin_full_.resize(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double idx = j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
        const double k = idx * dk;
        const double w = hbar * k * k / (2.0 * setup.mass);
        kin_half_[j] = std::polar(inv_n, -0.5 * w * dt);
        kin_full_[j] = std::polar(inv_n, -w * dt);
    }

    // -hbar Delta |2><2| everywhere, coupling only on nodes whose cell meets the field
    const double delta = setup.detuning;
    detuning_phase_ = std::polar(1.0, delta * dt);
    if (setup.coupled()) {
        std::size_t last = 0;
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (field_fraction(state.x(i), state.dx, setup.length) > 0.0) {
                if (!any) first_ = i;
                last = i;
                any = true;
            }
        }
        if (any) {
            coupling_.resize(last - first_ + 1);
            const cplx shift = std::polar(1.0, 0.5 * delta * dt);
            for (std::size_t i = first_; i <= last; ++i) {
                const double rabi = setup.rabi * field_fraction(state.x(i), state.dx, setup.length);
                const double rp = std::hypot(delta, rabi);
                const double th = 0.5 * rp * dt;
                const double c = std::cos(th);
                const double sn = rp > 0.0 ? std::sin(th) / (0.5 * rp) : 0.0;
                const cplx off = 0.5 * rabi * std::polar(1.0, setup.phase);  // <1|H|2> / hbar
                const cplx I{0.0, 1.0};
                // e^{i Delta dt/2} [cos(th) - i sin(th) N / (rp/2)], N = [[D/2, off], [off*, -D/2]]
                coupling_[i - first_] = {shift * (c - I * sn * 0.5 * delta), shift * (-I * sn * off),
                                         shift * (-I * sn * std::conj(off)),
                                         shift * (c + I * sn * 0.5 * delta)};
            }
        }
    }

    // FFTW_MEASURE overwrites its arrays while planning
    const std::vector<cplx> keep1 = state.psi1, keep2 = state.psi2;
    const int size = static_cast<int>(n);
    plans_->forward1 = fftw_plan_dft_1d(size, as_fftw(state.psi1), as_fftw(state.psi1), FFTW_FORWARD, FFTW_MEASURE);
    plans_->backward1 = fftw_plan_dft_1d(size, as_fftw(state.psi1), as_fftw(state.psi1), FFTW_BACKWARD, FFTW_MEASURE);
    plans_->forward2 = fftw_plan_dft_1d(size, as_fftw(state.psi2), as_fftw(state.psi2), FFTW_FORWARD, FFTW_MEASURE);
    plans_->backward2 = fftw_plan_dft_1d(size, as_fftw(state.psi2), as_fftw(state.psi2), FFTW_BACKWARD, FFTW_MEASURE);
    state.psi1 = keep1;
    state.psi2 = keep2;
}

SplitStepPropagator::~SplitStepPropagator() = default;

void SplitStepPropagator::kinetic(bool half) {
    const std::vector<cplx>& f = half ? kin_half_ : kin_full_;
    const std::size_t n = state_.n;
    fftw_execute(plans_->forward1);
    for (std::size_t j = 0; j < n; ++j) state_.psi1[j] *= f[j];
    fftw_execute(plans_->backward1);
    if (!setup_.coupled()) {
        // channel 2 stays empty; skip its transforms
        return;
    }
    fftw_execute(plans_->forward2);
    for (std::size_t j = 0; j < n; ++j) state_.psi2[j] *= f[j];
    fftw_execute(plans_->backward2);
}

void SplitStepPropagator::coupling() {
    if (setup_.detuning != 0.0) {
        for (std::size_t i = 0; i < first_; ++i) state_.psi2[i] *= detuning_phase_;
        for (std::size_t i = first_ + coupling_.size(); i < state_.n; ++i) state_.psi2[i] *= detuning_phase_;
    }
    for (std::size_t m = 0; m < coupling_.size(); ++m) {
        const std::size_t i = first_ + m;
        const auto& u = coupling_[m];
        const cplx a = state_.psi1[i];
        const cplx b = state_.psi2[i];
        state_.psi1[i] = u[0] * a + u[1] * b;
        state_.psi2[i] = u[2] * a + u[3] * b;
    }
}

void SplitStepPropagator::advance(std::size_t steps) {
    if (steps == 0) return;
    kinetic(true);
    for (std::size_t s = 0; s < steps; ++s) {
        coupling();
        kinetic(s + 1 < steps ? false : true);
    }
    state_.t += static_cast<double>(steps) * dt_;
}

void SplitStepPropagator::advance_to(double t) {
    const double remaining = t - state_.t;
    if (remaining <= 0.0) return;
    advance(static_cast<std::size_t>(std::ceil(remaining / dt_ - 1e-9)));
}

void step(GridState& state, const FieldSetup& setup, const PacketSpec& spec, double dt) {
    SplitStepPropagator prop(setup, spec, state, dt);
    prop.step();
}

OracleReport compare_with_spectral(const GridState& state, const SpectralPacket& packet,
                                   double tolerance) {
    OracleReport r;
    r.t = state.t;
    std::vector<double> rho(state.n);
    parallel_for(state.n, [&](std::size_t i) { rho[i] = density(packet, state.x(i), state.t); });
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < state.n; ++i) {
        const double d = state.density(i) - rho[i];
        num += d * d;
        den += rho[i] * rho[i];
    }
    r.l2_relative = std::sqrt(num / den);
    r.grid_beyond = state.probability_beyond(packet.setup().length);
    r.spectral_t2 = transmission_probability(packet);
    r.grid_norm = state.norm();
    r.edge_density = state.edge_density();
    r.passed = r.l2_relative < tolerance;
    return r;
}

}  // namespace atomflux
