#pragma once

#include <complex>

namespace atomflux {

using cplx = std::complex<double>;

/// Physical scenario: a two-level atom of given mass crossing a field slab
/// occupying 0 <= x <= length, with constant Rabi frequency inside and none outside.
struct FieldSetup {
    double mass = 0.0;      ///< kg
    double detuning = 0.0;  ///< rad/s, field minus transition frequency
    double rabi = 0.0;      ///< rad/s
    double phase = 0.0;     ///< rad
    double length = 0.0;    ///< m

    /// Throws InvalidArgument when mass <= 0, length <= 0, rabi < 0 or any field is non-finite.
    void validate() const;
    bool coupled() const { return rabi > 0.0; }
};

/// Eigen-decomposition of the internal coupling block inside the field.
/// Dressed spinors are (1, c_plus) and (1, c_minus), unnormalized.
struct DressedData {
    double lambda_plus = 0.0;   ///< rad/s
    double lambda_minus = 0.0;  ///< rad/s
    double rabi_prime = 0.0;    ///< sqrt(detuning^2 + rabi^2)
    cplx c_plus;
    cplx c_minus;
};

/// Throws DegenerateCoupling when rabi == 0; use the free solution instead.
DressedData dressed_decomposition(const FieldSetup& setup);

struct ChannelWavenumbers {
    cplx q;        ///< excited-channel wavenumber outside the field
    cplx k_plus;   ///< dressed-channel wavenumbers inside the field
    cplx k_minus;
};

/// Square root of a real radicand on the decaying branch: non-negative real
/// root for radicand >= 0, otherwise i*sqrt(-radicand).
cplx branch_sqrt(double radicand);

/// Wavenumbers at incident wavenumber k > 0 (uncoupled setups return k_plus = k_minus = k).
ChannelWavenumbers channel_wavenumbers(const FieldSetup& setup, double k);

/// Stationary scattering state for a wave incident in the ground channel from the left.
///
/// The spinor basis functions (all divided by sqrt(2 pi)) are
///   x <= 0       : ( e^{ikx} + r1 e^{-ikx},  r2 e^{-iqx} )
///   0 < x < l    : sum over s = +,- of ( a_s e^{ik_s x} + b_s e^{-ik_s (x - l)} ) (1, c_s)
///   x >= l       : ( t1 e^{ikx},  t2 e^{iq (x - l)} )
/// Referencing b_s and t2 to the slab exit keeps every exponential bounded when
/// a wavenumber is evanescent. For open channels |t2| equals the modulus of the
/// amplitude written against e^{iqx}.
struct ScatteringSolution {
    double k = 0.0;       ///< 1/m
    double energy = 0.0;  ///< J
    cplx q;
    cplx k_plus;
    cplx k_minus;
    cplx r1, r2, t1, t2;
    cplx a_plus, b_plus, a_minus, b_minus;
    bool coupled = false;

    bool channel2_open() const { return q.imag() == 0.0 && q.real() > 0.0; }
    /// Flux ratio q/k for the excited channel, zero when it is closed.
    double channel2_flux_ratio() const { return channel2_open() ? q.real() / k : 0.0; }
    /// |R1|^2 + |T1|^2 + (q/k)(|R2|^2 + |T2|^2) - 1.
    double unitarity_residual() const;
};

ScatteringSolution solve_matching(const FieldSetup& setup, double k);

/// Spinor value and its x-derivative.
struct SpinorValue {
    cplx psi1, psi2;
    cplx dpsi1, dpsi2;
};

enum class Region { left, interior, right };

Region region_of(const FieldSetup& setup, double x);

/// Bare-basis stationary spinor at x, using the piece that owns x.
SpinorValue stationary_state(const ScatteringSolution& sol, const FieldSetup& setup, double x);
/// Evaluates one specific piece, also outside its home interval (one-sided limits).
SpinorValue stationary_state(const ScatteringSolution& sol, const FieldSetup& setup, double x,
                             Region piece);

/// |T1|^2 + (Re q / k)|T2|^2.
double stationary_transmission(const ScatteringSolution& sol);
/// |R1|^2 + (Re q / k)|R2|^2.
double stationary_reflection(const ScatteringSolution& sol);

/// Largest relative mismatch over the eight continuity conditions at x = 0 and x = l.
double matching_residual(const ScatteringSolution& sol, const FieldSetup& setup);

}  // namespace atomflux
