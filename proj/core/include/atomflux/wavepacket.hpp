#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "atomflux/scattering.hpp"

namespace atomflux {

/// Gaussian wave packet parameters; spectral amplitude
/// (2 sigma0^2 / pi)^{1/4} exp(-sigma0^2 (k - k0)^2) exp(-i k x0).
struct PacketSpec {
    double k0 = 0.0;      ///< mean wavenumber, 1/m
    double sigma0 = 0.0;  ///< initial spatial width, m
    double x0 = 0.0;      ///< initial centre, m (left of the field)

    static PacketSpec from_velocity(double mass, double v0, double sigma0, double x0);

    /// Throws InvalidArgument unless sigma0 > 0, k0 > 0, x0 < 0 and k0 sigma0 > 10
    /// (mean wavenumber at least 20 spectral standard deviations from zero).
    void validate() const;
    double spectral_width() const { return 0.5 / sigma0; }
};

struct PacketOptions {
    std::size_t n_nodes = 1024;
    double span = 6.0;  ///< grid half-width in units of the spectral standard deviation
};

/// Value of the spinor wave function (and x-derivative) at one space-time point.
using PacketValue = SpinorValue;

/// Gaussian superposition of stationary scattering states on a uniform k-grid
/// (composite trapezoid). Immutable once built.
class SpectralPacket {
public:
    struct Node {
        double k = 0.0;
        double omega = 0.0;      ///< E_k / hbar
        double probability = 0.0;  ///< |psi~(k)|^2 times the quadrature weight
        cplx weight;             ///< psi~(k) times quadrature weight times 1/sqrt(2 pi)
        ScatteringSolution sol;
        cplx exit_plus;          ///< e^{i k+ l}
        cplx exit_minus;         ///< e^{i k- l}
    };

    SpectralPacket(const FieldSetup& setup, const PacketSpec& spec, const PacketOptions& options);

    const FieldSetup& setup() const { return setup_; }
    const PacketSpec& spec() const { return spec_; }
    const PacketOptions& options() const { return options_; }
    std::span<const Node> nodes() const { return nodes_; }
    double dk() const { return dk_; }

    PacketValue psi(double x, double t) const;
    PacketValue psi(double x, double t, Region piece) const;

    /// Mode values w_j Phi_j(x) without the time factor; psi(x, t) = sum_j modes_j e^{-i omega_j t}.
    std::vector<PacketValue> modes(double x) const;

    /// Sum of |psi~(k_j)|^2 times the quadrature weights.
    double spectral_norm() const;

    /// Fastest speed carried by any node in any region, m/s.
    double max_speed() const { return max_speed_; }
    /// Fastest speed outside the field, m/s.
    double exterior_speed() const { return exterior_speed_; }
    /// Free-Gaussian width sigma0 sqrt(1 + (hbar t / 2 m sigma0^2)^2).
    double free_width(double t) const;
    /// Interval [lo, hi] outside which the density is negligible at time t. Throws
    /// InvalidArgument once the interval outgrows the alias-free period 2 pi / dk.
    std::pair<double, double> support(double t) const;
    /// Latest time at which values on [0, l] are free of the packet's periodic images, which
    /// repeat every 2 pi / dk in x.
    double alias_horizon() const;

private:
    FieldSetup setup_;
    PacketSpec spec_;
    PacketOptions options_;
    DressedData dressed_{};
    std::vector<Node> nodes_;
    double dk_ = 0.0;
    double max_speed_ = 0.0;
    double exterior_speed_ = 0.0;
    bool degenerate_q_ = false;  ///< q == k on every node (zero detuning)
};

/// Solves the scattering problem on every node (in parallel) and assembles the packet.
/// Throws InvalidArgument when the grid would reach k <= 0.
SpectralPacket build_packet(const FieldSetup& setup, const PacketSpec& spec,
                            const PacketOptions& options = {});

double density(const PacketValue& v);
/// hbar/m Im(psi1* dpsi1 + psi2* dpsi2).
double current(const PacketValue& v, double mass);

double density(const SpectralPacket& packet, double x, double t);
double current(const SpectralPacket& packet, double x, double t);

enum class PresenceMethod { spatial, flux };

/// Probability to the right of x at time t.
/// spatial: integral of the density over [x, support end];
/// flux: the t = 0 spatial value plus the time integral of J(x, t') over [0, t].
double presence_probability(const SpectralPacket& packet, double x, double t, PresenceMethod method);

/// Integral of the density over [a, b] at time t with absolute error target `tol`.
double integrate_density(const SpectralPacket& packet, double a, double b, double t, double tol = 1e-10);

/// Total probability at time t over the whole support.
double total_norm(const SpectralPacket& packet, double t);

/// Gaussian-weighted average of the stationary transmission over the packet spectrum.
double transmission_probability(const SpectralPacket& packet);
/// Spectral average of the stationary reflection probability (complement of the above up to
/// the packet's norm).
double reflection_probability(const SpectralPacket& packet);

}  // namespace atomflux
