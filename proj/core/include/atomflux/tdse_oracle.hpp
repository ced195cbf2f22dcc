#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "atomflux/wavepacket.hpp"

namespace atomflux {

/// Both channels sampled on x_i = x_min + i dx, i < n (periodic in the FFT sense).
struct GridState {
    double x_min = 0.0;
    double dx = 0.0;
    std::size_t n = 0;
    std::vector<cplx> psi1;
    std::vector<cplx> psi2;
    double t = 0.0;

    double x(std::size_t i) const { return x_min + dx * static_cast<double>(i); }
    double x_max() const { return x(n - 1); }
    double norm() const;
    double density(std::size_t i) const { return std::norm(psi1[i]) + std::norm(psi2[i]); }
    /// Probability on nodes with x >= x_from (a node sitting exactly on x_from counts half).
    double probability_beyond(double x_from) const;
    /// Largest density within `cells` nodes of either end of the grid.
    double edge_density(std::size_t cells = 10) const;
};

/// Grid spacing l / cells_per_length, x_min on a whole multiple of dx (so both field
/// edges fall on nodes), and the smallest power-of-two size that reaches x_hi.
struct GridLayout {
    double x_min = 0.0;
    double dx = 0.0;
    std::size_t n = 0;
};
GridLayout aligned_layout(const FieldSetup& setup, double x_lo, double x_hi,
                          std::size_t cells_per_length);

/// Channel 1 holds the analytic free Gaussian, channel 2 is empty. Throws InvalidArgument
/// unless the domain covers [x0 - 8 sigma0, l + 8 sigma0].
GridState init_grid(const FieldSetup& setup, const PacketSpec& spec, const GridLayout& layout);

/// Largest step allowed by dt max(E_top, hbar Omega, hbar |Delta|) / hbar < 0.1, where E_top
/// is the kinetic energy six spectral widths above k0.
double max_time_step(const FieldSetup& setup, const PacketSpec& spec);
/// Step with the default safety factor 0.05 in place of 0.1.
double default_time_step(const FieldSetup& setup, const PacketSpec& spec);

/// Strang splitting: half kinetic step (exact in k-space), full coupling step (exact 2x2
/// exponential per node; nodes on a field edge feel half the Rabi frequency), half kinetic
/// step. Consecutive half steps are merged inside advance().
class SplitStepPropagator {
public:
    /// Throws InvalidArgument when dt violates the phase-resolution precondition.
    SplitStepPropagator(const FieldSetup& setup, const PacketSpec& spec, GridState& state, double dt);
    ~SplitStepPropagator();
    SplitStepPropagator(const SplitStepPropagator&) = delete;
    SplitStepPropagator& operator=(const SplitStepPropagator&) = delete;

    double dt() const { return dt_; }
    void step() { advance(1); }
    void advance(std::size_t steps);
    /// Advances by whole steps to the first step boundary at or after t (within 1e-9 dt).
    void advance_to(double t);

private:
    struct Plans;
    void kinetic(bool half);
    void coupling();

    FieldSetup setup_;
    GridState& state_;
    double dt_;
    std::vector<cplx> kin_half_;
    std::vector<cplx> kin_full_;
    std::vector<std::array<cplx, 4>> coupling_;  ///< per node inside the field
    std::size_t first_ = 0;                      ///< first node carrying the coupling
    cplx detuning_phase_;                        ///< e^{i Delta dt} outside the field
    std::unique_ptr<Plans> plans_;
};

/// One step of length dt (plans are built per call; prefer SplitStepPropagator for loops).
void step(GridState& state, const FieldSetup& setup, const PacketSpec& spec, double dt);

struct OracleReport {
    double t = 0.0;
    double l2_relative = 0.0;   ///< ||rho_grid - rho_spectral|| / ||rho_spectral|| on the nodes
    double grid_beyond = 0.0;   ///< grid probability beyond l (both channels)
    double spectral_t2 = 0.0;   ///< spectral-average |T|^2
    double grid_norm = 0.0;
    double edge_density = 0.0;
    bool passed = false;        ///< l2_relative < tolerance
};

OracleReport compare_with_spectral(const GridState& state, const SpectralPacket& packet,
                                   double tolerance);

}  // namespace atomflux
