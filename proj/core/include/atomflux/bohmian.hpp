#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "atomflux/wavepacket.hpp"

namespace atomflux {

inline constexpr double default_rho_floor = 1e-30;

/// Guidance velocity J/rho. Throws NearNode when rho <= rho_floor.
double velocity(const SpectralPacket& packet, double x, double t,
                double rho_floor = default_rho_floor);

enum class Outcome { transmitted, reflected, undecided };

const char* to_string(Outcome o);

struct Trajectory {
    double x_initial = 0.0;
    std::vector<double> t;  ///< output times, strictly increasing from 0
    std::vector<double> x;
    Outcome outcome = Outcome::undecided;
    bool aborted = false;    ///< step size underflowed near a density node
    std::string diagnostic;  ///< set when aborted
    std::size_t steps = 0;         ///< accepted integrator steps
    std::size_t node_retries = 0;  ///< restarts after a stage landed near a density node
};

struct TrajectoryOptions {
    double tol = 1e-8;          ///< relative local error per step (error scale max(|x|, l))
    std::size_t n_outputs = 1200;  ///< output samples after t = 0, on a uniform cadence
    double rho_floor = default_rho_floor;
    double min_step = 1e-12;    ///< s; smaller steps abort the trajectory
    std::size_t max_steps = 2000000;
};

/// Integrates dx/dt = v(x, t) from x(0) = x0 and samples x at the given output times
/// (sorted, first entry 0). Never throws for near-node trouble; such a trajectory comes back
/// with aborted = true.
Trajectory integrate_trajectory(const SpectralPacket& packet, double x0,
                                std::span<const double> output_times,
                                const TrajectoryOptions& options = {});

/// Uniform cadence of options.n_outputs steps over [0, t_end].
Trajectory integrate_trajectory(const SpectralPacket& packet, double x0, double t_end,
                                const TrajectoryOptions& options = {});

struct Ensemble {
    std::vector<Trajectory> trajectories;  ///< in the order of the initial positions
    std::size_t transmitted = 0;
    std::size_t reflected = 0;
    std::size_t undecided = 0;
    std::size_t aborted = 0;

    /// Transmitted count over the trajectories that finished (aborted ones excluded).
    double transmitted_fraction() const;
};

/// Integrates every trajectory concurrently.
Ensemble integrate_ensemble(const SpectralPacket& packet, std::span<const double> initial,
                            double t_end, const TrajectoryOptions& options = {});

/// True when every pair of neighbouring trajectories (by initial position) keeps its order at
/// every shared output time. Aborted trajectories are skipped.
bool ordering_preserved(const Ensemble& ensemble);

enum class SamplingScheme { quantile, random };

/// n initial positions distributed as rho(., 0): the (i - 1/2)/n quantiles, or sorted
/// draws from a seeded generator.
std::vector<double> sample_initial_positions(const SpectralPacket& packet, std::size_t n,
                                             SamplingScheme scheme = SamplingScheme::quantile,
                                             std::uint64_t seed = 0);

/// Position x at which the probability to the right of x at time t equals `target`.
/// `guess` seeds the search; the result is accurate to `x_tol`.
double presence_root(const SpectralPacket& packet, double t, double target, double guess,
                     double x_tol = 1e-10);

/// Initial point of the trajectory splitting transmitted from reflected motion.
/// Throws NoBifurcation when |T|^2 is 0 or 1 within 1e-9.
double bifurcation_start(const SpectralPacket& packet);

struct BifurcationCurve {
    double x_start = 0.0;
    std::vector<double> t;
    std::vector<double> x;             ///< per-time root of the presence condition
    std::vector<double> trajectory_x;  ///< guidance trajectory from x_start at the same times
    double max_deviation = 0.0;        ///< max |x - trajectory_x|
    bool trajectory_aborted = false;
};

/// t_grid must be sorted and start at 0.
BifurcationCurve bifurcation_curve(const SpectralPacket& packet, std::span<const double> t_grid,
                                   const TrajectoryOptions& options = {});

}  // namespace atomflux
