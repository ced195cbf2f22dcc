#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "atomflux/wavepacket.hpp"

namespace atomflux {

/// Current and presence probability at one point on a uniform time grid.
struct PointSeries {
    double x = 0.0;
    std::vector<double> J;  ///< 1/s
    std::vector<double> Q;  ///< probability to the right of x
};

/// Uniform grid t_i = i t_end / n_steps, i = 0..n_steps.
std::vector<double> time_grid(double t_end, std::size_t n_steps);

/// J(x, t_i) on the grid (evaluated concurrently) and Q(x, t_i) = Q(x, 0) + int_0^t J,
/// where Q(x, 0) is a spatial integral and the time integral is a cumulative 4-point rule.
PointSeries point_series(const SpectralPacket& packet, double x, std::span<const double> t_grid);

struct BoundarySeries {
    std::vector<double> t;
    PointSeries entry;  ///< x = 0
    PointSeries exit;   ///< x = l
    double transmission = 0.0;  ///< |T|^2 from the spectral average
};

struct SeriesOptions {
    double t_end = 1.2;        ///< s
    std::size_t n_steps = 32768;
    double convergence_tol = 1e-3;  ///< required |Q(t_end) - |T|^2| at both boundaries
};

/// Series at x = 0 and x = l. Throws NonConvergence when either Q has not settled at |T|^2
/// by t_end, and InvalidArgument when t_end is past the packet's alias horizon.
BoundarySeries boundary_series(const SpectralPacket& packet, const SeriesOptions& options = {});

/// As boundary_series, doubling t_end and n_steps (fixed step) until both Q's settle or the
/// window reaches max_t_end or the alias horizon.
BoundarySeries converged_boundary_series(const SpectralPacket& packet, SeriesOptions options,
                                         double max_t_end);

/// Integral over t of Q(a, t) - Q(b, t) for a < b.
double dwell_time(std::span<const double> t, std::span<const double> q_a,
                  std::span<const double> q_b);
/// (1/T2) int [min(Q(a), T2) - min(Q(b), T2)] dt. Negative integrand samples below 1e-9 are
/// clipped; deeper ones throw InconsistentSeries.
double transmission_time(std::span<const double> t, std::span<const double> q_a,
                         std::span<const double> q_b, double t2);
/// (1/(1 - T2)) int [max(Q(a), T2) - max(Q(b), T2)] dt, clipped like transmission_time.
double reflection_time(std::span<const double> t, std::span<const double> q_a,
                       std::span<const double> q_b, double t2);

double dwell_time(const BoundarySeries& s);
double transmission_time(const BoundarySeries& s);
double reflection_time(const BoundarySeries& s);

/// Outcome-conditioned times are NaN when |T|^2 (or 1 - |T|^2) is below 1e-6.
struct CharacteristicTimes {
    double T2 = 0.0;
    double dwell = 0.0;         ///< s
    double transmission = 0.0;  ///< s
    double reflection = 0.0;    ///< s
    double weighting_residual = 0.0;  ///< |dwell - (T2 tau_T + (1 - T2) tau_R)|, s
};

CharacteristicTimes characteristic_times(const BoundarySeries& s);

enum class ArrivalForm {
    flux,      ///< J never negative: P = J / int J
    absolute,  ///< J changes sign: P = |J| / int |J|
};

const char* to_string(ArrivalForm f);

struct ArrivalDistribution {
    std::vector<double> P;  ///< 1/s
    ArrivalForm form = ArrivalForm::flux;
    double normalization = 0.0;  ///< int J dt (flux) or int |J| dt (absolute)
};

/// Chooses the flux form when min J >= -negative_tol. Throws NoArrivals when the
/// normalization vanishes.
ArrivalDistribution arrival_distribution(std::span<const double> t, std::span<const double> J,
                                         double negative_tol = 1e-9);

/// Trapezoid integral of samples on the grid.
double integrate_samples(std::span<const double> t, std::span<const double> f);

enum class PeakSign { any, positive, negative };

/// Local maxima of |J| (restricted to J > 0 or J < 0 by `sign`) exceeding
/// threshold * max |J|, after 3-point smoothing.
std::size_t peak_census(std::span<const double> J, double threshold = 1e-3,
                        PeakSign sign = PeakSign::any);

/// Space-time integral of rho over [0, l] x [0, t_end] evaluated in closed form from the
/// spectral representation; an independent route to the dwell time.
double dwell_integral(const SpectralPacket& packet, double t_end);

}  // namespace atomflux
