#include "atomflux/times.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "atomflux/errors.hpp"
#include "atomflux/parallel.hpp"

namespace atomflux {

namespace {

constexpr double clip_tol = 1e-9;

void check_lengths(std::span<const double> t, std::span<const double> a,
                   std::span<const double> b) {
    if (t.size() < 2 || a.size() != t.size() || b.size() != t.size()) {
        throw InvalidArgument("series lengths do not match the time grid");
    }
}

// Integral over [t_i, t_{i+1}] of the cubic through four neighbouring samples.
std::vector<double> cumulative_integral(std::span<const double> t, std::span<const double> f) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 4) {
        for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
        return out;
    }
    const double h = t[1] - t[0];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double piece;
        if (i == 0) {
            piece = 9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3];
        } else if (i + 2 == n) {
            piece = f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1];
        } else {
            piece = -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2];
        }
        out[i + 1] = out[i] + h * piece / 24.0;
    }
    return out;
}

template <class Integrand>
double clipped_integral(std::span<const double> t, Integrand g, const char* what) {
    std::vector<double> f(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        double v = g(i);
        if (v < 0.0) {
            if (v < -clip_tol) {
                throw InconsistentSeries(std::string(what) + " integrand negative (" +
                                         detail::num(v) + ") at t=" + detail::num(t[i]) + " s");
            }
            v = 0.0;
        }
        f[i] = v;
    }
    return integrate_samples(t, f);
}

constexpr double one_sided_tol = 1e-6;

// (e^z - 1) / z without cancellation near zero
std::complex<double> phi1(std::complex<double> z) {
    if (std::abs(z) < 1e-3) {
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
    }
    return (std::exp(z) - 1.0) / z;
}

// int_0^l exp(g x + d) dx, written so that no intermediate overflows when the full
// integrand is bounded on [0, l]
std::complex<double> slab_integral(std::complex<double> g, std::complex<double> d, double l) {
    if (g.real() <= 0.0) return std::exp(d) * l * phi1(g * l);
    return std::exp(d + g * l) * l * phi1(-g * l);
}

}  // namespace

std::vector<double> time_grid(double t_end, std::size_t n_steps) {
    if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
    if (n_steps < 4) throw InvalidArgument("need at least 4 time steps");
    std::vector<double> t(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) {
        t[i] = t_end * static_cast<double>(i) / static_cast<double>(n_steps);
    }
    t.back() = t_end;
    return t;
}

PointSeries point_series(const SpectralPacket& packet, double x, std::span<const double> t_grid) {
    if (t_grid.size() < 2 || t_grid.front() != 0.0) throw InvalidArgument("time grid must start at 0");
    PointSeries s;
    s.x = x;
    s.J.resize(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) { s.J[i] = current(packet, x, t_grid[i]); });
    const double q0 = presence_probability(packet, x, 0.0, PresenceMethod::spatial);
    s.Q = cumulative_integral(t_grid, s.J);
    for (double& q : s.Q) q += q0;
    return s;
}

BoundarySeries boundary_series(const SpectralPacket& packet, const SeriesOptions& options) {
    if (options.t_end > packet.alias_horizon()) {
        throw InvalidArgument("t_end=" + detail::num(options.t_end) + " s is past the alias horizon " +
                              detail::num(packet.alias_horizon()) + " s of the spectral grid; use more nodes");
    }
    BoundarySeries s;
    s.t = time_grid(options.t_end, options.n_steps);
    s.transmission = transmission_probability(packet);
    s.entry = point_series(packet, 0.0, s.t);
    s.exit = point_series(packet, packet.setup().length, s.t);
    const double q_left = s.entry.Q.back();
    const double q_right = s.exit.Q.back();
    if (std::abs(q_left - s.transmission) >= options.convergence_tol ||
        std::abs(q_right - s.transmission) >= options.convergence_tol) {
        throw NonConvergence("presence probabilities have not settled by t_end=" +
                                 detail::num(options.t_end) + " s (Q(0)=" + detail::num(q_left) +
                                 ", Q(l)=" + detail::num(q_right) +
                                 ", |T|^2=" + detail::num(s.transmission) + ")",
                             q_left, q_right, s.transmission);
    }
    return s;
}

BoundarySeries converged_boundary_series(const SpectralPacket& packet, SeriesOptions options,
                                         double max_t_end) {
    for (;;) {
        try {
            return boundary_series(packet, options);
        } catch (const NonConvergence&) {
            if (2.0 * options.t_end > std::min(max_t_end, packet.alias_horizon())) throw;
            options.t_end *= 2.0;
            options.n_steps *= 2;
        }
    }
}

double integrate_samples(std::span<const double> t, std::span<const double> f) {
    if (t.size() != f.size()) throw InvalidArgument("series lengths do not match the time grid");
    double s = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return s;
}

double dwell_time(std::span<const double> t, std::span<const double> q_a,
                  std::span<const double> q_b) {
    check_lengths(t, q_a, q_b);
    return clipped_integral(t, [&](std::size_t i) { return q_a[i] - q_b[i]; }, "dwell");
}

double transmission_time(std::span<const double> t, std::span<const double> q_a,
                         std::span<const double> q_b, double t2) {
    check_lengths(t, q_a, q_b);
    // the spectral norm exceeds 1 by the quadrature error, so |T|^2 may too
    if (!(t2 > 0.0 && t2 < 1.0 + 1e-6)) throw InvalidArgument("|T|^2 must lie in (0, 1]");
    const double v = clipped_integral(
        t, [&](std::size_t i) { return std::min(q_a[i], t2) - std::min(q_b[i], t2); },
        "transmission-time");
    return v / t2;
}

double reflection_time(std::span<const double> t, std::span<const double> q_a,
                       std::span<const double> q_b, double t2) {
    check_lengths(t, q_a, q_b);
    if (!(t2 >= 0.0 && t2 < 1.0)) throw InvalidArgument("|T|^2 must lie in [0, 1)");
    const double v = clipped_integral(
        t, [&](std::size_t i) { return std::max(q_a[i], t2) - std::max(q_b[i], t2); },
        "reflection-time");
    return v / (1.0 - t2);
}

double dwell_time(const BoundarySeries& s) { return dwell_time(s.t, s.entry.Q, s.exit.Q); }

double transmission_time(const BoundarySeries& s) {
    return transmission_time(s.t, s.entry.Q, s.exit.Q, s.transmission);
}

double reflection_time(const BoundarySeries& s) {
    return reflection_time(s.t, s.entry.Q, s.exit.Q, s.transmission);
}

CharacteristicTimes characteristic_times(const BoundarySeries& s) {
    CharacteristicTimes c;
    c.T2 = s.transmission;
    c.dwell = dwell_time(s);
    // a time conditioned on an outcome that (to quadrature accuracy) never happens is undefined
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool transmits = c.T2 > one_sided_tol;
    const bool reflects = c.T2 < 1.0 - one_sided_tol;
    c.transmission = transmits ? transmission_time(s) : nan;
    c.reflection = reflects ? reflection_time(s) : nan;
    const double weighted = (transmits ? c.T2 * c.transmission : 0.0) +
                            (reflects ? (1.0 - c.T2) * c.reflection : 0.0);
    c.weighting_residual = std::abs(c.dwell - weighted);
    return c;
}

const char* to_string(ArrivalForm f) {
    return f == ArrivalForm::flux ? "flux" : "absolute";
}

ArrivalDistribution arrival_distribution(std::span<const double> t, std::span<const double> J,
                                         double negative_tol) {
    if (t.size() != J.size() || t.size() < 2) throw InvalidArgument("series lengths do not match the time grid");
    ArrivalDistribution out;
    const double j_min = *std::min_element(J.begin(), J.end());
    out.form = j_min >= -negative_tol ? ArrivalForm::flux : ArrivalForm::absolute;
    out.P.resize(J.size());
    for (std::size_t i = 0; i < J.size(); ++i) {
        out.P[i] = out.form == ArrivalForm::flux ? J[i] : std::abs(J[i]);
    }
    out.normalization = integrate_samples(t, out.P);
    if (!(out.normalization > 0.0)) throw NoArrivals("no probability current crosses the boundary");
    for (double& p : out.P) p /= out.normalization;
    return out;
}

std::size_t peak_census(std::span<const double> J, double threshold, PeakSign sign) {
    const std::size_t n = J.size();
    if (n < 3) return 0;
    std::vector<double> s(n);
    s[0] = J[0];
    s[n - 1] = J[n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i) s[i] = (J[i - 1] + J[i] + J[i + 1]) / 3.0;

    const auto signal = [&](double v) {
        switch (sign) {
            case PeakSign::positive: return v > 0.0 ? v : 0.0;
            case PeakSign::negative: return v < 0.0 ? -v : 0.0;
            case PeakSign::any: break;
        }
        return std::abs(v);
    };
    double peak = 0.0;
    for (double v : J) peak = std::max(peak, std::abs(v));
    const double floor = threshold * peak;

    std::size_t count = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double c = signal(s[i]);
        // plateaus count once, at their left edge
        if (c > floor && c > signal(s[i - 1]) && c >= signal(s[i + 1])) ++count;
    }
    return count;
}

double dwell_integral(const SpectralPacket& packet, double t_end) {
    using cplx = std::complex<double>;
    const cplx I{0.0, 1.0};
    const auto nodes = packet.nodes();
    const std::size_t n = nodes.size();
    const double l = packet.setup().length;
    const bool coupled = packet.setup().coupled();

    // interior channel s of node j: a e^{ik x} + b e^{-ik(x - l)}, carried by the spinor
    // (1, c_s); the two dressed spinors are orthogonal, so channels never mix in rho
    struct Channel {
        cplx k, a, b;
    };
    std::vector<std::array<Channel, 2>> ch(n);
    std::array<double, 2> spin_norm{1.0, 0.0};
    if (coupled) {
        const DressedData d = dressed_decomposition(packet.setup());
        spin_norm = {1.0 + std::norm(d.c_plus), 1.0 + std::norm(d.c_minus)};
    }
    for (std::size_t j = 0; j < n; ++j) {
        const ScatteringSolution& s = nodes[j].sol;
        if (coupled) {
            ch[j] = {Channel{s.k_plus, s.a_plus, s.b_plus}, Channel{s.k_minus, s.a_minus, s.b_minus}};
        } else {
            ch[j] = {Channel{cplx(s.k, 0.0), 1.0, 0.0}, Channel{0.0, 0.0, 0.0}};
        }
    }

    const auto overlap = [&](const Channel& ci, const Channel& cj) {
        const cplx ki = std::conj(ci.k);
        const cplx kj = cj.k;
        cplx sum = std::conj(ci.a) * cj.a * slab_integral(I * (kj - ki), 0.0, l);
        sum += std::conj(ci.a) * cj.b * slab_integral(-I * (kj + ki), I * kj * l, l);
        sum += std::conj(ci.b) * cj.a * slab_integral(I * (kj + ki), -I * ki * l, l);
        sum += std::conj(ci.b) * cj.b * slab_integral(-I * (kj - ki), I * (kj - ki) * l, l);
        return sum;
    };

    std::vector<double> rows(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        cplx row{};
        for (std::size_t j = 0; j < n; ++j) {
            cplx g = spin_norm[0] * overlap(ch[i][0], ch[j][0]);
            if (spin_norm[1] != 0.0) g += spin_norm[1] * overlap(ch[i][1], ch[j][1]);
            const double dw = nodes[i].omega - nodes[j].omega;
            const cplx time = t_end * phi1(I * dw * t_end);
            row += std::conj(nodes[i].weight) * nodes[j].weight * g * time;
        }
        rows[i] = row.real();
    });
    double total = 0.0;
    for (double r : rows) total += r;
    return total;
}

}  // namespace atomflux
