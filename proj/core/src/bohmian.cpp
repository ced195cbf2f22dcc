#include "atomflux/bohmian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "atomflux/constants.hpp"
#include "atomflux/errors.hpp"
#include "atomflux/parallel.hpp"
#include "quadrature.hpp"

namespace atomflux {

namespace {

namespace ode = boost::numeric::odeint;
using state_type = std::array<double, 1>;

// Keeps the probability G(x) = int_x^inf rho(x', t) dx' at a moving point, updating it by
// short incremental integrals so that sequential root searches stay cheap.
class PresenceWalker {
public:
    PresenceWalker(const SpectralPacket& packet, double t, double x)
        : packet_(packet), t_(t), x_(x) {
        const auto [lo, hi] = packet.support(t);
        lo_ = lo;
        hi_ = hi;
        g_ = x >= hi ? 0.0 : integrate_density(packet, std::max(x, lo), hi, t, 1e-11);
    }

    // resumes from a known G(x)
    PresenceWalker(const SpectralPacket& packet, double t, double x, double g)
        : packet_(packet), t_(t), x_(x), g_(g) {
        const auto [lo, hi] = packet.support(t);
        lo_ = lo;
        hi_ = hi;
    }

    double x() const { return x_; }
    double g() const { return g_; }
    double total() const { return g_ + integral(lo_, x_); }

    void move_to(double y, double gy) {
        x_ = y;
        g_ = gy;
    }

    double solve(double target, double x_tol) {
        const double rho_scale = packet_.spec().sigma0;
        double h = 0.25 * rho_scale;
        double a = x_, ga = g_, b = x_, gb = g_;
        // bracket: G(a) >= target >= G(b), G non-increasing
        if (g_ >= target) {
            for (;;) {
                b = a + h;
                gb = ga - integral(a, b);
                if (gb <= target) break;
                a = b;
                ga = gb;
                h *= 2.0;
                if (a > hi_ + rho_scale) throw InvalidArgument("presence target not reached");
            }
        } else {
            for (;;) {
                a = b - h;
                ga = gb + integral(a, b);
                if (ga >= target) break;
                b = a;
                gb = ga;
                h *= 2.0;
                if (b < lo_ - rho_scale) throw InvalidArgument("presence target not reached");
            }
        }
        // safeguarded Newton: G' = -rho
        double c = (ga - target < target - gb) ? a : b;
        double gc = c == a ? ga : gb;
        for (int iter = 0; iter < 200; ++iter) {
            const double r = density(packet_, c, t_);
            double next = r > 0.0 ? c + (gc - target) / r : 0.5 * (a + b);
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            const double gn = gc - integral(c, next);
            const double step = std::abs(next - c);
            c = next;
            gc = gn;
            if (gc > target) {
                a = c;
            } else {
                b = c;
            }
            if (step < x_tol || b - a < x_tol) break;
        }
        move_to(c, gc);
        return c;
    }

private:
    // signed integral of rho from u to v
    double integral(double u, double v) const {
        if (u == v) return 0.0;
        if (u < v) return integrate_density(packet_, u, v, t_, 1e-13);
        return -integrate_density(packet_, v, u, t_, 1e-13);
    }

    const SpectralPacket& packet_;
    double t_;
    double x_;
    double g_ = 0.0;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

Outcome classify(double x, double length) {
    if (x > length) return Outcome::transmitted;
    if (x < 0.0) return Outcome::reflected;
    return Outcome::undecided;
}

std::vector<double> uniform_times(double t_end, std::size_t n) {
    if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
    if (n == 0) throw InvalidArgument("need at least one output step");
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out[i] = t_end * static_cast<double>(i) / static_cast<double>(n);
    out.back() = t_end;
    return out;
}

}  // namespace

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::transmitted: return "transmitted";
        case Outcome::reflected: return "reflected";
        case Outcome::undecided: return "undecided";
    }
    return "undecided";
}

double velocity(const SpectralPacket& packet, double x, double t, double rho_floor) {
    const PacketValue v = packet.psi(x, t);
    const double rho = density(v);
    if (!(rho > rho_floor)) throw NearNode(x, t, rho);
    return current(v, packet.setup().mass) / rho;
}

Trajectory integrate_trajectory(const SpectralPacket& packet, double x0,
                                std::span<const double> output_times,
                                const TrajectoryOptions& options) {
    if (output_times.empty() || output_times.front() != 0.0) {
        throw InvalidArgument("output times must start at 0");
    }
    if (!std::is_sorted(output_times.begin(), output_times.end())) {
        throw InvalidArgument("output times must be sorted");
    }
    Trajectory traj;
    traj.x_initial = x0;
    traj.t.reserve(output_times.size());
    traj.x.reserve(output_times.size());
    traj.t.push_back(0.0);
    traj.x.push_back(x0);

    const double length = packet.setup().length;
    const auto rhs = [&](const state_type& s, state_type& dsdt, double t) {
        dsdt[0] = velocity(packet, s[0], t, options.rho_floor);
    };

    // error scale tol * (l + |x| + dt |v|); outputs come from the dense interpolant, and no
    // step may span more than a tenth of a field crossing
    const double max_dt = 0.1 * length / packet.exterior_speed();
    auto stepper = ode::make_dense_output(options.tol * length, options.tol, max_dt,
                                          ode::runge_kutta_dopri5<state_type>());
    try {
        const double rho0 = density(packet, x0, 0.0);
        if (!(rho0 > options.rho_floor)) throw NearNode(x0, 0.0, rho0);
        double dt = 1e-2 * max_dt;
        stepper.initialize(state_type{x0}, 0.0, dt);
        state_type s{};
        std::size_t k = 1;
        while (k < output_times.size()) {
            if (traj.steps > options.max_steps) {
                const double xc = stepper.current_state()[0];
                throw NearNode(xc, stepper.current_time(), density(packet, xc, stepper.current_time()));
            }
            try {
                stepper.do_step(rhs);
                ++traj.steps;
            } catch (const NearNode&) {
                // restart from the last accepted point with a shorter step
                ++traj.node_retries;
                dt = 0.25 * stepper.current_time_step();
                const double tc = stepper.current_time();
                const state_type xc = stepper.current_state();
                if (dt < options.min_step) throw NearNode(xc[0], tc, density(packet, xc[0], tc));
                stepper.initialize(xc, tc, dt);
                continue;
            }
            while (k < output_times.size() && output_times[k] <= stepper.current_time()) {
                stepper.calc_state(output_times[k], s);
                traj.t.push_back(output_times[k]);
                traj.x.push_back(s[0]);
                ++k;
            }
        }
    } catch (const NearNode& e) {
        traj.aborted = true;
        traj.diagnostic = std::string("step size underflow: ") + e.what();
    }
    traj.outcome = traj.aborted ? Outcome::undecided : classify(traj.x.back(), length);
    return traj;
}

Trajectory integrate_trajectory(const SpectralPacket& packet, double x0, double t_end,
                                const TrajectoryOptions& options) {
    const std::vector<double> times = uniform_times(t_end, options.n_outputs);
    return integrate_trajectory(packet, x0, times, options);
}

double Ensemble::transmitted_fraction() const {
    const std::size_t finished = trajectories.size() - aborted;
    if (finished == 0) return 0.0;
    return static_cast<double>(transmitted) / static_cast<double>(finished);
}

Ensemble integrate_ensemble(const SpectralPacket& packet, std::span<const double> initial,
                            double t_end, const TrajectoryOptions& options) {
    const std::vector<double> times = uniform_times(t_end, options.n_outputs);
    Ensemble out;
    out.trajectories.resize(initial.size());
    parallel_for(initial.size(), [&](std::size_t i) {
        out.trajectories[i] = integrate_trajectory(packet, initial[i], times, options);
    });
    for (const Trajectory& tr : out.trajectories) {
        if (tr.aborted) {
            ++out.aborted;
            continue;
        }
        switch (tr.outcome) {
            case Outcome::transmitted: ++out.transmitted; break;
            case Outcome::reflected: ++out.reflected; break;
            case Outcome::undecided: ++out.undecided; break;
        }
    }
    return out;
}

bool ordering_preserved(const Ensemble& ensemble) {
    std::vector<const Trajectory*> live;
    for (const Trajectory& tr : ensemble.trajectories) {
        if (!tr.aborted) live.push_back(&tr);
    }
    std::sort(live.begin(), live.end(),
              [](const Trajectory* a, const Trajectory* b) { return a->x_initial < b->x_initial; });
    for (std::size_t i = 1; i < live.size(); ++i) {
        const Trajectory& lo = *live[i - 1];
        const Trajectory& hi = *live[i];
        const std::size_t n = std::min(lo.x.size(), hi.x.size());
        for (std::size_t k = 0; k < n; ++k) {
            if (!(lo.x[k] < hi.x[k])) return false;
        }
    }
    return true;
}

std::vector<double> sample_initial_positions(const SpectralPacket& packet, std::size_t n,
                                             SamplingScheme scheme, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("need at least one sample");
    std::vector<double> levels(n);
    if (scheme == SamplingScheme::quantile) {
        for (std::size_t i = 0; i < n; ++i) {
            levels[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        }
    } else {
        std::mt19937_64 gen(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (double& q : levels) q = u(gen);
        std::sort(levels.begin(), levels.end());
    }

    PresenceWalker walker(packet, 0.0, packet.spec().x0);
    const double total = walker.total();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = walker.solve(total * (1.0 - levels[i]), 1e-12);
    }
    return out;
}

double presence_root(const SpectralPacket& packet, double t, double target, double guess,
                     double x_tol) {
    PresenceWalker walker(packet, t, guess);
    return walker.solve(target, x_tol);
}

namespace {

// |T|^2 strictly between 0 and the packet's norm, else there is nothing to separate
double split_probability(const SpectralPacket& packet) {
    const double t2 = transmission_probability(packet);
    if (!(t2 > 1e-9 && t2 < packet.spectral_norm() - 1e-9)) throw NoBifurcation(t2);
    return t2;
}

// G(x, t1) from G(x, t0) through the current at fixed x: dG/dt = J(x, t)
double advance_presence(const SpectralPacket& packet, double x, double t0, double t1, double g0) {
    const double v0 = hbar * packet.spec().k0 / packet.setup().mass;
    const double panel = 0.25 * packet.spec().sigma0 / v0;
    const double tol = 1e-12;
    const auto r = detail::paneled_gk15([&](double s) { return current(packet, x, s); }, t0, t1, panel, tol);
    if (r.error > 100.0 * tol) throw QuadratureFailure("current quadrature missed tolerance", g0 + r.value, r.error);
    return g0 + r.value;
}

}  // namespace

double bifurcation_start(const SpectralPacket& packet) {
    const double t2 = split_probability(packet);
    return presence_root(packet, 0.0, t2, packet.spec().x0, 1e-12);
}

BifurcationCurve bifurcation_curve(const SpectralPacket& packet, std::span<const double> t_grid,
                                   const TrajectoryOptions& options) {
    if (t_grid.empty() || t_grid.front() != 0.0) throw InvalidArgument("time grid must start at 0");
    const double t2 = split_probability(packet);

    BifurcationCurve curve;
    curve.t.assign(t_grid.begin(), t_grid.end());
    curve.x.resize(t_grid.size());
    curve.x_start = presence_root(packet, 0.0, t2, packet.spec().x0, 1e-12);
    curve.x[0] = curve.x_start;

    const Trajectory guide = integrate_trajectory(packet, curve.x_start, t_grid, options);
    curve.trajectory_aborted = guide.aborted;
    curve.trajectory_x = guide.x;

    // Each block of times opens with a full root search seeded from the guidance trajectory;
    // later roots in the block carry G forward along the previous root by the current and then
    // only integrate the density over the short step between roots.
    const std::size_t n = t_grid.size() - 1;
    const std::size_t blocks = std::min(worker_count(), n);
    const std::size_t block = (n + blocks - 1) / blocks;
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t lo = 1 + b * block;
        const std::size_t hi = std::min(n + 1, lo + block);
        double g = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            if (i == lo) {
                const double guess = i < guide.x.size() ? guide.x[i] : curve.x_start;
                PresenceWalker walker(packet, t_grid[i], guess);
                curve.x[i] = walker.solve(t2, 1e-10);
                g = walker.g();
            } else {
                const double x = curve.x[i - 1];
                PresenceWalker walker(packet, t_grid[i], x, advance_presence(packet, x, t_grid[i - 1], t_grid[i], g));
                curve.x[i] = walker.solve(t2, 1e-10);
                g = walker.g();
            }
        }
    });

    for (std::size_t i = 0; i < std::min(curve.x.size(), curve.trajectory_x.size()); ++i) {
        curve.max_deviation = std::max(curve.max_deviation, std::abs(curve.x[i] - curve.trajectory_x[i]));
    }
    return curve;
}

}  // namespace atomflux
