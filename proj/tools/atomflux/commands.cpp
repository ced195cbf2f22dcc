#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "atomflux/bohmian.hpp"
#include "atomflux/constants.hpp"
#include "atomflux/errors.hpp"
#include "atomflux/parallel.hpp"
#include "atomflux/tdse_oracle.hpp"
#include "atomflux/times.hpp"
#include "output.hpp"

namespace atomflux::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string ms_label(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%gms", t * 1e3);
    return buf;
}

SpectralPacket make_packet(const Scenario& s) {
    return build_packet(s.field(), s.packet(), s.packet_options());
}

SeriesOptions series_options(const Scenario& s) {
    return SeriesOptions{s.t_end, s.time_steps, SeriesOptions{}.convergence_tol};
}

TrajectoryOptions trajectory_options(const Scenario& s) {
    TrajectoryOptions o;
    o.tol = s.rk_tol;
    o.n_outputs = s.trajectory_outputs;
    return o;
}

void check(const char* quantity, double value, double tolerance) {
    if (!(std::abs(value) <= tolerance)) throw InvariantViolation(quantity, value, tolerance);
}

void run_amplitudes(const Scenario& s, const RunOptions& opt) {
    const auto start = Clock::now();
    const SpectralPacket packet = make_packet(s);
    CsvWriter csv(opt.out_dir / "amplitudes.csv",
                  {"k [1/m]", "q_re [1/m]", "q_im [1/m]", "k_plus_re [1/m]", "k_plus_im [1/m]",
                   "k_minus_re [1/m]", "k_minus_im [1/m]", "R1_sq [1]", "T1_sq [1]", "R2_sq [1]",
                   "T2_sq [1]", "unitarity_residual [1]"});
    std::vector<double> k, r1, t1, r2, t2;
    double worst = 0.0;
    for (const auto& node : packet.nodes()) {
        const ScatteringSolution& sol = node.sol;
        const double res = sol.unitarity_residual();
        worst = std::max(worst, std::abs(res));
        csv.row({sol.k, sol.q.real(), sol.q.imag(), sol.k_plus.real(), sol.k_plus.imag(), sol.k_minus.real(),
                 sol.k_minus.imag(), std::norm(sol.r1), std::norm(sol.t1), std::norm(sol.r2), std::norm(sol.t2),
                 res});
        k.push_back(sol.k);
        r1.push_back(std::norm(sol.r1));
        t1.push_back(std::norm(sol.t1));
        r2.push_back(std::norm(sol.r2));
        t2.push_back(std::norm(sol.t2));
    }
    if (opt.svg) {
        write_svg_plot(opt.out_dir / "amplitudes.svg", "Stationary amplitudes", "k [1/m]", k,
                       {{"|R1|^2", r1}, {"|T1|^2", t1}, {"|R2|^2", r2}, {"|T2|^2", t2}});
    }
    std::fprintf(opt.log, "amplitudes: %zu nodes, |T|^2 = %.6f, max unitarity residual %.3e (%.2f s)\n",
                 k.size(), transmission_probability(packet), worst, seconds_since(start));
    check("max unitarity residual", worst, 1e-10);
}

void run_snapshots(const Scenario& s, const RunOptions& opt) {
    const auto start = Clock::now();
    const SpectralPacket packet = make_packet(s);
    const std::size_t n = std::max<std::size_t>(s.snapshot_points, 2);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = s.snapshot_lo + (s.snapshot_hi - s.snapshot_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    std::vector<std::string> header{"x [m]"};
    std::vector<PlotSeries> columns;
    double worst_norm = 0.0;
    for (double t : s.snapshot_times) {
        header.push_back("rho_" + ms_label(t) + " [1/m]");
        PlotSeries col{"t = " + ms_label(t), std::vector<double>(n)};
        parallel_for(n, [&](std::size_t i) { col.y[i] = density(packet, x[i], t); });
        columns.push_back(std::move(col));
        const auto [lo, hi] = packet.support(t);
        worst_norm = std::max(worst_norm, std::abs(integrate_density(packet, lo, hi, t, 1e-8) - 1.0));
    }
    CsvWriter csv(opt.out_dir / "snapshots.csv", header);
    std::vector<double> row(columns.size() + 1);
    for (std::size_t i = 0; i < n; ++i) {
        row[0] = x[i];
        for (std::size_t c = 0; c < columns.size(); ++c) row[c + 1] = columns[c].y[i];
        csv.row(row);
    }
    if (opt.svg) write_svg_plot(opt.out_dir / "snapshots.svg", "Density snapshots", "x [m]", x, columns);
    std::fprintf(opt.log, "snapshots: %zu times x %zu points, max |norm - 1| %.3e (%.2f s)\n",
                 s.snapshot_times.size(), n, worst_norm, seconds_since(start));
    check("max |norm - 1| over snapshot times", worst_norm, 1e-6);
}

template <class Apply>
void run_sweep(const Scenario& s, const RunOptions& opt, const std::vector<double>& values,
               const std::string& stem, const std::string& column, double unit_scale,
               const std::string& axis, Apply apply) {
    const auto start = Clock::now();
    CsvWriter csv(opt.out_dir / (stem + ".csv"), {column, "T_sq [1]", "R_sq [1]", "T_sq_plus_R_sq [1]"});
    std::vector<double> xs, ts, rs;
    double worst = 0.0;
    for (double v : values) {
        Scenario local = s;
        apply(local, v);
        const SpectralPacket packet = make_packet(local);
        const double t2 = transmission_probability(packet);
        const double r2 = reflection_probability(packet);
        worst = std::max(worst, std::abs(t2 + r2 - packet.spectral_norm()));
        csv.row({v, t2, r2, t2 + r2});
        xs.push_back(v / unit_scale);
        ts.push_back(t2);
        rs.push_back(r2);
        std::fprintf(opt.log, "  %s = %-10.4g |T|^2 = %.6f  |R|^2 = %.6f\n", axis.c_str(), v / unit_scale, t2, r2);
    }
    if (opt.svg) write_svg_plot(opt.out_dir / (stem + ".svg"), "Transmission and reflection", axis, xs,
                                {{"|T|^2", ts}, {"|R|^2", rs}});
    std::fprintf(opt.log, "%s: %zu points (%.2f s)\n", stem.c_str(), values.size(), seconds_since(start));
    check("max |T^2 + R^2 - spectral norm|", worst, 1e-9);
}

void run_sweep_sigma(const Scenario& s, const RunOptions& opt) {
    run_sweep(s, opt, s.sigma_sweep, "sweep_sigma", "sigma0 [m]", 1e-6, "sigma0 [um]",
              [](Scenario& local, double v) { local.sigma0 = v; });
}

void run_sweep_delta(const Scenario& s, const RunOptions& opt) {
    run_sweep(s, opt, s.delta_sweep, "sweep_delta", "detuning [rad/s]", 2.0 * pi * 1e3, "detuning [kHz]",
              [](Scenario& local, double v) { local.detuning = v; });
}

void run_trajectories(const Scenario& s, const RunOptions& opt) {
    const auto start = Clock::now();
    const SpectralPacket packet = make_packet(s);
    const double t2 = transmission_probability(packet);
    const TrajectoryOptions topt = trajectory_options(s);
    const std::vector<double> x_init = sample_initial_positions(packet, s.trajectories);
    const Ensemble ensemble = integrate_ensemble(packet, x_init, s.t_end, topt);

    std::vector<std::string> header{"t [s]"};
    for (std::size_t j = 0; j < ensemble.trajectories.size(); ++j) header.push_back("x_" + std::to_string(j) + " [m]");
    {
        CsvWriter csv(opt.out_dir / "trajectories.csv", header);
        const std::size_t rows = ensemble.trajectories.empty() ? 0 : ensemble.trajectories.front().t.size();
        std::vector<double> row(header.size());
        for (std::size_t i = 0; i < rows; ++i) {
            row[0] = ensemble.trajectories.front().t[i];
            for (std::size_t j = 0; j < ensemble.trajectories.size(); ++j) {
                const Trajectory& tr = ensemble.trajectories[j];
                row[j + 1] = i < tr.x.size() ? tr.x[i] : NAN;
            }
            csv.row(row);
        }
    }
    {
        CsvWriter csv(opt.out_dir / "trajectory_outcomes.csv",
                      {"x_initial [m]", "x_final [m]", "steps [1]", "node_retries [1]", "outcome [-]"});
        for (const Trajectory& tr : ensemble.trajectories) {
            const double row[] = {tr.x_initial, tr.x.empty() ? NAN : tr.x.back(), static_cast<double>(tr.steps),
                                  static_cast<double>(tr.node_retries)};
            csv.row(row, tr.aborted ? "aborted" : to_string(tr.outcome));
        }
    }

    const std::vector<double> tb = time_grid(s.bifurcation_t_end, std::max<std::size_t>(s.bifurcation_points, 2) - 1);
    const BifurcationCurve curve = bifurcation_curve(packet, tb, topt);
    {
        CsvWriter csv(opt.out_dir / "bifurcation.csv", {"t [s]", "x_presence_root [m]", "x_trajectory [m]"});
        for (std::size_t i = 0; i < curve.t.size(); ++i) {
            csv.row({curve.t[i], curve.x[i], i < curve.trajectory_x.size() ? curve.trajectory_x[i] : NAN});
        }
    }
    if (opt.svg) {
        std::vector<PlotSeries> lines;
        const std::size_t stride = std::max<std::size_t>(1, ensemble.trajectories.size() / 40);
        const auto& t_out = ensemble.trajectories.front().t;
        const std::size_t cut = static_cast<std::size_t>(
            std::upper_bound(t_out.begin(), t_out.end(), s.bifurcation_t_end * 2.0) - t_out.begin());
        const std::vector<double> t_ms = [&] {
            std::vector<double> v;
            for (std::size_t i = 0; i < cut; ++i) v.push_back(t_out[i] * 1e3);
            return v;
        }();
        for (std::size_t j = 0; j < ensemble.trajectories.size(); j += stride) {
            const auto& xs = ensemble.trajectories[j].x;
            lines.push_back({"", std::vector<double>(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(std::min(cut, xs.size())))});
            for (double& v : lines.back().y) v *= 1e6;
        }
        write_svg_plot(opt.out_dir / "trajectories.svg", "Trajectories, x [um]", "t [ms]", t_ms, lines);
    }

    const double fraction = ensemble.transmitted_fraction();
    std::fprintf(opt.log,
                 "trajectories: %zu integrated (%zu transmitted, %zu reflected, %zu undecided, %zu aborted), "
                 "fraction %.4f vs |T|^2 %.4f\n",
                 ensemble.trajectories.size(), ensemble.transmitted, ensemble.reflected, ensemble.undecided,
                 ensemble.aborted, fraction, t2);
    std::fprintf(opt.log, "bifurcation: x_c(0) - x0 = %.4f um, max |root - trajectory| = %.3e m (%.2f s)\n",
                 (curve.x_start - s.x0) * 1e6, curve.max_deviation, seconds_since(start));
    if (!ordering_preserved(ensemble)) throw InvariantViolation("trajectory crossings", 1.0, 0.0);
    check("|transmitted fraction - |T|^2|", fraction - t2, 0.08);
}

void write_boundaries(const BoundarySeries& b, const RunOptions& opt) {
    const ArrivalDistribution p0 = arrival_distribution(b.t, b.entry.J);
    const ArrivalDistribution pl = arrival_distribution(b.t, b.exit.J);
    CsvWriter csv(opt.out_dir / "boundaries.csv",
                  {"t [s]", "J_0 [1/s]", "Q_0 [1]", "P_0 [1/s]", "J_l [1/s]", "Q_l [1]", "P_l [1/s]"});
    for (std::size_t i = 0; i < b.t.size(); ++i) {
        csv.row({b.t[i], b.entry.J[i], b.entry.Q[i], p0.P[i], b.exit.J[i], b.exit.Q[i], pl.P[i]});
    }
    if (opt.svg) {
        std::vector<double> t_ms;
        for (double t : b.t) t_ms.push_back(t * 1e3);
        write_svg_plot(opt.out_dir / "boundaries_q.svg", "Presence probabilities", "t [ms]", t_ms,
                       {{"Q(0,t)", b.entry.Q}, {"Q(l,t)", b.exit.Q}});
        write_svg_plot(opt.out_dir / "boundaries_p.svg", "Arrival distributions [1/s]", "t [ms]", t_ms,
                       {{"P_0", p0.P}, {"P_l", pl.P}});
    }
    std::fprintf(opt.log, "arrivals: x=0 %s form (int P = %.6f), x=l %s form (int P = %.6f), peaks at l: %zu\n",
                 to_string(p0.form), integrate_samples(b.t, p0.P), to_string(pl.form), integrate_samples(b.t, pl.P),
                 peak_census(b.exit.J, 1e-3, PeakSign::positive));
}

void run_boundaries(const Scenario& s, const RunOptions& opt) {
    const auto start = Clock::now();
    const SpectralPacket packet = make_packet(s);
    const BoundarySeries b = boundary_series(packet, series_options(s));
    write_boundaries(b, opt);
    std::fprintf(opt.log, "boundaries: %zu samples to %.4g s, Q_0(end) = %.6f, Q_l(end) = %.6f, |T|^2 = %.6f (%.2f s)\n",
                 b.t.size(), b.t.back(), b.entry.Q.back(), b.exit.Q.back(), b.transmission, seconds_since(start));
}

void run_times(const Scenario& s, const RunOptions& opt) {
    const auto start = Clock::now();
    const SpectralPacket packet = make_packet(s);
    const BoundarySeries b = boundary_series(packet, series_options(s));
    const CharacteristicTimes ct = characteristic_times(b);
    CsvWriter csv(opt.out_dir / "times.csv", {"T_sq [1]", "R_sq [1]", "tau_D [s]", "tau_T [s]", "tau_R [s]",
                                              "weighting_residual [s]"});
    csv.row({ct.T2, reflection_probability(packet), ct.dwell, ct.transmission, ct.reflection, ct.weighting_residual});
    std::fprintf(opt.log,
                 "times: |T|^2 = %.6f  tau_D = %.4f ms  tau_T = %.4f ms  tau_R = %.4f ms  residual = %.3e ms (%.2f s)\n",
                 ct.T2, ct.dwell * 1e3, ct.transmission * 1e3, ct.reflection * 1e3, ct.weighting_residual * 1e3,
                 seconds_since(start));
    check("weighting residual / tau_D", ct.weighting_residual / ct.dwell, 1e-3);
}

void run_oracle_check(const Scenario& s, const RunOptions& opt) {
    const auto start = Clock::now();
    const SpectralPacket packet = make_packet(s);
    const FieldSetup field = s.field();
    const PacketSpec spec = s.packet();
    const GridLayout layout = aligned_layout(field, s.oracle_lo, s.oracle_hi, s.oracle_cells);
    GridState state = init_grid(field, spec, layout);
    SplitStepPropagator prop(field, spec, state, default_time_step(field, spec));
    prop.advance_to(s.oracle_time);
    const OracleReport r = compare_with_spectral(state, packet, 1e-2);
    const double spectral_beyond = presence_probability(packet, field.length, state.t, PresenceMethod::spatial);

    {
        CsvWriter csv(opt.out_dir / "oracle_density.csv", {"x [m]", "rho_grid [1/m]", "rho_spectral [1/m]"});
        std::vector<double> rho(state.n);
        parallel_for(state.n, [&](std::size_t i) { rho[i] = density(packet, state.x(i), state.t); });
        for (std::size_t i = 0; i < state.n; ++i) csv.row({state.x(i), state.density(i), rho[i]});
    }
    CsvWriter csv(opt.out_dir / "oracle.csv",
                  {"t [s]", "dx [m]", "dt [s]", "points [1]", "l2_relative [1]", "grid_beyond_l [1]",
                   "spectral_beyond_l [1]", "spectral_T_sq [1]", "grid_norm [1]", "edge_density [1/m]"});
    csv.row({r.t, state.dx, prop.dt(), static_cast<double>(state.n), r.l2_relative, r.grid_beyond, spectral_beyond,
             r.spectral_t2, r.grid_norm, r.edge_density});
    std::fprintf(opt.log,
                 "oracle-check: t = %.4f ms, %zu points, dx = %.3e m, dt = %.3e s\n"
                 "  L2 relative = %.3e, grid norm = %.12f, edge density = %.2e\n"
                 "  probability beyond l: grid %.6f, spectral %.6f; spectral |T|^2 = %.6f (%.1f s)\n",
                 r.t * 1e3, state.n, state.dx, prop.dt(), r.l2_relative, r.grid_norm, r.edge_density, r.grid_beyond,
                 spectral_beyond, r.spectral_t2, seconds_since(start));
    check("grid vs spectral density, relative L2", r.l2_relative, 1e-2);
}

constexpr Command command_table[] = {
    {"amplitudes", "per-k stationary amplitudes and unitarity residual", run_amplitudes},
    {"snapshots", "density profiles at the configured times", run_snapshots},
    {"sweep-sigma", "|T|^2 and |R|^2 versus the initial width", run_sweep_sigma},
    {"sweep-delta", "|T|^2 and |R|^2 versus the detuning", run_sweep_delta},
    {"trajectories", "guidance trajectories and the bifurcation curve", run_trajectories},
    {"boundaries", "current, presence and arrival series at both field edges", run_boundaries},
    {"times", "dwell, transmission and reflection times", run_times},
    {"oracle-check", "grid propagation compared with the spectral packet", run_oracle_check},
};

}  // namespace

std::span<const Command> commands() { return command_table; }

const Command* find_command(std::string_view name) {
    for (const Command& c : command_table) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

}  // namespace atomflux::cli
