#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "atomflux/scattering.hpp"
#include "atomflux/wavepacket.hpp"

namespace atomflux::cli {

/// Bad configuration text; line is 1-based (0 when not tied to a line).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, const std::string& msg)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Everything a run needs. Defaults are the reference parameter set: caesium mass, 1 cm/s,
/// 100 um field, pi/2 pulse with n = 650, 20 um packet on resonance.
struct Scenario {
    double mass = 2.2e-25;   // kg
    double v0 = 0.01;        // m/s
    double length = 1e-4;    // m
    double phase = 0.0;      // rad
    double detuning = 0.0;   // rad/s
    std::optional<double> rabi;  // rad/s; when unset the pulse condition with rabi_n applies
    double rabi_n = 650.0;
    double sigma0 = 20e-6;   // m
    double x0 = -120.4e-6;   // m

    std::size_t k_nodes = 1024;
    double span = 6.0;
    double t_end = 1.2;      // s
    std::size_t time_steps = 32768;
    std::size_t trajectories = 200;
    std::size_t trajectory_outputs = 1200;
    double rk_tol = 1e-8;

    std::vector<double> snapshot_times{0.0, 8.7e-3, 14.7e-3, 23.7e-3, 29.7e-3, 104.7e-3};  // s
    double snapshot_lo = -0.6e-3;  // m
    double snapshot_hi = 0.6e-3;   // m
    std::size_t snapshot_points = 2401;
    std::vector<double> sigma_sweep{5e-6, 10e-6, 20e-6, 30e-6, 40e-6, 50e-6};  // m
    std::vector<double> delta_sweep;  // rad/s; filled by the constructor
    double bifurcation_t_end = 60e-3;  // s
    std::size_t bifurcation_points = 121;

    double oracle_time = 29.7e-3;  // s
    std::size_t oracle_cells = 12800;  // grid cells per field length
    double oracle_lo = -0.46e-3;   // m
    double oracle_hi = 0.56e-3;    // m

    std::string output_dir = "out";

    Scenario();

    /// (rabi_n + 1/2) pi v0 / l unless rabi is given explicitly.
    double rabi_frequency() const;
    FieldSetup field() const;
    PacketSpec packet() const;
    PacketOptions packet_options() const;

    bool operator==(const Scenario&) const = default;
};

/// key = value lines, '#' comments. Dimensional values need a unit suffix.
Scenario parse_config(std::string_view text);

/// One line per key in a fixed order, SI units, 17 significant digits; parse_config of the
/// result reproduces the scenario exactly.
std::string canonical_form(const Scenario& s);

}  // namespace atomflux::cli
