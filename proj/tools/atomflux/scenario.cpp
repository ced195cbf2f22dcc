#include "scenario.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <type_traits>

#include "atomflux/constants.hpp"

namespace atomflux::cli {

namespace {

enum class Kind { length, time, velocity, mass, angle, frequency, count, real, text };

// value in SI = number * 10^decimal * factor; the power of ten is applied to the decimal
// text so that "120.4 um" reads exactly like "120.4e-6 m"
struct Unit {
    std::string_view name;
    int decimal;
    double factor;
};

std::vector<Unit> units_for(Kind k) {
    switch (k) {
        case Kind::length: return {{"um", -6, 1.0}, {"mm", -3, 1.0}, {"m", 0, 1.0}};
        case Kind::time: return {{"us", -6, 1.0}, {"ms", -3, 1.0}, {"s", 0, 1.0}};
        case Kind::velocity: return {{"mm/s", -3, 1.0}, {"m/s", 0, 1.0}};
        case Kind::mass: return {{"kg", 0, 1.0}};
        case Kind::angle: return {{"rad", 0, 1.0}};
        case Kind::frequency: return {{"rad/s", 0, 1.0}, {"kHz", 3, 2.0 * pi}, {"Hz", 0, 2.0 * pi}};
        default: return {};
    }
}

// SI unit used by the canonical form
std::string_view si_unit(Kind k) {
    switch (k) {
        case Kind::length: return "m";
        case Kind::time: return "s";
        case Kind::velocity: return "m/s";
        case Kind::mass: return "kg";
        case Kind::angle: return "rad";
        case Kind::frequency: return "rad/s";
        default: return "";
    }
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Parsed {
    double value;
    std::string_view number;
    std::string_view unit;
};

Parsed split_number(std::string_view item, std::size_t line) {
    item = trim(item);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr == item.data()) {
        throw ConfigError(line, "malformed number '" + std::string(item) + "'");
    }
    const auto used = static_cast<std::size_t>(ptr - item.data());
    return {v, item.substr(0, used), trim(item.substr(used))};
}

// number * 10^shift, correctly rounded
double shift_decimal(std::string_view number, int shift) {
    const auto e = number.find_first_of("eE");
    int exponent = 0;
    if (e != std::string_view::npos) {
        std::from_chars(number.data() + e + 1 + (number[e + 1] == '+'), number.data() + number.size(), exponent);
    }
    const std::string text = std::string(number.substr(0, e)) + "e" + std::to_string(exponent + shift);
    double v = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), v);
    return v;
}

double apply_unit(Kind k, const Parsed& p, std::string_view unit, std::size_t line, std::string_view key) {
    const double v = p.value;
    const auto table = units_for(k);
    if (table.empty()) {
        if (!unit.empty()) throw ConfigError(line, std::string(key) + " takes no unit");
        return v;
    }
    if (unit.empty()) {
        throw ConfigError(line, std::string(key) + " needs a unit (" + std::string(si_unit(k)) + ", ...)");
    }
    for (const Unit& u : table) {
        if (u.name == unit) return (u.decimal == 0 ? v : shift_decimal(p.number, u.decimal)) * u.factor;
    }
    throw ConfigError(line, "unit '" + std::string(unit) + "' does not fit " + std::string(key));
}

std::vector<double> parse_list(Kind k, std::string_view text, std::size_t line, std::string_view key) {
    std::vector<Parsed> items;
    while (true) {
        const auto comma = text.find(',');
        items.push_back(split_number(text.substr(0, comma), line));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    // a unit written only on the last item applies to the whole list
    const std::string_view shared = items.back().unit;
    std::vector<double> out;
    for (const Parsed& p : items) {
        out.push_back(apply_unit(k, p, p.unit.empty() ? shared : p.unit, line, key));
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Field {
    std::string_view key;
    Kind kind;
    bool list;
    std::function<void(Scenario&, const std::vector<double>&, std::string_view)> set;
    std::function<std::string(const Scenario&)> show;  // empty string: omit the line
};

template <class T>
std::function<void(Scenario&, const std::vector<double>&, std::string_view)> set_scalar(T Scenario::*m) {
    return [m](Scenario& s, const std::vector<double>& v, std::string_view) {
        if constexpr (std::is_same_v<T, std::size_t>) {
            if (v[0] < 0.0 || v[0] != static_cast<double>(static_cast<std::size_t>(v[0]))) {
                throw std::invalid_argument("expected a non-negative integer");
            }
            s.*m = static_cast<std::size_t>(v[0]);
        } else {
            s.*m = v[0];
        }
    };
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        const auto scalar = [&](std::string_view key, Kind kind, auto member) {
            f.push_back({key, kind, false, set_scalar(member), [member, kind](const Scenario& s) {
                             std::string out = kind == Kind::count ? std::to_string(s.*member) : fmt(static_cast<double>(s.*member));
                             if (!si_unit(kind).empty()) out += " " + std::string(si_unit(kind));
                             return out;
                         }});
        };
        const auto list = [&](std::string_view key, Kind kind, std::vector<double> Scenario::*member) {
            f.push_back({key, kind, true,
                         [member](Scenario& s, const std::vector<double>& v, std::string_view) { s.*member = v; },
                         [member, kind](const Scenario& s) {
                             std::string out;
                             for (std::size_t i = 0; i < (s.*member).size(); ++i) {
                                 if (i) out += ", ";
                                 out += fmt((s.*member)[i]);
                             }
                             return out + " " + std::string(si_unit(kind));
                         }});
        };
        scalar("mass", Kind::mass, &Scenario::mass);
        scalar("v0", Kind::velocity, &Scenario::v0);
        scalar("length", Kind::length, &Scenario::length);
        scalar("phase", Kind::angle, &Scenario::phase);
        scalar("detuning", Kind::frequency, &Scenario::detuning);
        f.push_back({"rabi", Kind::frequency, false,
                     [](Scenario& s, const std::vector<double>& v, std::string_view) { s.rabi = v[0]; },
                     [](const Scenario& s) { return s.rabi ? fmt(*s.rabi) + " rad/s" : std::string(); }});
        f.push_back({"rabi_n", Kind::real, false,
                     [](Scenario& s, const std::vector<double>& v, std::string_view) { s.rabi_n = v[0]; },
                     [](const Scenario& s) { return s.rabi ? std::string() : fmt(s.rabi_n); }});
        scalar("sigma0", Kind::length, &Scenario::sigma0);
        scalar("x0", Kind::length, &Scenario::x0);
        scalar("k_nodes", Kind::count, &Scenario::k_nodes);
        scalar("span", Kind::real, &Scenario::span);
        scalar("t_end", Kind::time, &Scenario::t_end);
        scalar("time_steps", Kind::count, &Scenario::time_steps);
        scalar("trajectories", Kind::count, &Scenario::trajectories);
        scalar("trajectory_outputs", Kind::count, &Scenario::trajectory_outputs);
        scalar("rk_tol", Kind::real, &Scenario::rk_tol);
        list("snapshot_times", Kind::time, &Scenario::snapshot_times);
        scalar("snapshot_lo", Kind::length, &Scenario::snapshot_lo);
        scalar("snapshot_hi", Kind::length, &Scenario::snapshot_hi);
        scalar("snapshot_points", Kind::count, &Scenario::snapshot_points);
        list("sigma_sweep", Kind::length, &Scenario::sigma_sweep);
        list("delta_sweep", Kind::frequency, &Scenario::delta_sweep);
        scalar("bifurcation_t_end", Kind::time, &Scenario::bifurcation_t_end);
        scalar("bifurcation_points", Kind::count, &Scenario::bifurcation_points);
        scalar("oracle_time", Kind::time, &Scenario::oracle_time);
        scalar("oracle_cells", Kind::count, &Scenario::oracle_cells);
        scalar("oracle_lo", Kind::length, &Scenario::oracle_lo);
        scalar("oracle_hi", Kind::length, &Scenario::oracle_hi);
        f.push_back({"output_dir", Kind::text, false, nullptr,
                     [](const Scenario& s) { return s.output_dir; }});
        return f;
    }();
    return table;
}

}  // namespace

Scenario::Scenario() {
    for (int i = 0; i <= 10; ++i) delta_sweep.push_back(2.0 * pi * 1e3 * 10.0 * i);
}

double Scenario::rabi_frequency() const {
    if (rabi) return *rabi;
    return (rabi_n + 0.5) * pi * v0 / length;
}

FieldSetup Scenario::field() const {
    return FieldSetup{mass, detuning, rabi_frequency(), phase, length};
}

PacketSpec Scenario::packet() const { return PacketSpec::from_velocity(mass, v0, sigma0, x0); }

PacketOptions Scenario::packet_options() const { return PacketOptions{k_nodes, span}; }

Scenario parse_config(std::string_view text) {
    Scenario s;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key = value");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError(line_no, "missing value for " + std::string(key));

        const Field* field = nullptr;
        for (const Field& f : fields()) {
            if (f.key == key) field = &f;
        }
        if (!field) throw ConfigError(line_no, "unknown key '" + std::string(key) + "'");
        if (!seen.insert(std::string(key)).second) {
            throw ConfigError(line_no, "duplicate key '" + std::string(key) + "'");
        }
        if ((key == "rabi" && seen.count("rabi_n")) || (key == "rabi_n" && seen.count("rabi"))) {
            throw ConfigError(line_no, "give either rabi or rabi_n, not both");
        }

        if (field->kind == Kind::text) {
            s.output_dir = std::string(value);
            continue;
        }
        std::vector<double> values;
        if (field->list) {
            values = parse_list(field->kind, value, line_no, key);
        } else {
            const Parsed p = split_number(value, line_no);
            values.push_back(apply_unit(field->kind, p, p.unit, line_no, key));
        }
        try {
            field->set(s, values, key);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(line_no, std::string(key) + ": " + e.what());
        }
    }
    return s;
}

std::string canonical_form(const Scenario& s) {
    std::string out;
    for (const Field& f : fields()) {
        const std::string v = f.show(s);
        if (v.empty()) continue;
        out += std::string(f.key) + " = " + v + "\n";
    }
    return out;
}

}  // namespace atomflux::cli
