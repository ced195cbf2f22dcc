#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "atomflux/errors.hpp"
#include "commands.hpp"
#include "scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw atomflux::cli::ConfigError(0, "cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace atomflux::cli;
    std::setvbuf(stdout, nullptr, _IOLBF, 0);

    CLI::App app{"Two-level atom scattering off a field region: amplitudes, densities, trajectories and times"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    std::string config_path;
    std::string out_dir;
    bool svg = false;
    bool echo = false;
    app.add_option("--config", config_path, "scenario file (key = value lines)")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides ATOMFLUX_OUT_DIR and output_dir)");
    app.add_flag("--svg", svg, "also write SVG line plots");
    app.add_flag("--echo-config", echo, "print the canonical scenario before running");
    for (const Command& c : commands()) app.add_subcommand(std::string(c.name), std::string(c.summary));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    Scenario scenario;
    try {
        if (!config_path.empty()) scenario = parse_config(read_file(config_path));
        scenario.field().validate();
        scenario.packet().validate();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const atomflux::InvalidArgument& e) {
        std::fprintf(stderr, "invalid scenario: %s\n", e.what());
        return 1;
    }

    RunOptions options;
    options.svg = svg;
    if (!out_dir.empty()) {
        options.out_dir = out_dir;
    } else if (const char* env = std::getenv("ATOMFLUX_OUT_DIR"); env && *env) {
        options.out_dir = env;
    } else {
        options.out_dir = scenario.output_dir;
    }

    if (echo) std::fputs(canonical_form(scenario).c_str(), stdout);

    const Command* command = find_command(app.get_subcommands().front()->get_name());
    try {
        std::filesystem::create_directories(options.out_dir);
        command->run(scenario, options);
    } catch (const atomflux::InvariantViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return 2;
    } catch (const atomflux::InvalidArgument& e) {
        std::fprintf(stderr, "invalid scenario: %s\n", e.what());
        return 1;
    } catch (const atomflux::Error& e) {
        std::fprintf(stderr, "computation failed: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
