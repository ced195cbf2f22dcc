#pragma once

#include <cstdio>
#include <filesystem>
#include <span>
#include <string_view>

#include "scenario.hpp"

namespace atomflux::cli {

struct RunOptions {
    std::filesystem::path out_dir;
    bool svg = false;
    std::FILE* log = stdout;
};

using CommandFn = void (*)(const Scenario&, const RunOptions&);

struct Command {
    std::string_view name;
    std::string_view summary;
    CommandFn run;
};

/// Every subcommand. Each writes its tables into out_dir and throws InvariantViolation
/// when a documented check on its own output fails.
std::span<const Command> commands();

const Command* find_command(std::string_view name);

}  // namespace atomflux::cli
