#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace henon::cli {

struct Context {
    RunConfig cfg;
    std::filesystem::path out;
    int jobs = 1;
    std::uint64_t seed = 1;
};

const std::vector<std::string>& command_names();

// Runs one subcommand, writing its files under ctx.out. Throws IoError on output failures
// and std::invalid_argument for an unknown name; numerical diagnostics never throw.
void run_command(const std::string& name, const Context& ctx);

} // namespace henon::cli
