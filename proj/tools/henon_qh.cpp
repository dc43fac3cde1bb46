// henon-qh: configuration-driven front end.
//
//   henon-qh <subcommand> --config run.json [--out DIR] [--jobs N] [--seed U64]
//
// Exit codes: 0 ok, 2 configuration error, 3 I/O error.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "output.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

int jobs_from_env()
{
    const char* v = std::getenv("HENON_QH_JOBS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) {
        std::cerr << "henon-qh: ignoring HENON_QH_JOBS=" << v << " (expected a positive integer)\n";
        return 0;
    }
    return static_cast<int>(n);
}

} // namespace

int main(int argc, char** argv)
{
    using namespace henon::cli;

    CLI::App app{"Numerical diagnostics for complex Henon maps"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    std::uint64_t seed = 0;

    std::string names;
    for (const auto& n : command_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("subcommand", command, "one of: " + names)->required()->check(CLI::IsMember(command_names()));
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads (fallback: HENON_QH_JOBS, then the config)")
                         ->check(CLI::Range(1, 4096));
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized perturbation directions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    Context ctx;
    try {
        ctx.cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "henon-qh: " << config_path << ": " << e.what() << "\n";
        return kExitConfig;
    }
    ctx.out = out_dir.empty() ? ctx.cfg.output : std::filesystem::path(out_dir);
    ctx.seed = *seed_opt ? seed : ctx.cfg.seed;
    if (*jobs_opt) ctx.jobs = jobs;
    else if (const int env = jobs_from_env()) ctx.jobs = env;
    else ctx.jobs = ctx.cfg.jobs;

    try {
        run_command(command, ctx);
    } catch (const IoError& e) {
        std::cerr << "henon-qh: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "henon-qh: " << command << " failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
