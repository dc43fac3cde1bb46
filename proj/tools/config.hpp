#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "henon/henon_map.hpp"

namespace henon::cli {

// Invalid configuration; `line` is 0 when no position in the file applies.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line) : std::runtime_error(msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct Budgets {
    int n_max = 6;        // periods scanned by `saddles`
    int N_max = 3;        // periods in the saddle family
    int T = 40;           // series truncation
    int grid = 48;        // periodic-point seeding grid
    int samples = 24;     // recentered family size
    int green_iter = 400;
    int escape_max = 80;
    int seeds = 12;       // intersection Newton grid per axis
};

struct Tolerances {
    double series_tol = 1e-12;
    double norm_tol = 1e-6;
    double angle_tol = 1e-4;
    double tau_threshold = 1e-5;
    double residual_tol = 1e-10;
};

struct Radii {
    double r = 0.5;   // local disk radius
    double r0 = 1.0;  // largest admissible r
    std::vector<double> r_grid{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
    double ru = 4.0;  // intersection scan radii
    double rs = 4.0;
    double tau_radius = 1e-9;
};

struct GreenGrid {
    double box = 4.0; // real (x, y) grid over [-box, box]^2
    int n = 21;
};

struct TangencySetup {
    int k = 1;
    int n_max = 10;
    int member = 0;   // fixed point the jets are manufactured at
    double kick = 1.0;
};

struct RunConfig {
    nlohmann::json map_spec;
    HenonMap map = HenonMap::quadratic(0.5, -6.0);
    Budgets budgets;
    Tolerances tol;
    Radii radii;
    GreenGrid green;
    TangencySetup tangency;
    std::filesystem::path output = "out";
    std::uint64_t seed = 1;
    int jobs = 1;
};

// Parses and validates a config document. Unknown keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Line (1-based) of the key at the given object path, 0 if not found.
int locate_key(const std::string& text, const std::vector<std::string>& path);

} // namespace henon::cli
