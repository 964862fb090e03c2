// config.hpp -- scenario configuration: sectioned key/value files, validated
// exhaustively (every violation reported, line-numbered), plus builders that
// turn a config into live objects.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "kernel.hpp"
#include "potential.hpp"
#include "stepper.hpp"

namespace nlch {

struct ConfigDiagnostic {
    int line = 0; // 0 when the location is not tied to a source line
    std::string message;
};

struct ScenarioConfig {
    struct Domain {
        int dim = 1;
        std::array<double, 2> extent{1.0, 1.0};
        std::array<int, 2> cells{128, 128};
        int max_cells = Grid::default_max_cells;
    } domain;

    struct KernelSection {
        std::string family = "homogeneous";
        double alpha = 1.5;
        double amplitude = 1.0;
        std::string modulation;
    } kernel;

    struct PotentialSection {
        std::string family = "logarithmic";
        double T_abs = 1.0;
        double T_crit = 2.0;
        std::vector<double> coeffs;
        double a = -1.0;
        double b = 1.0;
        std::optional<double> d_override;
    } potential;

    struct Scheme {
        double dt = 1e-4;
        double theta_reg = 0.0;
        std::string splitting = "convex_split";
        double newton_tol = 1e-10;
        int newton_max_iter = 30;
        double backtrack_factor = 0.5;
        double feasibility_margin = -1.0; // < 0: default 1e-9 (b-a)
    } scheme;

    struct Initial {
        std::string family = "constant_noise";
        double mean = 0.0;
        double amplitude = 0.01;
        std::uint64_t seed = 0;
        std::string expression;
        std::string snapshot;
    } initial;

    struct Output {
        std::string directory = "out";
        int snapshot_stride = 0;
        int diagnostic_stride = 1;
    } output;

    struct Run {
        double t_final = 0.0;
        long steps = -1;
        int max_halvings = 20;
    } run;

    struct Operator {
        int refinement = 4;
        int max_coupling_cells = default_max_coupling_cells;
    } op;
};

// Parses and validates; diagnostics receives every problem found (parse and
// semantic). The returned config is only usable when diagnostics is empty.
ScenarioConfig parse_config(const std::string& text, std::vector<ConfigDiagnostic>& diagnostics);

// File variant; throws Error(invalid) carrying all diagnostics joined by
// newlines when anything is wrong.
ScenarioConfig load_config(const std::string& path);

// Applies "section.key = value" (CLI flags override config keys); throws on
// unknown keys or bad values.
void apply_override(ScenarioConfig& config, const std::string& dotted_key,
                    const std::string& value);

// Semantic validation only (used after overrides).
std::vector<ConfigDiagnostic> validate_config(const ScenarioConfig& config);

Grid make_grid(const ScenarioConfig& config);
Kernel make_kernel(const ScenarioConfig& config);
Potential make_potential(const ScenarioConfig& config);
SchemeConfig make_scheme(const ScenarioConfig& config);

// Builds initial data: noise and expression families are recentered to the
// configured mean; snapshot files are used as stored.
State make_initial_state(const ScenarioConfig& config, const Grid& grid,
                         const Potential& potential,
                         std::optional<std::uint64_t> seed_override = std::nullopt);

} // namespace nlch
