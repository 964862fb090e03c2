// runner.hpp -- scenario orchestration shared by the C API and the CLI:
// simulate, elliptic, boundary, verify and check-kernel entry points working
// through config files and run directories.
#pragma once

#include <optional>
#include <string>

// vendored single-header json
#include <json.hpp>

#include "config.hpp"

namespace nlch {

struct SimulateOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

// Runs the configured trajectory; writes diagnostics.csv (t, mass, energy,
// dissipation_cum, max_c, min_c, newton_iters), periodic snapshot files and
// metadata.json into the output directory. Returns a run summary.
nlohmann::json run_simulate(const ScenarioConfig& config, const SimulateOptions& options = {});

struct EllipticOptions {
    std::optional<double> theta_reg;   // overrides scheme.theta_reg
    std::string g_snapshot;            // one of g_snapshot / g_expression
    std::string g_expression;
    std::optional<std::string> out_dir;
};

// Solves E(u,psi) = (g,psi) (optionally theta-regularized); writes the u
// snapshot plus a JSON-lines report of residuals and estimate ratios.
nlohmann::json run_elliptic(const ScenarioConfig& config, const EllipticOptions& options);

struct BoundaryOptions {
    int dim = 2;
    std::string family = "homogeneous";
    double alpha = 1.5;
    double amplitude = 1.0;
    std::string modulation;
    std::string x0 = "center-face"; // or "cx,cy"
    double ladder_max = 0.25;
    double ladder_min = 0.0625;
    int ladder_count = 3;
    std::optional<double> r; // when set: half-ball exponent check instead
    int resolution = 8;
    double truncation = 10.0;
};

nlohmann::json run_boundary(const BoundaryOptions& options);

// Reads metadata.json + diagnostics.csv from a simulate output directory and
// emits certificate lines {check, value, threshold, pass}; also written to
// certificate.jsonl inside the directory.
nlohmann::json run_verify(const std::string& trajectory_dir, double identity_threshold = 0.1);

nlohmann::json run_check_kernel(const ScenarioConfig& config, int samples, std::uint64_t seed);

} // namespace nlch
