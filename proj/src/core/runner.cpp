#include "runner.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "boundary.hpp"
#include "coupling.hpp"
#include "diagnostics.hpp"
#include "elliptic.hpp"
#include "errors.hpp"
#include "norms.hpp"
#include "snapshot.hpp"

namespace nlch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

json grid_json(const ScenarioConfig& c) {
    return {{"dimension", c.domain.dim},
            {"extent", {c.domain.extent[0], c.domain.extent[1]}},
            {"cells", {c.domain.cells[0], c.domain.cells[1]}}};
}

std::uint32_t potential_family_id(const Potential& p) {
    return p.family() == PotentialFamily::logarithmic ? 0u : 1u;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write '" + path + "'");
    out << text;
    if (!out) fail_io("short write on '" + path + "'");
}

} // namespace

json run_simulate(const ScenarioConfig& config_in, const SimulateOptions& options) {
    ScenarioConfig config = config_in;
    if (options.out_dir) config.output.directory = *options.out_dir;
    auto problems = validate_config(config);
    if (!problems.empty()) {
        std::string joined;
        for (const auto& d : problems) joined += (joined.empty() ? "" : "\n") + d.message;
        fail_invalid(joined);
    }

    Grid grid = make_grid(config);
    Kernel kernel = make_kernel(config);
    Potential potential = make_potential(config);
    SchemeConfig scheme = make_scheme(config);
    CouplingMatrix coupling =
        assemble_coupling(grid, kernel, config.op.refinement, config.op.max_coupling_cells);
    const std::uint64_t seed = options.seed ? *options.seed : config.initial.seed;
    State initial = make_initial_state(config, grid, potential, seed);
    if (scheme.theta_reg > 0.0) initial = mollify_initial(grid, initial, scheme.theta_reg);

    fs::create_directories(config.output.directory);
    const std::string dir = config.output.directory;

    Stepper stepper(grid, coupling, potential, scheme);
    RunOptions run_options;
    run_options.t_final = config.run.t_final;
    run_options.steps = config.run.steps;
    run_options.diagnostic_stride = config.output.diagnostic_stride;
    run_options.snapshot_stride = config.output.snapshot_stride;
    run_options.max_halvings = config.run.max_halvings;
    run_options.snapshot_sink = [&](const State& s, long step) {
        char name[48];
        std::snprintf(name, sizeof name, "state_%08ld.nlch", step);
        write_snapshot(dir + "/" + name,
                       snapshot_of(grid, s, kernel.alpha(), potential_family_id(potential)));
    };

    TrajectoryRecord record = run(stepper, std::move(initial), run_options);

    std::ostringstream csv;
    csv << "t,mass,energy,dissipation_cum,max_c,min_c,newton_iters\n";
    for (const auto& s : record.samples)
        csv << fmt(s.t) << "," << fmt(s.mass) << "," << fmt(s.energy) << "," << fmt(s.diss_cum)
            << "," << fmt(s.max_c) << "," << fmt(s.min_c) << "," << s.newton_iters << "\n";
    write_text(dir + "/diagnostics.csv", csv.str());

    json meta = {{"format", "nlch-run"},
                 {"seed", seed},
                 {"grid", grid_json(config)},
                 {"kernel",
                  {{"family", config.kernel.family},
                   {"alpha", config.kernel.alpha},
                   {"amplitude", config.kernel.amplitude},
                   {"modulation", config.kernel.modulation}}},
                 {"potential",
                  {{"family", config.potential.family},
                   {"a", potential.a()},
                   {"b", potential.b()},
                   {"T_abs", config.potential.T_abs},
                   {"T_crit", config.potential.T_crit},
                   {"d", potential.split_constant()}}},
                 {"scheme",
                  {{"dt", scheme.dt},
                   {"theta_reg", scheme.theta_reg},
                   {"splitting", config.scheme.splitting}}},
                 {"steps", record.total_steps},
                 {"halvings", record.total_halvings},
                 {"columns", {"t", "mass", "energy", "dissipation_cum", "max_c", "min_c",
                              "newton_iters"}}};
    write_text(dir + "/metadata.json", meta.dump(2) + "\n");

    json summary = {{"directory", dir},
                    {"steps", record.total_steps},
                    {"halvings", record.total_halvings},
                    {"t_final", record.final_state.time},
                    {"energy_initial", record.energy_initial},
                    {"energy_final", record.samples.back().energy},
                    {"dissipation", record.dissipation_total},
                    {"mass", record.final_state.c.mean()}};
    return summary;
}

json run_elliptic(const ScenarioConfig& config, const EllipticOptions& options) {
    auto problems = validate_config(config);
    if (!problems.empty()) {
        std::string joined;
        for (const auto& d : problems) joined += (joined.empty() ? "" : "\n") + d.message;
        fail_invalid(joined);
    }
    if (options.g_snapshot.empty() == options.g_expression.empty())
        fail_invalid("elliptic: provide exactly one of a g snapshot or a g expression");

    Grid grid = make_grid(config);
    Kernel kernel = make_kernel(config);
    Potential potential = make_potential(config);
    CouplingMatrix coupling =
        assemble_coupling(grid, kernel, config.op.refinement, config.op.max_coupling_cells);
    const double theta = options.theta_reg ? *options.theta_reg : config.scheme.theta_reg;

    Vec g;
    if (!options.g_snapshot.empty()) {
        SnapshotData snap = read_snapshot(options.g_snapshot);
        if (snap.payload.size() != grid.size())
            fail_invalid("elliptic: g snapshot size does not match the domain");
        g = std::move(snap.payload);
    } else {
        Expression expr = Expression::parse(options.g_expression);
        g.resize(grid.size());
        std::map<std::string, double> vars;
        for (int i = 0; i < grid.size(); ++i) {
            Point p = grid.center(i);
            vars = {{"x", p[0]}, {"y", p[1]}, {"x1", p[0]}, {"x2", p[1]}};
            g[i] = expr.eval(vars);
        }
    }
    g = project_mean_zero(g);

    EllipticResult result = solve_elliptic({grid, coupling, theta, g, 1e-10});
    Norms norms(grid, kernel.alpha(), config.op.refinement, config.op.max_coupling_cells);
    const double ratio = regularized_estimate_ratio(norms, theta, result.u, g);

    const std::string dir = options.out_dir ? *options.out_dir : config.output.directory;
    fs::create_directories(dir);
    State u_state = State::create(result.u);
    write_snapshot(dir + "/elliptic_u.nlch",
                   snapshot_of(grid, u_state, kernel.alpha(), potential_family_id(potential)));

    json lines = json::array();
    lines.push_back({{"check", "elliptic_residual"},
                     {"value", result.residual},
                     {"threshold", 1e-10},
                     {"pass", result.residual <= 1e-10}});
    lines.push_back({{"check", "regularized_estimate_ratio"},
                     {"value", ratio},
                     {"theta_reg", theta},
                     {"threshold", nullptr},
                     {"pass", true}});
    std::ostringstream report;
    for (const auto& line : lines) report << line.dump() << "\n";
    write_text(dir + "/elliptic_report.jsonl", report.str());
    return lines;
}

json run_boundary(const BoundaryOptions& options) {
    if (options.ladder_count < 2) fail_invalid("boundary: ladder needs at least 2 rungs");
    if (!(options.ladder_min > 0.0 && options.ladder_min < options.ladder_max))
        fail_invalid("boundary: ladder must satisfy 0 < min < max");

    std::vector<double> ladder;
    const double q = options.ladder_count == 1
                         ? 1.0
                         : std::pow(options.ladder_min / options.ladder_max,
                                    1.0 / (options.ladder_count - 1));
    for (int k = 0; k < options.ladder_count; ++k)
        ladder.push_back(options.ladder_max * std::pow(q, k));

    ProbeOptions probe_options;
    probe_options.resolution = options.resolution;
    probe_options.truncation = options.truncation;

    if (options.r) {
        ExponentFit fit = halfball_integral_exponent(options.dim, *options.r, ladder, probe_options);
        return {{"check", "halfball_integral_exponent"},
                {"dim", options.dim},
                {"r", *options.r},
                {"deltas", fit.deltas},
                {"integrals", fit.integrals},
                {"slope", fit.slope},
                {"predicted", fit.predicted},
                {"pass", std::abs(fit.slope - fit.predicted) <= 0.1}};
    }

    if (options.dim == 1) {
        // one-dimensional convention: the direction is identically 1
        return {{"check", "direction_vector"},
                {"dim", 1},
                {"direction", {1.0}},
                {"converged", true}};
    }

    Kernel kernel = [&] {
        if (options.family == "homogeneous")
            return Kernel::homogeneous(2, options.alpha, options.amplitude);
        if (options.family != "modulated")
            fail_invalid("boundary: family must be 'homogeneous' or 'modulated'");
        Expression g = Expression::parse(options.modulation);
        auto [lo, hi] = estimate_modulation_range(g, 2, {1.0, 1.0});
        if (!(lo > 0.0)) fail_invalid("boundary: modulation must be positive");
        return Kernel::modulated(2, options.alpha, options.amplitude, std::move(g),
                                 options.amplitude * lo, options.amplitude * hi);
    }();

    Point x0(0.5, 0.0);
    if (options.x0 != "center-face") {
        std::stringstream ss(options.x0);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            fail_invalid("boundary: --x0 must be 'center-face' or 'cx,cy'");
        x0 = Point(std::strtod(a.c_str(), nullptr), std::strtod(b.c_str(), nullptr));
    }

    DirectionProbe probe = direction_vector(kernel, x0, ladder, probe_options);
    json vectors = json::array();
    for (const auto& v : probe.vectors) vectors.push_back({v[0], v[1]});
    return {{"check", "direction_vector"},
            {"dim", 2},
            {"deltas", probe.deltas},
            {"vectors", vectors},
            {"extrapolated", {probe.extrapolated[0], probe.extrapolated[1]}},
            {"direction", {probe.direction[0], probe.direction[1]}},
            {"fitted_exponent", probe.fitted_exponent},
            {"last_variation", probe.last_variation},
            {"converged", probe.converged}};
}

json run_verify(const std::string& trajectory_dir, double identity_threshold) {
    const std::string meta_path = trajectory_dir + "/metadata.json";
    std::ifstream meta_in(meta_path);
    if (!meta_in) fail_io("cannot read '" + meta_path + "'");
    json meta = json::parse(meta_in, nullptr, true);

    const double a = meta["potential"]["a"].get<double>();
    const double b = meta["potential"]["b"].get<double>();
    const bool convex_split = meta["scheme"]["splitting"].get<std::string>() == "convex_split";

    std::ifstream csv(trajectory_dir + "/diagnostics.csv");
    if (!csv) fail_io("cannot read '" + trajectory_dir + "/diagnostics.csv'");
    std::string header;
    std::getline(csv, header);
    std::vector<double> t, mass, energy, diss;
    std::string line;
    while (std::getline(csv, line)) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string item;
        std::vector<double> row;
        while (std::getline(ss, item, ',')) row.push_back(std::strtod(item.c_str(), nullptr));
        if (row.size() < 7) fail_io("diagnostics.csv row with fewer than 7 columns");
        t.push_back(row[0]);
        mass.push_back(row[1]);
        energy.push_back(row[2]);
        diss.push_back(row[3]);
    }
    if (t.empty()) fail_io("diagnostics.csv has no samples");

    double mass_drift = 0.0;
    for (double m : mass) mass_drift = std::max(mass_drift, std::abs(m - mass.front()));

    double worst_increase = 0.0, energy_scale = 1.0;
    for (std::size_t k = 1; k < energy.size(); ++k) {
        double inc = energy[k] - energy[k - 1];
        if (inc > worst_increase) {
            worst_increase = inc;
            energy_scale = 1.0 + std::abs(energy[k - 1]);
        }
    }
    const double identity_residual =
        std::abs(energy.back() + diss.back() - energy.front()) / (1.0 + std::abs(energy.front()));

    json lines = json::array();
    lines.push_back({{"check", "mass_conservation"},
                     {"value", mass_drift},
                     {"threshold", 1e-12 * (b - a)},
                     {"pass", mass_drift <= 1e-12 * (b - a)}});
    lines.push_back({{"check", "energy_monotone"},
                     {"value", worst_increase},
                     {"threshold", 1e-10 * energy_scale},
                     {"pass", !convex_split || worst_increase <= 1e-10 * energy_scale},
                     {"applicable", convex_split}});
    lines.push_back({{"check", "energy_identity_residual"},
                     {"value", identity_residual},
                     {"threshold", identity_threshold},
                     {"pass", identity_residual <= identity_threshold}});

    std::ostringstream report;
    for (const auto& l : lines) report << l.dump() << "\n";
    write_text(trajectory_dir + "/certificate.jsonl", report.str());
    return lines;
}

json run_check_kernel(const ScenarioConfig& config, int samples, std::uint64_t seed) {
    auto problems = validate_config(config);
    if (!problems.empty()) {
        std::string joined;
        for (const auto& d : problems) joined += (joined.empty() ? "" : "\n") + d.message;
        fail_invalid(joined);
    }
    Grid grid = make_grid(config);
    Kernel kernel = make_kernel(config);
    BoundReport report = verify_bounds(kernel, grid, samples, seed);
    json violations = json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"x", {v.x[0], v.x[1]}},
                              {"y", {v.y[0], v.y[1]}},
                              {"separation", v.separation},
                              {"ratio", v.ratio}});
    return {{"check", "kernel_bounds"},
            {"family", config.kernel.family},
            {"alpha", kernel.alpha()},
            {"c0", kernel.c0()},
            {"C0", kernel.C0()},
            {"samples", report.samples},
            {"violations", violations},
            {"violation_count", report.violations.size()},
            {"ratio_min", report.ratio_min},
            {"ratio_max", report.ratio_max},
            {"worst_ratio", report.worst_ratio},
            {"pass", report.violations.empty()}};
}

} // namespace nlch
