// nlch_main.cpp -- command line simulator over the C library interface.
//
// Subcommands: simulate, elliptic, boundary, verify, check-kernel.
// Exit codes: 0 success, 1 validation/io failure, 2 numerical failure,
// 64 usage errors. Failures print machine-readable JSON to stderr.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlch.h"

namespace {

int report_failure(nlch_status status) {
    std::fprintf(stderr, "%s\n", nlch_last_error());
    return status == NLCH_ERR_NUMERIC ? 2 : 1;
}

struct ConfigHandle {
    nlch_config* config = nullptr;
    ~ConfigHandle() { nlch_config_destroy(config); }
};

int load_with_overrides(const std::string& path, const std::vector<std::string>& sets,
                        ConfigHandle& handle) {
    if (nlch_status s = nlch_config_load(path.c_str(), &handle.config)) return report_failure(s);
    for (const std::string& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "{\"code\":1,\"message\":\"--set expects key=value, got '%s'\"}\n",
                         kv.c_str());
            return 1;
        }
        if (nlch_status s = nlch_config_override(handle.config, kv.substr(0, eq).c_str(),
                                                 kv.substr(eq + 1).c_str()))
            return report_failure(s);
    }
    return 0;
}

void print_and_free(char* text) {
    if (!text) return;
    std::fputs(text, stdout);
    if (text[0] == '\0' || text[std::string(text).size() - 1] != '\n') std::fputc('\n', stdout);
    nlch_string_free(text);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal Cahn-Hilliard solver (singular kernel, logarithmic potential)"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a configured trajectory");
    std::string sim_config, sim_out;
    long long sim_seed = -1;
    std::vector<std::string> sim_sets;
    simulate->add_option("--config", sim_config, "scenario config file")->required();
    simulate->add_option("--seed", sim_seed, "override initial.seed");
    simulate->add_option("--out", sim_out, "override output.directory");
    simulate->add_option("--set", sim_sets, "override any config key (section.key=value)");

    // elliptic
    auto* elliptic = app.add_subcommand("elliptic", "solve the stationary nonlocal problem");
    std::string ell_config, ell_snapshot, ell_expr, ell_out;
    double ell_theta = -1.0;
    std::vector<std::string> ell_sets;
    elliptic->add_option("--config", ell_config, "scenario config file")->required();
    elliptic->add_option("--g-snapshot", ell_snapshot, "right-hand side from a snapshot file");
    elliptic->add_option("--g-expr", ell_expr, "right-hand side expression over x,y");
    elliptic->add_option("--theta", ell_theta, "regularization strength (default scheme.theta_reg)");
    elliptic->add_option("--out", ell_out, "output directory");
    elliptic->add_option("--set", ell_sets, "override any config key");

    // boundary
    auto* boundary = app.add_subcommand("boundary", "boundary direction / exponent probes");
    int b_dim = 2;
    std::string b_family = "homogeneous", b_modulation, b_x0 = "center-face",
                b_ladder = "0.25:0.0625:3";
    double b_alpha = 1.5, b_amplitude = 1.0, b_r = 0.0;
    bool b_has_r = false;
    boundary->add_option("--dim", b_dim, "dimension (1 or 2)");
    boundary->add_option("--alpha", b_alpha, "kernel order in (1,2)")->required();
    boundary->add_option("--family", b_family, "homogeneous | modulated")->required();
    boundary->add_option("--amplitude", b_amplitude, "kernel amplitude");
    boundary->add_option("--modulation", b_modulation, "modulation expression");
    boundary->add_option("--x0", b_x0, "'center-face' or 'cx,cy'");
    boundary->add_option("--ladder", b_ladder, "delta ladder max:min:count");
    auto* ropt = boundary->add_option("--r", b_r, "fit the half-ball integral exponent for this r");

    // verify
    auto* verify = app.add_subcommand("verify", "certificate report for a trajectory directory");
    std::string v_dir;
    verify->add_option("--trajectory", v_dir, "simulate output directory")->required();

    // check-kernel
    auto* check = app.add_subcommand("check-kernel", "audit kernel singularity bounds");
    std::string k_config;
    int k_samples = 2000;
    unsigned long long k_seed = 7;
    std::vector<std::string> k_sets;
    check->add_option("--config", k_config, "scenario config file")->required();
    check->add_option("--samples", k_samples, "sample count");
    check->add_option("--seed", k_seed, "rng seed");
    check->add_option("--set", k_sets, "override any config key");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }
    b_has_r = ropt->count() > 0;

    if (simulate->parsed()) {
        ConfigHandle handle;
        if (int rc = load_with_overrides(sim_config, sim_sets, handle)) return rc;
        char* summary = nullptr;
        nlch_status s = nlch_run_simulate(handle.config, sim_seed,
                                          sim_out.empty() ? nullptr : sim_out.c_str(), &summary);
        if (s != NLCH_OK) return report_failure(s);
        print_and_free(summary);
        return 0;
    }

    if (elliptic->parsed()) {
        ConfigHandle handle;
        if (int rc = load_with_overrides(ell_config, ell_sets, handle)) return rc;
        char* report = nullptr;
        nlch_status s = nlch_run_elliptic(handle.config,
                                          ell_snapshot.empty() ? nullptr : ell_snapshot.c_str(),
                                          ell_expr.empty() ? nullptr : ell_expr.c_str(), ell_theta,
                                          ell_out.empty() ? nullptr : ell_out.c_str(), &report);
        if (s != NLCH_OK) return report_failure(s);
        print_and_free(report);
        return 0;
    }

    if (boundary->parsed()) {
        char* report = nullptr;
        nlch_status s = nlch_run_boundary(b_dim, b_family.c_str(), b_alpha, b_amplitude,
                                          b_modulation.empty() ? nullptr : b_modulation.c_str(),
                                          b_x0.c_str(), b_ladder.c_str(), b_has_r ? 1 : 0, b_r,
                                          &report);
        if (s != NLCH_OK) return report_failure(s);
        print_and_free(report);
        return 0;
    }

    if (verify->parsed()) {
        char* report = nullptr;
        nlch_status s = nlch_run_verify(v_dir.c_str(), &report);
        if (s != NLCH_OK) return report_failure(s);
        print_and_free(report);
        return 0;
    }

    if (check->parsed()) {
        ConfigHandle handle;
        if (int rc = load_with_overrides(k_config, k_sets, handle)) return rc;
        char* report = nullptr;
        nlch_status s = nlch_run_check_kernel(handle.config, k_samples, k_seed, &report);
        if (s != NLCH_OK) return report_failure(s);
        print_and_free(report);
        return 0;
    }

    std::fputs(app.help().c_str(), stderr);
    return 64;
}
