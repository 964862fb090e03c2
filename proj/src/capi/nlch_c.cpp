// nlch_c.cpp -- extern "C" surface over the C++ core: opaque handles, status
// codes, thread-local error JSON.
#include "nlch.h"

#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "core/boundary.hpp"
#include "core/config.hpp"
#include "core/coupling.hpp"
#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/runner.hpp"
#include "core/snapshot.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error = "{}";

void set_error(int code, const std::string& message) {
    g_last_error = json{{"code", code}, {"message", message}}.dump();
}

nlch_status to_status(const nlch::Error& e) {
    switch (e.kind()) {
    case nlch::ErrorKind::invalid: return NLCH_ERR_INVALID;
    case nlch::ErrorKind::numeric: return NLCH_ERR_NUMERIC;
    case nlch::ErrorKind::io: return NLCH_ERR_IO;
    }
    return NLCH_ERR_INVALID;
}

template <class F>
nlch_status guard(F&& fn) {
    try {
        fn();
        return NLCH_OK;
    } catch (const nlch::Error& e) {
        nlch_status s = to_status(e);
        set_error(s, e.what());
        return s;
    } catch (const std::exception& e) {
        set_error(NLCH_ERR_INVALID, e.what());
        return NLCH_ERR_INVALID;
    }
}

nlch_status require(bool ok, const char* what) {
    if (!ok) {
        set_error(NLCH_ERR_INVALID, what);
        return NLCH_ERR_INVALID;
    }
    return NLCH_OK;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

nlch::Point point_from(const double* p, int dim) {
    return dim == 2 ? nlch::Point(p[0], p[1]) : nlch::Point(p[0]);
}

} // namespace

struct nlch_kernel {
    nlch::Kernel k;
};
struct nlch_potential {
    nlch::Potential p;
};
struct nlch_grid {
    nlch::Grid g;
};
struct nlch_coupling {
    nlch::CouplingMatrix m;
};
struct nlch_state {
    nlch::State s;
};
struct nlch_stepper {
    nlch::Grid grid;
    nlch::CouplingMatrix coupling;
    nlch::Potential potential;
    nlch::Stepper stepper;
    nlch_stepper(const nlch::Grid& g, const nlch::CouplingMatrix& c, const nlch::Potential& p,
                 nlch::SchemeConfig scheme)
        : grid(g), coupling(c), potential(p), stepper(grid, coupling, potential, scheme) {}
};
struct nlch_config {
    nlch::ScenarioConfig c;
};

extern "C" {

const char* nlch_last_error(void) { return g_last_error.c_str(); }

void nlch_string_free(char* s) { delete[] s; }

/* ---- kernels ---------------------------------------------------------- */

nlch_status nlch_kernel_create_homogeneous(int dim, double alpha, double amplitude,
                                           nlch_kernel** out) {
    if (nlch_status s = require(out != nullptr, "out must not be null")) return s;
    return guard([&] { *out = new nlch_kernel{nlch::Kernel::homogeneous(dim, alpha, amplitude)}; });
}

nlch_status nlch_kernel_create_modulated(int dim, double alpha, double amplitude,
                                         const char* modulation, double c0, double C0,
                                         nlch_kernel** out) {
    if (nlch_status s = require(out && modulation, "out/modulation must not be null")) return s;
    return guard([&] {
        *out = new nlch_kernel{nlch::Kernel::modulated(
            dim, alpha, amplitude, nlch::Expression::parse(modulation), c0, C0)};
    });
}

nlch_status nlch_kernel_eval(const nlch_kernel* kernel, const double* x, const double* y,
                             double* out) {
    if (nlch_status s = require(kernel && x && y && out, "null argument")) return s;
    return guard([&] {
        *out = kernel->k.eval(point_from(x, kernel->k.dim()), point_from(y, kernel->k.dim()));
    });
}

nlch_status nlch_kernel_symmetrize(nlch_kernel* kernel) {
    if (nlch_status s = require(kernel != nullptr, "null kernel")) return s;
    return guard([&] { kernel->k = kernel->k.symmetrized(); });
}

nlch_status nlch_kernel_verify_bounds(const nlch_kernel* kernel, const nlch_grid* grid,
                                      int sample_count, uint64_t seed, int* violations,
                                      double* worst_ratio) {
    if (nlch_status s = require(kernel && grid, "null argument")) return s;
    return guard([&] {
        nlch::BoundReport report = nlch::verify_bounds(kernel->k, grid->g, sample_count, seed);
        if (violations) *violations = static_cast<int>(report.violations.size());
        if (worst_ratio) *worst_ratio = report.worst_ratio;
    });
}

void nlch_kernel_destroy(nlch_kernel* kernel) { delete kernel; }

/* ---- potentials ------------------------------------------------------- */

nlch_status nlch_potential_create_logarithmic(double T_abs, double T_crit,
                                              nlch_potential** out) {
    if (nlch_status s = require(out != nullptr, "out must not be null")) return s;
    return guard(
        [&] { *out = new nlch_potential{nlch::Potential::logarithmic(T_abs, T_crit)}; });
}

nlch_status nlch_potential_create_polynomial(const double* coeffs, int count, double a,
                                             double b, nlch_potential** out) {
    if (nlch_status s = require(out && coeffs && count > 0, "need coefficients")) return s;
    return guard([&] {
        *out = new nlch_potential{
            nlch::Potential::polynomial(std::vector<double>(coeffs, coeffs + count), a, b)};
    });
}

nlch_status nlch_potential_eval_f(const nlch_potential* p, double s, double* f, double* df,
                                  double* ddf) {
    if (nlch_status st = require(p != nullptr, "null potential")) return st;
    return guard([&] {
        nlch::PotentialValues v = p->p.eval_f(s);
        if (f) *f = v.f;
        if (df) *df = v.df;
        if (ddf) *ddf = v.ddf;
    });
}

nlch_status nlch_potential_eval_phi(const nlch_potential* p, double s, double* phi,
                                    double* dphi, double* ddphi) {
    if (nlch_status st = require(p != nullptr, "null potential")) return st;
    return guard([&] {
        nlch::PotentialValues v = p->p.eval_phi(s);
        if (phi) *phi = v.f;
        if (dphi) *dphi = v.df;
        if (ddphi) *ddphi = v.ddf;
    });
}

nlch_status nlch_potential_split_constant(const nlch_potential* p, double* d) {
    if (nlch_status st = require(p && d, "null argument")) return st;
    *d = p->p.split_constant();
    return NLCH_OK;
}

void nlch_potential_destroy(nlch_potential* p) { delete p; }

/* ---- grids, coupling matrices, states ---------------------------------- */

nlch_status nlch_grid_create(int dim, const double* extent, const int* cells,
                             nlch_grid** out) {
    if (nlch_status s = require(out && extent && cells, "null argument")) return s;
    return guard([&] {
        std::array<double, 2> e{extent[0], dim == 2 ? extent[1] : 1.0};
        std::array<int, 2> c{cells[0], dim == 2 ? cells[1] : 1};
        *out = new nlch_grid{nlch::Grid(dim, e, c)};
    });
}

nlch_status nlch_grid_size(const nlch_grid* grid, int* out) {
    if (nlch_status s = require(grid && out, "null argument")) return s;
    *out = grid->g.size();
    return NLCH_OK;
}

void nlch_grid_destroy(nlch_grid* grid) { delete grid; }

nlch_status nlch_coupling_assemble(const nlch_grid* grid, const nlch_kernel* kernel,
                                   int refinement, nlch_coupling** out) {
    if (nlch_status s = require(grid && kernel && out, "null argument")) return s;
    return guard(
        [&] { *out = new nlch_coupling{nlch::assemble_coupling(grid->g, kernel->k, refinement)}; });
}

nlch_status nlch_coupling_bilinear(const nlch_grid* grid, const nlch_coupling* coupling,
                                   const double* u, const double* v, double* out) {
    if (nlch_status s = require(grid && coupling && u && v && out, "null argument")) return s;
    return guard([&] {
        Eigen::Map<const nlch::Vec> mu(u, grid->g.size()), mv(v, grid->g.size());
        *out = nlch::bilinear(grid->g, coupling->m, mu, mv);
    });
}

nlch_status nlch_coupling_apply(const nlch_grid* grid, const nlch_coupling* coupling,
                                const double* u, double* out) {
    if (nlch_status s = require(grid && coupling && u && out, "null argument")) return s;
    return guard([&] {
        Eigen::Map<const nlch::Vec> mu(u, grid->g.size());
        nlch::Vec w = nlch::apply_nonlocal(grid->g, coupling->m, mu);
        std::memcpy(out, w.data(), sizeof(double) * static_cast<std::size_t>(w.size()));
    });
}

nlch_status nlch_coupling_export(const nlch_coupling* coupling, const char* path) {
    if (nlch_status s = require(coupling && path, "null argument")) return s;
    return guard([&] { nlch::write_matrix(path, coupling->m.K); });
}

void nlch_coupling_destroy(nlch_coupling* coupling) { delete coupling; }

nlch_status nlch_state_create(const nlch_grid* grid, const double* values, double time,
                              nlch_state** out) {
    if (nlch_status s = require(grid && values && out, "null argument")) return s;
    return guard([&] {
        nlch::Vec c = Eigen::Map<const nlch::Vec>(values, grid->g.size());
        *out = new nlch_state{nlch::State::create(std::move(c), time)};
    });
}

nlch_status nlch_state_values(const nlch_state* state, double* out) {
    if (nlch_status s = require(state && out, "null argument")) return s;
    std::memcpy(out, state->s.c.data(), sizeof(double) * static_cast<std::size_t>(state->s.c.size()));
    return NLCH_OK;
}

nlch_status nlch_state_time(const nlch_state* state, double* out) {
    if (nlch_status s = require(state && out, "null argument")) return s;
    *out = state->s.time;
    return NLCH_OK;
}

nlch_status nlch_state_mean(const nlch_state* state, double* out) {
    if (nlch_status s = require(state && out, "null argument")) return s;
    *out = state->s.c.mean();
    return NLCH_OK;
}

void nlch_state_destroy(nlch_state* state) { delete state; }

/* ---- time stepping ----------------------------------------------------- */

nlch_status nlch_stepper_create(const nlch_grid* grid, const nlch_coupling* coupling,
                                const nlch_potential* potential,
                                const nlch_scheme_params* params, nlch_stepper** out) {
    if (nlch_status s = require(grid && coupling && potential && params && out, "null argument"))
        return s;
    return guard([&] {
        nlch::SchemeConfig scheme;
        scheme.dt = params->dt;
        scheme.theta_reg = params->theta_reg;
        scheme.splitting = params->fully_implicit ? nlch::Splitting::fully_implicit
                                                  : nlch::Splitting::convex_split;
        if (params->newton_tol > 0) scheme.newton.tol = params->newton_tol;
        if (params->newton_max_iter > 0) scheme.newton.max_iter = params->newton_max_iter;
        if (params->backtrack_factor > 0) scheme.newton.backtrack_factor = params->backtrack_factor;
        if (params->feasibility_margin > 0)
            scheme.newton.feasibility_margin = params->feasibility_margin;
        *out = new nlch_stepper(grid->g, coupling->m, potential->p, scheme);
    });
}

nlch_status nlch_stepper_step(nlch_stepper* stepper, nlch_state* state,
                              nlch_step_report* report) {
    if (nlch_status s = require(stepper && state, "null argument")) return s;
    return guard([&] {
        nlch::StepReport rep = stepper->stepper.step(state->s);
        if (report) {
            report->newton_iters = rep.newton_iters;
            report->final_residual = rep.final_residual;
            report->energy_before = rep.energy_before;
            report->energy_after = rep.energy_after;
            report->mass_drift = rep.mass_drift;
            report->grad_mu_sq = rep.grad_mu_sq;
            report->dt_used = rep.dt_used;
        }
    });
}

nlch_status nlch_stepper_energy(const nlch_stepper* stepper, const nlch_state* state,
                                double* out) {
    if (nlch_status s = require(stepper && state && out, "null argument")) return s;
    return guard([&] {
        *out = nlch::energy(stepper->grid, stepper->coupling, stepper->potential,
                            stepper->stepper.scheme().theta_reg, state->s.c)
                   .total;
    });
}

void nlch_stepper_destroy(nlch_stepper* stepper) { delete stepper; }

/* ---- scenario entry points ---------------------------------------------- */

nlch_status nlch_config_load(const char* path, nlch_config** out) {
    if (nlch_status s = require(path && out, "null argument")) return s;
    return guard([&] { *out = new nlch_config{nlch::load_config(path)}; });
}

nlch_status nlch_config_override(nlch_config* config, const char* key, const char* value) {
    if (nlch_status s = require(config && key && value, "null argument")) return s;
    return guard([&] { nlch::apply_override(config->c, key, value); });
}

void nlch_config_destroy(nlch_config* config) { delete config; }

nlch_status nlch_run_simulate(const nlch_config* config, int64_t seed, const char* out_dir,
                              char** summary) {
    if (nlch_status s = require(config != nullptr, "null config")) return s;
    return guard([&] {
        nlch::SimulateOptions options;
        if (seed >= 0) options.seed = static_cast<std::uint64_t>(seed);
        if (out_dir) options.out_dir = out_dir;
        json j = nlch::run_simulate(config->c, options);
        if (summary) *summary = dup_string(j.dump());
    });
}

nlch_status nlch_run_elliptic(const nlch_config* config, const char* g_snapshot,
                              const char* g_expression, double theta, const char* out_dir,
                              char** report) {
    if (nlch_status s = require(config != nullptr, "null config")) return s;
    return guard([&] {
        nlch::EllipticOptions options;
        if (g_snapshot) options.g_snapshot = g_snapshot;
        if (g_expression) options.g_expression = g_expression;
        if (theta >= 0) options.theta_reg = theta;
        if (out_dir) options.out_dir = out_dir;
        json j = nlch::run_elliptic(config->c, options);
        if (report) *report = dup_string(j.dump());
    });
}

nlch_status nlch_run_boundary(int dim, const char* family, double alpha, double amplitude,
                              const char* modulation, const char* x0, const char* ladder,
                              int r_is_set, double r, char** report) {
    return guard([&] {
        nlch::BoundaryOptions options;
        options.dim = dim;
        if (family) options.family = family;
        options.alpha = alpha;
        options.amplitude = amplitude;
        if (modulation) options.modulation = modulation;
        if (x0) options.x0 = x0;
        if (ladder) {
            std::string spec(ladder);
            auto p1 = spec.find(':'), p2 = spec.rfind(':');
            if (p1 == std::string::npos || p2 == p1)
                nlch::fail_invalid("ladder must be 'max:min:count'");
            options.ladder_max = std::strtod(spec.substr(0, p1).c_str(), nullptr);
            options.ladder_min = std::strtod(spec.substr(p1 + 1, p2 - p1 - 1).c_str(), nullptr);
            options.ladder_count = std::atoi(spec.substr(p2 + 1).c_str());
        }
        if (r_is_set) options.r = r;
        json j = nlch::run_boundary(options);
        if (report) *report = dup_string(j.dump());
    });
}

nlch_status nlch_run_verify(const char* trajectory_dir, char** report) {
    if (nlch_status s = require(trajectory_dir != nullptr, "null directory")) return s;
    return guard([&] {
        json j = nlch::run_verify(trajectory_dir);
        if (report) {
            std::string lines;
            for (const auto& l : j) lines += l.dump() + "\n";
            *report = dup_string(lines);
        }
    });
}

nlch_status nlch_run_check_kernel(const nlch_config* config, int samples, uint64_t seed,
                                  char** report) {
    if (nlch_status s = require(config != nullptr, "null config")) return s;
    return guard([&] {
        json j = nlch::run_check_kernel(config->c, samples, seed);
        if (report) *report = dup_string(j.dump());
    });
}

} // extern "C"
