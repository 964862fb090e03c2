/* nlch.h -- C interface to the nonlocal Cahn-Hilliard solver library.
 *
 * The library simulates the conserved H^-1 gradient flow of a nonlocal free
 * energy with a singular interaction kernel (a regional fractional Laplacian
 * of order alpha in (1,2)) and a logarithmic (or polynomial) Helmholtz
 * density, using an energy-stable convex-splitting integrator.
 *
 * All objects are opaque handles created/destroyed through this interface.
 * Every fallible call returns nlch_status; on failure nlch_last_error()
 * returns a JSON object {code, message} describing the problem for the
 * calling thread.
 */
#ifndef NLCH_H
#define NLCH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlch_status {
    NLCH_OK = 0,
    NLCH_ERR_INVALID = 1, /* bad arguments, domain violations, config problems */
    NLCH_ERR_NUMERIC = 2, /* solver non-convergence, step abort */
    NLCH_ERR_IO = 3       /* file format / filesystem problems */
} nlch_status;

/* Thread-local JSON description of the last failure: {"code":..,"message":..} */
const char* nlch_last_error(void);

typedef struct nlch_kernel nlch_kernel;
typedef struct nlch_potential nlch_potential;
typedef struct nlch_grid nlch_grid;
typedef struct nlch_coupling nlch_coupling;
typedef struct nlch_state nlch_state;
typedef struct nlch_stepper nlch_stepper;
typedef struct nlch_config nlch_config;

/* ---- kernels ---------------------------------------------------------- */

/* k(x,y,z) = amplitude |z|^(-dim-alpha); alpha must lie in (1,2). */
nlch_status nlch_kernel_create_homogeneous(int dim, double alpha, double amplitude,
                                           nlch_kernel** out);

/* k = amplitude * g(x,y) |z|^(-dim-alpha); g is an arithmetic expression over
 * x1,x2,y1,y2 (aliases x,y). c0/C0 declare the two-sided singularity bound. */
nlch_status nlch_kernel_create_modulated(int dim, double alpha, double amplitude,
                                         const char* modulation, double c0, double C0,
                                         nlch_kernel** out);

/* k(x,y,x-y); points are dim-long arrays. Fails on coincident points. */
nlch_status nlch_kernel_eval(const nlch_kernel* kernel, const double* x, const double* y,
                             double* out);

/* Replaces the kernel by (k(x,y,z)+k(y,x,-z))/2. */
nlch_status nlch_kernel_symmetrize(nlch_kernel* kernel);

/* Audits c0 |z|^(-n-a) <= k <= C0 |z|^(-n-a) on random pairs across dyadic
 * separation scales inside the grid's domain. */
nlch_status nlch_kernel_verify_bounds(const nlch_kernel* kernel, const nlch_grid* grid,
                                      int sample_count, uint64_t seed, int* violations,
                                      double* worst_ratio);

void nlch_kernel_destroy(nlch_kernel* kernel);

/* ---- potentials ------------------------------------------------------- */

nlch_status nlch_potential_create_logarithmic(double T_abs, double T_crit,
                                              nlch_potential** out);
nlch_status nlch_potential_create_polynomial(const double* coeffs, int count, double a,
                                             double b, nlch_potential** out);

/* f, f', f'' at s; infinities mark values outside the natural domain. Null
 * output pointers are allowed. */
nlch_status nlch_potential_eval_f(const nlch_potential* p, double s, double* f, double* df,
                                  double* ddf);
nlch_status nlch_potential_eval_phi(const nlch_potential* p, double s, double* phi,
                                    double* dphi, double* ddphi);

/* Smallest d >= 0 with f'' + d >= 0. */
nlch_status nlch_potential_split_constant(const nlch_potential* p, double* d);

void nlch_potential_destroy(nlch_potential* p);

/* ---- grids, coupling matrices, states --------------------------------- */

/* dim 1: extent/cells arrays of length 1; dim 2: length 2. */
nlch_status nlch_grid_create(int dim, const double* extent, const int* cells,
                             nlch_grid** out);
nlch_status nlch_grid_size(const nlch_grid* grid, int* out);
void nlch_grid_destroy(nlch_grid* grid);

/* Dense pairwise kernel weights; refinement is the near-pair subcell order. */
nlch_status nlch_coupling_assemble(const nlch_grid* grid, const nlch_kernel* kernel,
                                   int refinement, nlch_coupling** out);

/* E_h(u,v); u,v of grid size. */
nlch_status nlch_coupling_bilinear(const nlch_grid* grid, const nlch_coupling* coupling,
                                   const double* u, const double* v, double* out);

/* (L_h u)_i into out (grid size). */
nlch_status nlch_coupling_apply(const nlch_grid* grid, const nlch_coupling* coupling,
                                const double* u, double* out);

/* Binary export (magic NLCH, version, N, row-major float64). */
nlch_status nlch_coupling_export(const nlch_coupling* coupling, const char* path);

void nlch_coupling_destroy(nlch_coupling* coupling);

nlch_status nlch_state_create(const nlch_grid* grid, const double* values, double time,
                              nlch_state** out);
nlch_status nlch_state_values(const nlch_state* state, double* out);
nlch_status nlch_state_time(const nlch_state* state, double* out);
nlch_status nlch_state_mean(const nlch_state* state, double* out);
void nlch_state_destroy(nlch_state* state);

/* ---- time stepping ----------------------------------------------------- */

typedef struct nlch_scheme_params {
    double dt;
    double theta_reg;
    int fully_implicit;        /* 0: convex splitting (default) */
    double newton_tol;         /* <= 0: default 1e-10 */
    int newton_max_iter;       /* <= 0: default 30 */
    double backtrack_factor;   /* <= 0: default 0.5 */
    double feasibility_margin; /* <= 0: default 1e-9 (b-a) */
} nlch_scheme_params;

typedef struct nlch_step_report {
    int newton_iters;
    double final_residual;
    double energy_before;
    double energy_after;
    double mass_drift;
    double grad_mu_sq;
    double dt_used;
} nlch_step_report;

nlch_status nlch_stepper_create(const nlch_grid* grid, const nlch_coupling* coupling,
                                const nlch_potential* potential,
                                const nlch_scheme_params* params, nlch_stepper** out);

/* One accepted step advances the state in place; NLCH_ERR_NUMERIC signals a
 * Newton failure (the caller may retry at smaller dt). */
nlch_status nlch_stepper_step(nlch_stepper* stepper, nlch_state* state,
                              nlch_step_report* report);

/* E_theta(c) = 1/2 E_h(c,c) + (theta/2)||grad c||^2 + sum f(c_i) V. */
nlch_status nlch_stepper_energy(const nlch_stepper* stepper, const nlch_state* state,
                                double* out);

void nlch_stepper_destroy(nlch_stepper* stepper);

/* ---- scenario entry points (the CLI surface) --------------------------- */

nlch_status nlch_config_load(const char* path, nlch_config** out);

/* "section.key" override, the CLI flag mechanism. */
nlch_status nlch_config_override(nlch_config* config, const char* key, const char* value);

void nlch_config_destroy(nlch_config* config);

/* Runs the configured trajectory; writes diagnostics.csv, snapshots and
 * metadata.json. seed < 0 keeps the configured seed; out_dir NULL keeps the
 * configured directory. Returns a JSON summary through summary (optional;
 * free with nlch_string_free). */
nlch_status nlch_run_simulate(const nlch_config* config, int64_t seed, const char* out_dir,
                              char** summary);

/* Solves the stationary problem; g comes from a snapshot path or an
 * expression (exactly one non-NULL). theta < 0 keeps scheme.theta_reg. */
nlch_status nlch_run_elliptic(const nlch_config* config, const char* g_snapshot,
                              const char* g_expression, double theta, const char* out_dir,
                              char** report);

/* Boundary probes. When r_is_set is nonzero, fits the half-ball integral exponent
 * for that r; otherwise extrapolates the direction vector. x0 is
 * "center-face" or "cx,cy"; ladder is "max:min:count". */
nlch_status nlch_run_boundary(int dim, const char* family, double alpha, double amplitude,
                              const char* modulation, const char* x0, const char* ladder,
                              int r_is_set, double r, char** report);

/* Certificate JSON-lines for a simulate output directory. */
nlch_status nlch_run_verify(const char* trajectory_dir, char** report);

nlch_status nlch_run_check_kernel(const nlch_config* config, int samples, uint64_t seed,
                                  char** report);

void nlch_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* NLCH_H */
