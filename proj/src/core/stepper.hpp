// stepper.hpp -- energy-stable time integration of the H^-1 gradient flow
// c_t = Lap mu, mu = theta(-Lap_N)c + L c + f'(c), by convex splitting
// (monotone part implicit, concave part explicit) with an interior-point
// Newton solver for the logarithmic nonlinearity.
#pragma once

#include <functional>
#include <vector>

#include "coupling.hpp"
#include "neumann.hpp"
#include "potential.hpp"

namespace nlch {

enum class Splitting { convex_split, fully_implicit };

struct NewtonParams {
    double tol = 1e-10;
    int max_iter = 30;
    double backtrack_factor = 0.5;
    double feasibility_margin = -1.0; // < 0 resolves to 1e-9 * (b - a)
};

struct SchemeConfig {
    double dt = 0.0;
    double theta_reg = 0.0;
    Splitting splitting = Splitting::convex_split;
    NewtonParams newton;
};

struct State {
    Vec c;
    double mean = 0.0;
    double time = 0.0;

    static State create(Vec c, double time = 0.0) {
        State s;
        s.mean = c.mean();
        s.c = std::move(c);
        s.time = time;
        return s;
    }
};

struct StepReport {
    int newton_iters = 0;
    double final_residual = 0.0;
    double energy_before = 0.0;
    double energy_after = 0.0;
    Vec mu;                  // chemical potential of the accepted step
    double mass_drift = 0.0; // |mean(c+) - mean(c)| before recentering
    double grad_mu_sq = 0.0;
    double dt_used = 0.0;
    int halvings = 0; // filled by run() when a step had to be subdivided
};

class Stepper {
public:
    Stepper(const Grid& grid, const CouplingMatrix& coupling, const Potential& potential,
            SchemeConfig scheme);

    // Advances state by cfg.dt (or dt_override). Throws Error(numeric) when
    // Newton fails; the caller decides about halving. Not const: a stepper
    // owns Newton workspaces and advances one trajectory at a time.
    StepReport step(State& state, double dt_override = -1.0);

    // mu(c) = theta(-Lap_N)c + L c + f'(c), the instantaneous potential.
    Vec chemical_potential(const Vec& c) const;

    const Grid& grid() const { return grid_; }
    const CouplingMatrix& coupling() const { return coupling_; }
    const Potential& potential() const { return potential_; }
    const SchemeConfig& scheme() const { return scheme_; }
    double feasibility_margin() const { return margin_; }

private:
    const Grid& grid_;
    const CouplingMatrix& coupling_;
    const Potential& potential_;
    SchemeConfig scheme_;
    double margin_;
    Eigen::MatrixXd L_dense_; // dense nonlocal operator
    Eigen::MatrixXd B_, J_;   // Newton workspaces

    bool feasible(const Vec& v) const;
};

struct TrajectorySample {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double diss_cum = 0.0;
    double max_c = 0.0;
    double min_c = 0.0;
    int newton_iters = 0;
    double grad_mu_sq = 0.0;
    double kappa_dtc_hminus1 = 0.0; // kappa(t) ||dc/dt||_{H^-1} = kappa ||grad mu||
    double kappa_mu_h1 = 0.0;       // kappa(t) ||mu||_{H^1}
};

struct RunOptions {
    double t_final = 0.0;
    long steps = -1; // if >= 0, overrides t_final / dt
    int diagnostic_stride = 1;
    int snapshot_stride = 0; // 0 = no snapshots
    int max_halvings = 20;
    std::function<void(const State&, long step)> snapshot_sink;
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;
    State final_state;
    double energy_initial = 0.0;
    double dissipation_total = 0.0; // trapezoid of ||grad mu||^2
    long total_steps = 0;
    long total_halvings = 0;
};

// Marches the flow, emitting diagnostics every diagnostic_stride steps and the
// cumulative dissipation integral by the trapezoid rule on step samples.
// Rejected steps are retried at halved dt (recursively, up to max_halvings);
// exhaustion aborts the run with Error(numeric).
TrajectoryRecord run(Stepper& stepper, State initial, const RunOptions& options);

// Gaussian mollification with width eps(theta) = theta^{1/4} diam(Omega)/10
// (clamped to >= h); the mean is preserved exactly and theta = 0 is the
// identity.
State mollify_initial(const Grid& grid, const State& c0, double theta_reg);

} // namespace nlch
