#include <cmath>
#include <doctest.h>

#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/norms.hpp"
#include "core/stepper.hpp"

using namespace nlch;

namespace {

struct Setup {
    Grid grid;
    CouplingMatrix coupling;
    Potential potential;

    Setup(int n, double amplitude, double T_abs = 1.0, double T_crit = 2.0)
        : grid(1, {1.0, 1.0}, {n, 1}),
          coupling(assemble_coupling(grid, Kernel::homogeneous(1, 1.5, amplitude), 4)),
          potential(Potential::logarithmic(T_abs, T_crit)) {}

    Stepper stepper(double dt, double theta = 0.0,
                    Splitting splitting = Splitting::convex_split) const {
        SchemeConfig scheme;
        scheme.dt = dt;
        scheme.theta_reg = theta;
        scheme.splitting = splitting;
        scheme.newton.tol = 1e-11;
        scheme.newton.max_iter = 50;
        return Stepper(grid, coupling, potential, scheme);
    }
};

State noise_state(const Grid& grid, double mean, double amplitude, std::uint64_t seed) {
    CounterRng rng{seed};
    Vec c(grid.size());
    for (int i = 0; i < grid.size(); ++i) c[i] = rng.sym(static_cast<std::uint64_t>(i));
    c = Vec::Constant(grid.size(), mean) + amplitude * project_mean_zero(c);
    c.array() += mean - c.mean();
    return State::create(std::move(c));
}

} // namespace

TEST_CASE("constants are steady states with constant chemical potential") {
    Setup s(32, 0.05);
    Stepper stepper = s.stepper(1e-3);
    State state = State::create(Vec::Constant(32, 0.2));
    Vec before = state.c;
    StepReport rep = stepper.step(state);
    CHECK(rep.newton_iters == 0);
    CHECK((state.c - before).norm() <= 1e-14);
    CHECK(rep.mu.maxCoeff() - rep.mu.minCoeff() <= 1e-12 * (1.0 + std::abs(rep.mu[0])));
    // mu equals f'(m) for c == m
    CHECK(rep.mu[0] == doctest::Approx(s.potential.eval_f(0.2).df).epsilon(1e-12));
}

TEST_CASE("mass is conserved to round-off on every accepted step") {
    Setup s(64, 0.02);
    Stepper stepper = s.stepper(2e-4);
    State state = noise_state(s.grid, 0.1, 0.2, 3);
    const double m0 = state.c.mean();
    for (int k = 0; k < 25; ++k) {
        StepReport rep = stepper.step(state);
        CHECK(rep.mass_drift <= 1e-13);
        CHECK(std::abs(state.c.mean() - m0) <= 1e-13);
    }
}

TEST_CASE("convex splitting dissipates the energy over 200 steps") {
    Setup s(48, 0.02);
    Stepper stepper = s.stepper(5e-4);
    State state = noise_state(s.grid, 0.0, 0.35, 11);
    double prev = energy(s.grid, s.coupling, s.potential, 0.0, state.c).total;
    for (int k = 0; k < 200; ++k) {
        StepReport rep = stepper.step(state);
        CHECK(rep.energy_after <= prev + 1e-10 * (1.0 + std::abs(prev)));
        prev = rep.energy_after;
    }
}

TEST_CASE("infeasible state is rejected before stepping") {
    Setup s(16, 0.02);
    Stepper stepper = s.stepper(1e-4);
    Vec c = Vec::Constant(16, 0.0);
    c[3] = 1.0; // at the endpoint
    State state = State::create(std::move(c));
    CHECK_THROWS_AS(stepper.step(state), Error);
}

TEST_CASE("run: T = 0 keeps the initial state and has no dissipation") {
    Setup s(24, 0.02);
    Stepper stepper = s.stepper(1e-3);
    State initial = noise_state(s.grid, 0.0, 0.1, 7);
    Vec c0 = initial.c;
    RunOptions options;
    options.t_final = 0.0;
    TrajectoryRecord record = run(stepper, std::move(initial), options);
    CHECK(record.samples.size() == 1);
    CHECK(record.dissipation_total == 0.0);
    CHECK((record.final_state.c - c0).norm() == 0.0);
}

TEST_CASE("spinodal instability amplifies small perturbations") {
    Setup s(64, 0.01); // weak kernel -> long-wave modes unstable
    Stepper stepper = s.stepper(1e-3);
    State initial = noise_state(s.grid, 0.0, 0.01, 19);
    const double max0 = initial.c.cwiseAbs().maxCoeff();
    RunOptions options;
    options.t_final = 0.5;
    TrajectoryRecord record = run(stepper, std::move(initial), options);
    CHECK(record.final_state.c.cwiseAbs().maxCoeff() >= 5.0 * max0);
    CHECK(record.samples.back().energy < record.energy_initial);
}

TEST_CASE("stable regime: perturbations decay monotonically in H^-1") {
    Setup s(48, 0.05, 2.0, 1.0); // T_abs > T_crit
    Stepper stepper = s.stepper(1e-3);
    Norms norms(s.grid, 1.5);
    State state = noise_state(s.grid, 0.0, 0.05, 23);
    double prev = norms.hminus1_norm(project_mean_zero(state.c));
    for (int k = 0; k < 40; ++k) {
        stepper.step(state);
        double cur = norms.hminus1_norm(project_mean_zero(state.c));
        if (k >= 2) CHECK(cur <= prev * (1.0 + 1e-12));
        prev = cur;
    }
    // polish to the steady state with large stable steps until ||c+ - c|| is at
    // round-off; there mu is spatially constant and L c + f'(c) - mu mean-zero
    SchemeConfig tight;
    tight.dt = 0.05;
    tight.newton.tol = 1e-13;
    tight.newton.max_iter = 60;
    Stepper polish(s.grid, s.coupling, s.potential, tight);
    double step_change = 1.0;
    for (int k = 0; k < 500 && step_change > 1e-12; ++k) {
        Vec before = state.c;
        polish.step(state);
        step_change = (state.c - before).norm();
    }
    CHECK(step_change <= 1e-12);
    Vec mu = stepper.chemical_potential(state.c);
    CHECK(mu.maxCoeff() - mu.minCoeff() <= 1e-8);
    Vec residual = apply_nonlocal(s.grid, s.coupling, state.c);
    for (int i = 0; i < state.c.size(); ++i)
        residual[i] += s.potential.eval_f(state.c[i]).df - mu[i];
    CHECK(std::abs(residual.mean()) <= 1e-12);
}

TEST_CASE("energy identity residual is first order in dt") {
    Setup s(48, 0.01);
    // smooth initial data so the chosen dt resolves the transient
    Vec c0(s.grid.size());
    for (int i = 0; i < s.grid.size(); ++i) {
        double x = s.grid.center(i)[0];
        c0[i] = 0.15 * std::cos(2.0 * M_PI * x) + 0.05 * std::cos(4.0 * M_PI * x);
    }
    State base = State::create(std::move(c0));
    auto residual_at = [&](double dt) {
        Stepper stepper = s.stepper(dt);
        RunOptions options;
        options.t_final = 0.05;
        TrajectoryRecord record = run(stepper, State::create(Vec(base.c)), options);
        return energy_identity_residual(record);
    };
    double r1 = residual_at(2e-3);
    double r2 = residual_at(1e-3);
    CHECK(r1 / r2 >= 1.7);
}

TEST_CASE("step rejection: halving rescues, exhaustion aborts") {
    Setup s(24, 0.02);
    // hopeless Newton budget: every attempt fails
    SchemeConfig scheme;
    scheme.dt = 1e-3;
    scheme.newton.tol = 1e-14;
    scheme.newton.max_iter = 1;
    Stepper broken(s.grid, s.coupling, s.potential, scheme);
    State state = noise_state(s.grid, 0.0, 0.4, 31);
    RunOptions options;
    options.t_final = 2e-3;
    options.max_halvings = 3;
    CHECK_THROWS_AS(run(broken, State::create(Vec(state.c)), options), Error);

    // a realistic budget recovers by subdividing the step
    SchemeConfig tight = scheme;
    tight.newton.tol = 1e-11;
    tight.newton.max_iter = 4;
    Stepper recovering(s.grid, s.coupling, s.potential, tight);
    RunOptions options2;
    options2.t_final = 5e-3;
    TrajectoryRecord record = run(recovering, State::create(Vec(state.c)), options2);
    CHECK(record.total_steps == 5);
}

TEST_CASE("2D stepping: mass conserved, energy dissipated") {
    Grid grid(2, {1.0, 1.0}, {12, 12});
    CouplingMatrix cm = assemble_coupling(grid, Kernel::homogeneous(2, 1.5, 0.05), 4);
    Potential pot = Potential::logarithmic(1.0, 2.0);
    SchemeConfig scheme;
    scheme.dt = 5e-4;
    scheme.newton.tol = 1e-11;
    scheme.newton.max_iter = 50;
    Stepper stepper(grid, cm, pot, scheme);

    CounterRng rng{61};
    Vec c(grid.size());
    for (int i = 0; i < grid.size(); ++i) c[i] = 0.2 * rng.sym(static_cast<std::uint64_t>(i));
    c = project_mean_zero(c);
    State state = State::create(std::move(c));
    const double m0 = state.c.mean();
    double prev = energy(grid, cm, pot, 0.0, state.c).total;
    for (int k = 0; k < 20; ++k) {
        StepReport rep = stepper.step(state);
        CHECK(std::abs(state.c.mean() - m0) <= 1e-13);
        CHECK(rep.energy_after <= prev + 1e-10 * (1.0 + std::abs(prev)));
        prev = rep.energy_after;
    }
}

TEST_CASE("fully implicit splitting also conserves mass") {
    Setup s(32, 0.02);
    Stepper stepper = s.stepper(1e-4, 0.0, Splitting::fully_implicit);
    State state = noise_state(s.grid, 0.05, 0.15, 37);
    const double m0 = state.c.mean();
    for (int k = 0; k < 10; ++k) stepper.step(state);
    CHECK(std::abs(state.c.mean() - m0) <= 1e-13);
}

TEST_CASE("theta-regularized stepping dissipates the regularized energy") {
    Setup s(32, 0.02);
    const double theta = 0.25;
    Stepper stepper = s.stepper(5e-4, theta);
    State state = mollify_initial(s.grid, noise_state(s.grid, 0.0, 0.3, 41), theta);
    double prev = energy(s.grid, s.coupling, s.potential, theta, state.c).total;
    for (int k = 0; k < 50; ++k) {
        StepReport rep = stepper.step(state);
        CHECK(rep.energy_after <= prev + 1e-10 * (1.0 + std::abs(prev)));
        prev = rep.energy_after;
    }
}

TEST_CASE("mollification: identity at theta 0, exact mean, vanishing H^1 charge") {
    Grid grid(1, {1.0, 1.0}, {96, 1});
    State rough = noise_state(grid, 0.1, 0.5, 43);

    State same = mollify_initial(grid, rough, 0.0);
    CHECK((same.c - rough.c).norm() == 0.0);

    State smooth = mollify_initial(grid, rough, 0.3);
    CHECK(std::abs(smooth.c.mean() - rough.c.mean()) <= 1e-14);

    double prev = 1e300;
    for (double theta : {1.0, 0.25, 0.0625}) {
        State st = mollify_initial(grid, rough, theta);
        double charge = theta * (st.c.squaredNorm() * grid.cell_volume() +
                                 grad_sq_norm(grid, st.c));
        CHECK(charge < prev);
        prev = charge;
    }
}

TEST_CASE("continuous dependence: fitted growth rate is dt-stable") {
    Setup s(48, 0.01);
    Norms norms(s.grid, 1.5);
    State base = State::create(Vec::Constant(s.grid.size(), 0.0));
    State pert = noise_state(s.grid, 0.0, 1e-6, 47);

    auto fit_rate = [&](double dt) {
        Stepper stepper = s.stepper(dt);
        State a = State::create(Vec(base.c));
        State b = State::create(Vec(pert.c));
        const double d0 = norms.hminus1_norm(project_mean_zero(b.c - a.c));
        std::vector<double> ts, ys;
        const int steps = static_cast<int>(std::lround(0.1 / dt));
        for (int k = 1; k <= steps; ++k) {
            stepper.step(a);
            stepper.step(b);
            ts.push_back(k * dt);
            ys.push_back(std::log(norms.hminus1_norm(project_mean_zero(b.c - a.c)) / d0));
        }
        double st = 0.0, sty = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            st += ts[k] * ts[k];
            sty += ts[k] * ys[k];
        }
        const double rate = sty / st;
        for (std::size_t k = 0; k < ts.size(); ++k) CHECK(ys[k] <= rate * ts[k] + 0.1);
        return rate;
    };
    double k1 = fit_rate(1e-3);
    double k2 = fit_rate(5e-4);
    CHECK(std::abs(k1 - k2) <= 0.2 * std::max(std::abs(k1), std::abs(k2)));
}

TEST_CASE("theta -> 0 trajectories form a Cauchy sequence at T = 0.1") {
    Setup s(48, 0.02);
    Norms norms(s.grid, 1.5);
    State rough = noise_state(s.grid, 0.0, 0.3, 53);

    auto final_state = [&](double theta) {
        Stepper stepper = s.stepper(1e-3, theta);
        State initial = mollify_initial(s.grid, rough, theta);
        RunOptions options;
        options.t_final = 0.1;
        return run(stepper, std::move(initial), options).final_state;
    };
    State s1 = final_state(0.25), s2 = final_state(0.0625), s3 = final_state(0.015625);
    double d12 = norms.hminus1_norm(project_mean_zero(s1.c - s2.c));
    double d23 = norms.hminus1_norm(project_mean_zero(s2.c - s3.c));
    CHECK(d23 < d12);
}
