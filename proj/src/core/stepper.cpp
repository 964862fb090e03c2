#include "stepper.hpp"

#include <cmath>
#include <string>

#include "diagnostics.hpp"
#include "errors.hpp"

namespace nlch {

namespace {

// out = (-Lap_N) in, writing a raw column; avoids temporaries in the Jacobian
// assembly loop.
void apply_neumann_raw(const Grid& grid, const double* in, double* out) {
    const int nx = grid.cells(0), ny = grid.cells(1);
    const double ix2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
    const double iy2 = grid.dim() == 2 ? 1.0 / (grid.spacing(1) * grid.spacing(1)) : 0.0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int i = iy * nx + ix;
            double acc = 0.0;
            if (ix > 0) acc += (in[i] - in[i - 1]) * ix2;
            if (ix < nx - 1) acc += (in[i] - in[i + 1]) * ix2;
            if (iy > 0) acc += (in[i] - in[i - nx]) * iy2;
            if (iy < ny - 1) acc += (in[i] - in[i + nx]) * iy2;
            out[i] = acc;
        }
}

} // namespace

Stepper::Stepper(const Grid& grid, const CouplingMatrix& coupling, const Potential& potential,
                 SchemeConfig scheme)
    : grid_(grid), coupling_(coupling), potential_(potential), scheme_(scheme) {
    if (scheme_.dt <= 0.0) fail_invalid("scheme dt must be positive");
    if (scheme_.theta_reg < 0.0) fail_invalid("scheme theta_reg must be >= 0");
    if (scheme_.newton.tol <= 0.0) fail_invalid("newton tol must be positive");
    if (scheme_.newton.max_iter < 1) fail_invalid("newton max_iter must be >= 1");
    if (!(scheme_.newton.backtrack_factor > 0.0 && scheme_.newton.backtrack_factor < 1.0))
        fail_invalid("newton backtrack_factor must lie in (0,1)");
    const double width = potential.b() - potential.a();
    margin_ = scheme_.newton.feasibility_margin;
    if (margin_ < 0.0) margin_ = 1e-9 * width;
    if (!(margin_ > 0.0 && margin_ < 0.25 * width))
        fail_invalid("feasibility_margin must lie in (0, (b-a)/4)");
    if (coupling.size() != grid.size()) fail_invalid("coupling/grid size mismatch");
    L_dense_ = nonlocal_dense(grid, coupling);
}

bool Stepper::feasible(const Vec& v) const {
    const double lo = potential_.a() + margin_, hi = potential_.b() - margin_;
    for (int i = 0; i < v.size(); ++i)
        if (!(v[i] > lo && v[i] < hi)) return false;
    return true;
}

Vec Stepper::chemical_potential(const Vec& c) const {
    Vec mu = L_dense_ * c;
    if (scheme_.theta_reg > 0.0) mu += scheme_.theta_reg * apply_neumann(grid_, c);
    for (int i = 0; i < c.size(); ++i) mu[i] += potential_.eval_f(c[i]).df;
    return mu;
}

StepReport Stepper::step(State& state, double dt_override) {
    const int n = grid_.size();
    if (state.c.size() != n) fail_invalid("step: state size mismatch");
    if (!feasible(state.c))
        fail_invalid("step: state has cells outside the feasible interval");

    const double dt = dt_override > 0.0 ? dt_override : scheme_.dt;
    const double d = potential_.split_constant();
    const double V = grid_.cell_volume();
    const bool split = scheme_.splitting == Splitting::convex_split;
    const Vec& c = state.c;

    StepReport report;
    report.dt_used = dt;
    report.energy_before =
        energy(grid_, coupling_, potential_, scheme_.theta_reg, c).total;

    // mu(v) = theta A v + L v + phi'(v) - d*(c or v); F(v) = v - c + dt A mu(v)
    auto mu_of = [&](const Vec& v) {
        Vec mu = L_dense_ * v;
        if (scheme_.theta_reg > 0.0) mu += scheme_.theta_reg * apply_neumann(grid_, v);
        for (int i = 0; i < n; ++i) mu[i] += potential_.eval_phi(v[i]).df;
        mu -= d * (split ? c : Vec(v));
        return mu;
    };

    const double ref = 1.0 + std::sqrt(c.squaredNorm() * V);
    Vec v = c;
    Vec mu = mu_of(v);
    Vec F = v - c + dt * apply_neumann(grid_, mu);
    double res = std::sqrt(F.squaredNorm() * V);

    int it = 0;
    for (; it < scheme_.newton.max_iter && res > scheme_.newton.tol * ref; ++it) {
        // B = theta A + L + diag(phi'' or f''); J = I + dt A B (columnwise).
        B_ = L_dense_;
        if (scheme_.theta_reg > 0.0) B_ += scheme_.theta_reg * neumann_dense(grid_);
        for (int i = 0; i < n; ++i) {
            double curv = potential_.eval_phi(v[i]).ddf;
            if (!split) curv -= d;
            B_(i, i) += curv;
        }
        J_.resize(n, n);
        for (int col = 0; col < n; ++col)
            apply_neumann_raw(grid_, B_.col(col).data(), J_.col(col).data());
        J_ *= dt;
        J_.diagonal().array() += 1.0;

        Eigen::PartialPivLU<Eigen::Ref<Eigen::MatrixXd>> lu(J_);
        Vec delta = lu.solve(-F);

        double lambda = 1.0;
        while (lambda > 1e-14 && !feasible(v + lambda * delta))
            lambda *= scheme_.newton.backtrack_factor;
        if (lambda <= 1e-14)
            fail_numeric("step: Newton backtracking found no feasible update");
        v += lambda * delta;

        mu = mu_of(v);
        F = v - c + dt * apply_neumann(grid_, mu);
        double res_new = std::sqrt(F.squaredNorm() * V);
        if (!std::isfinite(res_new)) fail_numeric("step: Newton residual is not finite");
        res = res_new;
    }
    if (res > scheme_.newton.tol * ref)
        fail_numeric("step: Newton did not converge in " +
                     std::to_string(scheme_.newton.max_iter) + " iterations (residual " +
                     std::to_string(res) + ")");

    report.newton_iters = it;
    report.final_residual = res;
    report.mass_drift = std::abs(v.mean() - c.mean());
    // The step conserves mass structurally; pin the round-off too.
    v.array() += state.mean - v.mean();

    report.mu = mu;
    report.grad_mu_sq = grad_sq_norm(grid_, mu);
    report.energy_after =
        energy(grid_, coupling_, potential_, scheme_.theta_reg, v).total;

    state.c = std::move(v);
    state.time += dt;
    return report;
}

namespace {

double kappa(double t) { return std::sqrt(t / (1.0 + t)); }

TrajectorySample make_sample(const Stepper& st, const State& state, double diss_cum,
                             int newton_iters, const Vec& mu, double grad_mu_sq) {
    TrajectorySample s;
    s.t = state.time;
    s.mass = state.c.mean();
    s.energy = energy(st.grid(), st.coupling(), st.potential(), st.scheme().theta_reg,
                      state.c).total;
    s.diss_cum = diss_cum;
    s.max_c = state.c.maxCoeff();
    s.min_c = state.c.minCoeff();
    s.newton_iters = newton_iters;
    s.grad_mu_sq = grad_mu_sq;
    const double k = kappa(state.time);
    s.kappa_dtc_hminus1 = k * std::sqrt(std::max(0.0, grad_mu_sq));
    s.kappa_mu_h1 = k * std::sqrt(mu.squaredNorm() * st.grid().cell_volume() +
                                  grad_sq_norm(st.grid(), mu));
    return s;
}

// Advances by dt, halving recursively on Newton failure. The dissipation
// trapezoid runs over the scheme's own step potentials; the very first
// interval has no predecessor sample and uses the backward rectangle (the raw
// mu(c0) of rough data would poison the integral with an unresolved spike).
void advance(Stepper& st, State& state, double dt, int halvings_left, double& diss_cum,
             double& prev_grad_mu_sq, int& iters, int& halvings, Vec& last_mu) {
    try {
        StepReport rep = st.step(state, dt);
        double prev = prev_grad_mu_sq < 0.0 ? rep.grad_mu_sq : prev_grad_mu_sq;
        diss_cum += 0.5 * (prev + rep.grad_mu_sq) * dt;
        prev_grad_mu_sq = rep.grad_mu_sq;
        iters += rep.newton_iters;
        last_mu = std::move(rep.mu);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::numeric || halvings_left <= 0)
            throw;
        ++halvings;
        advance(st, state, 0.5 * dt, halvings_left - 1, diss_cum, prev_grad_mu_sq, iters,
                halvings, last_mu);
        advance(st, state, 0.5 * dt, halvings_left - 1, diss_cum, prev_grad_mu_sq, iters,
                halvings, last_mu);
    }
}

} // namespace

TrajectoryRecord run(Stepper& stepper, State initial, const RunOptions& options) {
    const SchemeConfig& scheme = stepper.scheme();
    long steps = options.steps;
    if (steps < 0) {
        if (options.t_final < 0.0) fail_invalid("run: t_final must be >= 0");
        steps = std::lround(options.t_final / scheme.dt);
        if (options.t_final > 0.0 && steps == 0) steps = 1;
    }

    // E(c0) must be finite: every cell strictly interior.
    for (int i = 0; i < initial.c.size(); ++i)
        if (!stepper.potential().eval_f(initial.c[i]).finite() ||
            initial.c[i] <= stepper.potential().a() || initial.c[i] >= stepper.potential().b())
            fail_invalid("run: initial state has infinite energy (cells at or beyond endpoints)");

    TrajectoryRecord record;
    double diss_cum = 0.0;
    Vec mu = stepper.chemical_potential(initial.c);
    double prev_grad_mu_sq = -1.0; // sentinel: no step sample yet

    record.samples.push_back(
        make_sample(stepper, initial, diss_cum, 0, mu, grad_sq_norm(stepper.grid(), mu)));
    record.energy_initial = record.samples.front().energy;
    if (options.snapshot_sink && options.snapshot_stride > 0)
        options.snapshot_sink(initial, 0);

    State state = std::move(initial);
    int total_halvings = 0;
    for (long k = 1; k <= steps; ++k) {
        int iters = 0;
        advance(stepper, state, scheme.dt, options.max_halvings, diss_cum, prev_grad_mu_sq,
                iters, total_halvings, mu);
        ++record.total_steps;
        const bool sampled = (k % options.diagnostic_stride == 0) || k == steps;
        if (sampled)
            record.samples.push_back(
                make_sample(stepper, state, diss_cum, iters, mu, prev_grad_mu_sq));
        if (options.snapshot_sink && options.snapshot_stride > 0 &&
            (k % options.snapshot_stride == 0 || k == steps))
            options.snapshot_sink(state, k);
    }
    record.total_halvings = total_halvings;
    record.dissipation_total = diss_cum;
    record.final_state = std::move(state);
    return record;
}

State mollify_initial(const Grid& grid, const State& c0, double theta_reg) {
    if (theta_reg < 0.0) fail_invalid("mollify_initial: theta_reg must be >= 0");
    if (theta_reg == 0.0) return c0;

    double eps = std::pow(theta_reg, 0.25) * grid.diameter() / 10.0;
    eps = std::max(eps, grid.max_spacing());

    auto reflect = [](int k, int n) {
        while (k < 0 || k >= n) {
            if (k < 0) k = -k - 1;
            if (k >= n) k = 2 * n - k - 1;
        }
        return k;
    };

    // separable truncated Gaussian, reflected at the walls
    auto blur_axis = [&](const Vec& in, int axis) {
        const int nx = grid.cells(0), ny = grid.cells(1);
        const double h = grid.spacing(axis);
        const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * eps / h)));
        Vec w(2 * radius + 1);
        for (int j = -radius; j <= radius; ++j)
            w[j + radius] = std::exp(-0.5 * (j * h) * (j * h) / (eps * eps));
        w /= w.sum();

        Vec out(in.size());
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                double acc = 0.0;
                for (int j = -radius; j <= radius; ++j) {
                    int kx = ix, ky = iy;
                    if (axis == 0)
                        kx = reflect(ix + j, nx);
                    else
                        ky = reflect(iy + j, ny);
                    acc += w[j + radius] * in[grid.index(kx, ky)];
                }
                out[grid.index(ix, iy)] = acc;
            }
        return out;
    };

    State out = c0;
    out.c = blur_axis(out.c, 0);
    if (grid.dim() == 2) out.c = blur_axis(out.c, 1);
    out.c.array() += c0.mean - out.c.mean(); // exact mean preservation
    return out;
}

} // namespace nlch
