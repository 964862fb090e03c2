#include "diagnostics.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace nlch {

EnergyBreakdown energy(const Grid& grid, const CouplingMatrix& coupling,
                       const Potential& potential, double theta_reg, const Vec& c) {
    EnergyBreakdown e;
    const double a = potential.a(), b = potential.b();
    for (int i = 0; i < c.size(); ++i) {
        bool inside = potential.family() == PotentialFamily::logarithmic
                          ? (c[i] > a && c[i] < b)
                          : (c[i] >= a && c[i] <= b);
        if (!inside) {
            e.finite = false;
            e.total = std::numeric_limits<double>::infinity();
            return e;
        }
    }
    e.nonlocal = 0.5 * bilinear(grid, coupling, c, c);
    e.gradient = theta_reg > 0.0 ? 0.5 * theta_reg * grad_sq_norm(grid, c) : 0.0;
    const double V = grid.cell_volume();
    double bulk = 0.0;
    for (int i = 0; i < c.size(); ++i) bulk += potential.eval_f(c[i]).f;
    e.bulk = bulk * V;
    e.total = e.nonlocal + e.gradient + e.bulk;
    return e;
}

double energy_identity_residual(const TrajectoryRecord& trajectory) {
    if (trajectory.samples.empty()) fail_invalid("energy_identity_residual: empty trajectory");
    const double e0 = trajectory.energy_initial;
    const double eT = trajectory.samples.back().energy;
    const double diss = trajectory.samples.back().diss_cum;
    return std::abs(eT + diss - e0) / (1.0 + std::abs(e0));
}

AbsorbingFit absorbing_set_check(const TrajectoryRecord& trajectory) {
    const auto& samples = trajectory.samples;
    if (samples.size() < 10) fail_invalid("absorbing_set_check: need at least 10 samples");
    if (samples.back().t < 5.0)
        fail_invalid("absorbing_set_check: samples must span t in [0, >= 5]");
    const double e0 = samples.front().energy;
    AbsorbingFit fit;
    fit.c_abs = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        double gap = s.energy - std::exp(-s.t) * e0;
        if (gap > fit.c_abs) {
            fit.c_abs = gap;
            fit.attained_at = s.t;
        }
    }
    return fit;
}

double domain_estimate_ratio(const Norms& norms, const CouplingMatrix& coupling,
                             const Potential& potential, double theta_reg, const Vec& c) {
    const Grid& grid = norms.grid();
    const double V = grid.cell_volume();

    Vec phip(c.size());
    for (int i = 0; i < c.size(); ++i) phip[i] = potential.eval_phi(c[i]).df;

    Vec subgrad = apply_nonlocal(grid, coupling, c) + project_mean_zero(phip);
    if (theta_reg > 0.0) subgrad += theta_reg * apply_neumann(grid, c);

    const double lhs = theta_reg * (norms.l2_sq(c) + grad_sq_norm(grid, c)) +
                       norms.hs_norm_sq(c) + phip.squaredNorm() * V;
    const double rhs = subgrad.squaredNorm() * V + norms.l2_sq(c) + 1.0;
    return lhs / rhs;
}

} // namespace nlch
