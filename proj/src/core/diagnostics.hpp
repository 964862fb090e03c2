// diagnostics.hpp -- scalar certificates: energy breakdown, energy identity
// residual, absorbing-set decay fit, subgradient-domain estimate ratio.
#pragma once

#include "norms.hpp"
#include "stepper.hpp"

namespace nlch {

// E_theta(c) = 1/2 E_h(c,c) + (theta/2)||grad c||^2 + sum f(c_i) V. The
// nonlocal part carries the extra 1/2 so that mu = theta(-Lap)c + L c + f'(c)
// is exactly the variational derivative of the total; the discrete energy
// identity then holds up to time quadrature only.
struct EnergyBreakdown {
    double nonlocal = 0.0;
    double gradient = 0.0;
    double bulk = 0.0;
    double total = 0.0;
    bool finite = true; // false: some cell touches/leaves [a,b], total = +inf
};

EnergyBreakdown energy(const Grid& grid, const CouplingMatrix& coupling,
                       const Potential& potential, double theta_reg, const Vec& c);

// |E(c_T) + trapezoid(||grad mu||^2) - E(c_0)| / (1 + |E(c_0)|).
double energy_identity_residual(const TrajectoryRecord& trajectory);

struct AbsorbingFit {
    double c_abs = 0.0;      // smallest C with E(t) <= e^{-t} E(0) + C on samples
    double attained_at = 0.0;
};

// Requires >= 10 samples spanning t in [0, >= 5].
AbsorbingFit absorbing_set_check(const TrajectoryRecord& trajectory);

// LHS/RHS of the domain estimate: (theta||c||_{H^1}^2 + ||c||_{H^{a/2}}^2 +
// ||phi'(c)||_2^2) / (||dF_theta(c)||_2^2 + ||c||_2^2 + 1) with dF_theta(c) =
// theta(-Lap_N)c + L c + P0 phi'(c).
double domain_estimate_ratio(const Norms& norms, const CouplingMatrix& coupling,
                             const Potential& potential, double theta_reg, const Vec& c);

} // namespace nlch
