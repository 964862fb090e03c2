// elliptic.hpp -- stationary nonlocal problem E(u,psi) = (g,psi) on mean-zero
// fields and its theta-regularized variant theta(grad u, grad psi) + E(u,psi)
// = (g,psi), implemented with the coercive sign.
#pragma once

#include "coupling.hpp"
#include "neumann.hpp"
#include "norms.hpp"

namespace nlch {

struct EllipticProblem {
    const Grid& grid;
    const CouplingMatrix& coupling;
    double theta_reg = 0.0; // >= 0
    Vec g;                  // mean-zero right-hand side
    double tol = 1e-10;
};

struct EllipticResult {
    Vec u;           // mean-zero solution
    double residual; // ||op(u) - g|| / ||g||
};

// theta_reg == 0 solves L_h u = g; theta_reg > 0 solves (theta A + L_h) u = g.
EllipticResult solve_elliptic(const EllipticProblem& problem);

// (theta ||grad u||^2 + ||u||^2_{H^{alpha/2}}) / ||g||^2, the quantity bounded
// uniformly in theta.
double regularized_estimate_ratio(const Norms& norms, double theta_reg, const Vec& u,
                                  const Vec& g);

} // namespace nlch
