#include "elliptic.hpp"

#include <string>

#include "errors.hpp"

namespace nlch {

EllipticResult solve_elliptic(const EllipticProblem& problem) {
    const Grid& grid = problem.grid;
    const int n = grid.size();
    if (problem.g.size() != n) fail_invalid("solve_elliptic: right-hand side size mismatch");
    if (problem.theta_reg < 0.0) fail_invalid("solve_elliptic: theta_reg must be >= 0");

    const double gnorm = problem.g.norm();
    if (gnorm == 0.0) return {Vec::Zero(n), 0.0};
    if (std::abs(problem.g.mean()) * std::sqrt(static_cast<double>(n)) > 1e-10 * gnorm)
        fail_invalid("solve_elliptic: right-hand side is not mean-zero");

    Eigen::MatrixXd op = nonlocal_dense(grid, problem.coupling);
    if (problem.theta_reg > 0.0) op += problem.theta_reg * neumann_dense(grid);

    // Rank-one shift along constants: for mean-zero g the shifted SPD system
    // has the same (mean-zero) solution.
    const double V = grid.cell_volume();
    const double sigma = op.trace() / (static_cast<double>(n) * n * V * V);
    Eigen::MatrixXd shifted = op;
    shifted.array() += sigma * V * V;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) fail_numeric("solve_elliptic: factorization failed");
    Vec u = ldlt.solve(problem.g);
    // one round of iterative refinement
    Vec r = problem.g - shifted * u;
    u += ldlt.solve(r);
    u = project_mean_zero(u);

    double residual = (op * u - problem.g).norm() / gnorm;
    if (residual > problem.tol)
        fail_numeric("solve_elliptic: residual " + std::to_string(residual) +
                     " above tolerance " + std::to_string(problem.tol));
    return {std::move(u), residual};
}

double regularized_estimate_ratio(const Norms& norms, double theta_reg, const Vec& u,
                                  const Vec& g) {
    const double g2 = norms.l2_sq(g);
    if (g2 == 0.0) return 0.0;
    return (theta_reg * grad_sq_norm(norms.grid(), u) + norms.hs_norm_sq(u)) / g2;
}

} // namespace nlch
