#include "norms.hpp"

#include "errors.hpp"

namespace nlch {

Norms::Norms(const Grid& grid, double alpha, int refinement, int max_cells)
    : grid_(grid), alpha_(alpha),
      power_pairs_(assemble_coupling(grid, Kernel::homogeneous(grid.dim(), alpha, 1.0),
                                     refinement, max_cells)) {}

double Norms::slobodeckii_semi_sq(const Vec& u) const {
    // The bilinear form carries the 1/2; the seminorm does not.
    return 2.0 * bilinear(grid_, power_pairs_, u, u);
}

double Norms::hminus1_norm_sq(const Vec& f) const {
    const double fnorm = f.norm();
    if (fnorm == 0.0) return 0.0;
    if (std::abs(f.mean()) * std::sqrt(static_cast<double>(f.size())) > 1e-10 * fnorm)
        fail_invalid("hminus1_norm: field is not mean-zero");
    Vec psi = invert_neumann(grid_, f);
    return f.dot(psi) * grid_.cell_volume();
}

} // namespace nlch
