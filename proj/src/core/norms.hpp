// norms.hpp -- discrete L^2, Slobodeckii H^s (s = alpha/2) and H^-1 norms.
#pragma once

#include <optional>

#include "coupling.hpp"
#include "neumann.hpp"

namespace nlch {

// Caches the pure power-law pair matrix for the Slobodeckii seminorm at
// exponent n + alpha (s = alpha/2) on a fixed grid.
class Norms {
public:
    Norms(const Grid& grid, double alpha, int refinement = 4,
          int max_cells = default_max_coupling_cells);

    const Grid& grid() const { return grid_; }
    double alpha() const { return alpha_; }

    double l2_sq(const Vec& u) const { return u.squaredNorm() * grid_.cell_volume(); }
    double l2(const Vec& u) const { return std::sqrt(l2_sq(u)); }

    // |u|^2_{H^{alpha/2}} = sum_{i != j} (u_i-u_j)^2 S_ij V^2.
    double slobodeckii_semi_sq(const Vec& u) const;
    double hs_norm_sq(const Vec& u) const { return l2_sq(u) + slobodeckii_semi_sq(u); }

    // ||f||^2_{H^-1} = (f, (-Lap_N)^{-1} f)_h; rejects non-mean-zero input.
    double hminus1_norm_sq(const Vec& f) const;
    double hminus1_norm(const Vec& f) const { return std::sqrt(std::max(0.0, hminus1_norm_sq(f))); }

private:
    const Grid& grid_;
    double alpha_;
    CouplingMatrix power_pairs_;
};

} // namespace nlch
