// coupling.hpp -- dense symmetric matrix of pairwise kernel weights realizing
// the bilinear form E(u,v) and the nonlocal operator L discretely on a
// piecewise-constant (finite volume) basis. The coincident-cell singular
// contribution vanishes identically for this basis, so the diagonal is zero.
#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "geometry.hpp"
#include "kernel.hpp"

namespace nlch {

using Vec = Eigen::VectorXd;

struct CouplingMatrix {
    Eigen::MatrixXd K; // symmetric, zero diagonal, positive off-diagonal
    std::uint64_t kernel_hash = 0;
    std::uint64_t grid_hash = 0;
    int refinement = 4; // near-pair subcell order M (per axis)

    int size() const { return static_cast<int>(K.rows()); }
};

// Cap on cells entering the dense N^2 assembly (separate from the grid cap).
constexpr int default_max_coupling_cells = 4096;

// Far pairs (center distance > 3 h) take the midpoint value k(c_i, c_j). Near
// pairs average |x-y|^2 / |c_i-c_j|^2 * k over an MxM (per axis) subcell
// tensor rule, skipping coincident subcell pairs. The distance weight matches
// the |x-y|^2 carried by smooth differences across a pair; without it the
// cell-pair kernel average diverges for touching cells when alpha > 1, so no
// subcell refinement could converge. Entries are computed once per unordered
// pair and mirrored, so the matrix is exactly symmetric.
CouplingMatrix assemble_coupling(const Grid& grid, const Kernel& kernel, int refinement,
                                 int max_cells = default_max_coupling_cells);

// E_h(u,v) = 1/2 sum_{ij} (u_i-u_j)(v_i-v_j) K_ij V^2.
double bilinear(const Grid& grid, const CouplingMatrix& K, const Vec& u, const Vec& v);

// (L_h u)_i = sum_j (u_i-u_j) K_ij V; satisfies (L_h u, v)_h = E_h(u,v) and
// annihilates constants.
Vec apply_nonlocal(const Grid& grid, const CouplingMatrix& K, const Vec& u);

// Dense matrix of apply_nonlocal: V * (diag(K 1) - K).
Eigen::MatrixXd nonlocal_dense(const Grid& grid, const CouplingMatrix& K);

// Average of f over the near/far pair quadrature points of cells (i,j); the
// same rule assemble_coupling uses, exposed for the boundary probes. The
// caller supplies the zero accumulator (Eigen vectors do not value-initialize).
template <class T, class F>
T pair_quadrature(const Grid& grid, int i, int j, int refinement, F&& f, T acc = T{}) {
    const Point ci = grid.center(i), cj = grid.center(j);
    const double near_cutoff = 3.0 * grid.max_spacing();
    if (distance(ci, cj) > near_cutoff) return f(ci, cj);

    const int M = refinement;
    const int dim = grid.dim();
    const double sx = grid.spacing(0) / M;
    const double sy = dim == 2 ? grid.spacing(1) / M : 0.0;
    const int subcells = dim == 2 ? M * M : M;
    int used = 0;
    for (int p = 0; p < subcells; ++p) {
        Point xa = ci;
        xa[0] += (-0.5 * grid.spacing(0)) + (p % M + 0.5) * sx;
        if (dim == 2) xa[1] += (-0.5 * grid.spacing(1)) + (p / M + 0.5) * sy;
        for (int q = 0; q < subcells; ++q) {
            Point xb = cj;
            xb[0] += (-0.5 * grid.spacing(0)) + (q % M + 0.5) * sx;
            if (dim == 2) xb[1] += (-0.5 * grid.spacing(1)) + (q / M + 0.5) * sy;
            if (xa[0] == xb[0] && xa[1] == xb[1]) continue; // coincident guard
            acc += f(xa, xb);
            ++used;
        }
    }
    return acc * (1.0 / used);
}

} // namespace nlch
