// neumann.hpp -- cell-centered Neumann Laplacian, its inverse on mean-zero
// fields, and the face-based gradient compatible with it (exact summation by
// parts: (apply_neumann(u), u)_h == grad_sq_norm(u)).
#pragma once

#include <Eigen/Dense>

#include "geometry.hpp"

namespace nlch {

using Vec = Eigen::VectorXd;

inline double field_mean(const Vec& u) { return u.mean(); }

// P0 u = u - mean(u); idempotent.
Vec project_mean_zero(const Vec& u);

// w = (-Laplacian_N) u with the 2nd-order zero-flux ghost closure.
Vec apply_neumann(const Grid& grid, const Vec& u);

// Dense matrix of apply_neumann (used by implicit solvers).
Eigen::MatrixXd neumann_dense(const Grid& grid);

// Sum over interior faces of the squared face gradient times cell volume.
double grad_sq_norm(const Grid& grid, const Vec& u);

// Unique mean-zero u with (-Lap_N) u = g. Rejects g with |mean(g)| >
// 1e-10 * ||g||. Direct flux integration in 1D; diagonally preconditioned CG
// (tol 1e-12, at most 10 N iterations) in 2D.
Vec invert_neumann(const Grid& grid, const Vec& g, double tol = 1e-12);

} // namespace nlch
