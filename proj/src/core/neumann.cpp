#include "neumann.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace nlch {

Vec project_mean_zero(const Vec& u) {
    return u.array() - u.mean();
}

Vec apply_neumann(const Grid& grid, const Vec& u) {
    const int nx = grid.cells(0), ny = grid.cells(1);
    const double ix2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
    const double iy2 = grid.dim() == 2 ? 1.0 / (grid.spacing(1) * grid.spacing(1)) : 0.0;
    Vec w = Vec::Zero(u.size());
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int i = grid.index(ix, iy);
            double acc = 0.0;
            if (ix > 0) acc += (u[i] - u[i - 1]) * ix2;
            if (ix < nx - 1) acc += (u[i] - u[i + 1]) * ix2;
            if (grid.dim() == 2) {
                if (iy > 0) acc += (u[i] - u[i - nx]) * iy2;
                if (iy < ny - 1) acc += (u[i] - u[i + nx]) * iy2;
            }
            w[i] = acc;
        }
    }
    return w;
}

Eigen::MatrixXd neumann_dense(const Grid& grid) {
    const int nx = grid.cells(0), ny = grid.cells(1), n = grid.size();
    const double ix2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
    const double iy2 = grid.dim() == 2 ? 1.0 / (grid.spacing(1) * grid.spacing(1)) : 0.0;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int i = grid.index(ix, iy);
            if (ix > 0) {
                A(i, i) += ix2;
                A(i, i - 1) -= ix2;
            }
            if (ix < nx - 1) {
                A(i, i) += ix2;
                A(i, i + 1) -= ix2;
            }
            if (grid.dim() == 2) {
                if (iy > 0) {
                    A(i, i) += iy2;
                    A(i, i - nx) -= iy2;
                }
                if (iy < ny - 1) {
                    A(i, i) += iy2;
                    A(i, i + nx) -= iy2;
                }
            }
        }
    }
    return A;
}

double grad_sq_norm(const Grid& grid, const Vec& u) {
    const int nx = grid.cells(0), ny = grid.cells(1);
    const double V = grid.cell_volume();
    const double hx = grid.spacing(0), hy = grid.spacing(1);
    double acc = 0.0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix + 1 < nx; ++ix) {
            double g = (u[grid.index(ix + 1, iy)] - u[grid.index(ix, iy)]) / hx;
            acc += g * g * V;
        }
    if (grid.dim() == 2)
        for (int iy = 0; iy + 1 < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                double g = (u[grid.index(ix, iy + 1)] - u[grid.index(ix, iy)]) / hy;
                acc += g * g * V;
            }
    return acc;
}

namespace {

Vec invert_1d(const Grid& grid, const Vec& g) {
    const int n = grid.size();
    const double h = grid.spacing(0);
    Vec u(n);
    double flux = 0.0;
    u[0] = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        flux += h * g[i];
        u[i + 1] = u[i] - h * flux;
    }
    return project_mean_zero(u);
}

Vec invert_pcg(const Grid& grid, const Vec& g, double tol) {
    const int n = grid.size();
    const int nx = grid.cells(0), ny = grid.cells(1);
    const double ix2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
    const double iy2 = 1.0 / (grid.spacing(1) * grid.spacing(1));
    Vec diag(n);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            double d = 0.0;
            if (ix > 0) d += ix2;
            if (ix < nx - 1) d += ix2;
            if (iy > 0) d += iy2;
            if (iy < ny - 1) d += iy2;
            diag[grid.index(ix, iy)] = d;
        }

    const double gnorm = g.norm();
    Vec x = Vec::Zero(n);
    Vec r = g;
    Vec z = project_mean_zero((r.array() / diag.array()).matrix());
    Vec p = z;
    double rz = r.dot(z);
    const int max_iter = 10 * n;
    for (int it = 0; it < max_iter; ++it) {
        if (r.norm() <= tol * gnorm) return project_mean_zero(x);
        Vec Ap = apply_neumann(grid, p);
        double denom = p.dot(Ap);
        if (denom <= 0.0) fail_numeric("invert_neumann: CG broke down (non-positive curvature)");
        double alpha = rz / denom;
        x += alpha * p;
        r -= alpha * Ap;
        z = project_mean_zero((r.array() / diag.array()).matrix());
        double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    fail_numeric("invert_neumann: CG did not reach tol " + std::to_string(tol) + " in " +
                 std::to_string(max_iter) + " iterations (residual " +
                 std::to_string(r.norm() / (gnorm > 0 ? gnorm : 1.0)) + ")");
}

} // namespace

Vec invert_neumann(const Grid& grid, const Vec& g, double tol) {
    if (g.size() != grid.size()) fail_invalid("invert_neumann: field size mismatch");
    const double gnorm = g.norm();
    if (gnorm == 0.0) return Vec::Zero(g.size());
    if (std::abs(g.mean()) * std::sqrt(static_cast<double>(g.size())) > 1e-10 * gnorm)
        fail_invalid("invert_neumann: right-hand side is not mean-zero");
    if (grid.dim() == 1) return invert_1d(grid, g);
    return invert_pcg(grid, g, tol);
}

} // namespace nlch
