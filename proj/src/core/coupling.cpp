#include "coupling.hpp"

#include <string>
#include <vector>

#include "errors.hpp"

namespace nlch {

CouplingMatrix assemble_coupling(const Grid& grid, const Kernel& kernel, int refinement,
                                 int max_cells) {
    if (refinement < 1) fail_invalid("assemble_coupling: refinement M must be >= 1");
    if (kernel.dim() != grid.dim()) fail_invalid("assemble_coupling: kernel/grid dimension mismatch");
    const int n = grid.size();
    if (n > max_cells)
        fail_invalid("assemble_coupling: " + std::to_string(n) + " cells would need " +
                     std::to_string(static_cast<long long>(n) * n) +
                     " dense entries, above the configured cap of " + std::to_string(max_cells) +
                     " cells");

    CouplingMatrix cm;
    cm.K = Eigen::MatrixXd::Zero(n, n);
    cm.kernel_hash = kernel.hash();
    cm.grid_hash = grid.hash();
    cm.refinement = refinement;

    auto weight = [&](int i, int j) {
        const double center_sq = 1.0 / std::pow(distance(grid.center(i), grid.center(j)), 2);
        return pair_quadrature<double>(grid, i, j, refinement, [&](const Point& a, const Point& b) {
            const Point z = a - b;
            const double r2 = z[0] * z[0] + z[1] * z[1];
            return r2 * center_sq * kernel.value(a, b, z);
        });
    };

    if (kernel.translation_invariant()) {
        // Weight depends on the center offset only; memoize per |offset|.
        const int nx = grid.cells(0), ny = grid.cells(1);
        std::vector<double> table(static_cast<std::size_t>(nx) * ny, -1.0);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < j; ++i) {
                int adx = std::abs(grid.ix_of(j) - grid.ix_of(i));
                int ady = std::abs(grid.iy_of(j) - grid.iy_of(i));
                double& slot = table[static_cast<std::size_t>(ady) * nx + adx];
                if (slot < 0.0) slot = weight(i, j);
                cm.K(i, j) = slot;
                cm.K(j, i) = slot;
            }
        }
    } else {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < j; ++i) {
                double w = weight(i, j);
                cm.K(i, j) = w;
                cm.K(j, i) = w;
            }
        }
    }
    return cm;
}

double bilinear(const Grid& grid, const CouplingMatrix& cm, const Vec& u, const Vec& v) {
    const int n = cm.size();
    if (u.size() != n || v.size() != n) fail_invalid("bilinear: field size mismatch");
    const double V = grid.cell_volume();
    // difference form: vanishes identically on constants
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double* col = cm.K.col(j).data();
        double row_acc = 0.0;
        for (int i = 0; i < j; ++i) row_acc += col[i] * (u[i] - u[j]) * (v[i] - v[j]);
        acc += row_acc;
    }
    return acc * V * V; // the ordered-pair 1/2 cancels against counting i<j once
}

Vec apply_nonlocal(const Grid& grid, const CouplingMatrix& cm, const Vec& u) {
    const int n = cm.size();
    if (u.size() != n) fail_invalid("apply_nonlocal: field size mismatch");
    const double V = grid.cell_volume();
    Vec w = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
        const double* col = cm.K.col(j).data();
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += col[i] * (u[j] - u[i]);
        w[j] = V * acc;
    }
    return w;
}

Eigen::MatrixXd nonlocal_dense(const Grid& grid, const CouplingMatrix& cm) {
    const double V = grid.cell_volume();
    Eigen::MatrixXd L = -cm.K;
    L.diagonal() += cm.K.rowwise().sum();
    return V * L;
}

} // namespace nlch
