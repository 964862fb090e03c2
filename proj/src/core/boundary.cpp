#include "boundary.hpp"

#include <cmath>
#include <string>

#include "coupling.hpp"
#include "errors.hpp"

namespace nlch {

Vec cone_test_function(const Grid& grid, const Point& x0, double delta) {
    if (delta < 3.0 * grid.max_spacing())
        fail_invalid("cone_test_function: delta below grid resolution (needs delta >= 3h)");
    Vec phi(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double r = distance(grid.center(i), x0);
        phi[i] = r < delta ? 1.0 - r / delta : 0.0;
    }
    return phi;
}

namespace {

void check_ladder(const std::vector<double>& deltas, std::size_t min_rungs) {
    if (deltas.size() < min_rungs)
        fail_invalid("ladder needs at least " + std::to_string(min_rungs) + " rungs");
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (deltas[k] <= 0.0) fail_invalid("ladder rungs must be positive");
        if (k > 0 && deltas[k] >= deltas[k - 1])
            fail_invalid("ladder must be strictly decreasing");
    }
}

double cone_value(const Point& p, const Point& x0, double delta) {
    double r = distance(p, x0);
    return r < delta ? 1.0 - r / delta : 0.0;
}

} // namespace

LadderFit fit_ladder(const std::vector<double>& deltas,
                     const std::vector<Eigen::Vector2d>& values) {
    check_ladder(deltas, 2);
    if (values.size() != deltas.size()) fail_invalid("fit_ladder: size mismatch");
    const std::size_t k = values.size();

    LadderFit fit;
    Eigen::Vector2d last = values[k - 1];
    fit.last_variation = (last - values[k - 2]).norm() / std::max(last.norm(), 1e-300);
    fit.converged = fit.last_variation <= 0.10;
    fit.extrapolated = last;

    if (k >= 3) {
        Eigen::Vector2d d1 = values[k - 2] - values[k - 3];
        Eigen::Vector2d d2 = last - values[k - 2];
        const double q = deltas[k - 1] / deltas[k - 2];
        if (d2.norm() > 1e-14 * (last.norm() + 1.0) && d1.norm() > 0.0) {
            double beta = std::log(d2.norm() / d1.norm()) / std::log(q);
            fit.fitted_exponent = beta;
            if (beta > 0.05) {
                beta = std::min(beta, 8.0);
                const double qb = std::pow(q, beta);
                fit.extrapolated = last + (qb / (1.0 - qb)) * d2;
            }
        }
    }
    return fit;
}

DirectionProbe direction_vector(const Kernel& kernel, const Point& x0,
                                const std::vector<double>& ladder,
                                const ProbeOptions& options) {
    if (kernel.dim() != 2)
        fail_invalid("direction_vector: quadrature probe is for n = 2 (n = 1 uses n_{x0} = 1)");
    check_ladder(ladder, 2);
    if (options.resolution < 4) fail_invalid("probe resolution must be >= 4");

    const double dmax = ladder.front(), dmin = ladder.back();
    const double R = options.truncation * dmax;
    const double h = dmin / options.resolution;
    const int nx = std::max(8, static_cast<int>(std::llround(2.0 * R / h)));
    const int ny = std::max(4, static_cast<int>(std::llround(R / h)));
    Grid patch(2, {2.0 * R, R}, {nx, ny}, 1 << 23);
    const Point apex(R, 0.0);
    const double hx = patch.spacing(0), hy = patch.spacing(1);
    const double V2 = patch.cell_volume() * patch.cell_volume();
    const double near_cutoff = 3.0 * patch.max_spacing();

    const Kernel ksym = kernel.symmetrized();
    auto phys = [&](const Point& p) { return Point(x0[0] + (p[0] - R), x0[1] + p[1]); };
    auto kval = [&](const Point& a, const Point& b) {
        Point pa = phys(a), pb = phys(b);
        return ksym.value(pa, pb, pa - pb);
    };

    // radial table for translation-invariant kernels (far pairs only)
    const bool ti = ksym.translation_invariant();
    std::vector<double> table;
    if (ti) {
        table.assign(static_cast<std::size_t>(nx) * ny, 0.0);
        const double expo = -(2.0 + ksym.alpha());
        for (int ady = 0; ady < ny; ++ady)
            for (int adx = 0; adx < nx; ++adx) {
                if (adx == 0 && ady == 0) continue;
                double r = std::hypot(adx * hx, ady * hy);
                table[static_cast<std::size_t>(ady) * nx + adx] =
                    ksym.amplitude() * std::pow(r, expo);
            }
    }

    DirectionProbe probe;
    probe.deltas = ladder;
    const double scale_exp = -1.0 - 2.0 + ksym.alpha(); // delta^{alpha-1-n}, n=2

    for (double delta : ladder) {
        // support cells of the cone
        std::vector<int> support;
        Vec phi = Vec::Zero(patch.size());
        for (int i = 0; i < patch.size(); ++i) {
            double r = distance(patch.center(i), apex);
            if (r < delta) {
                phi[i] = 1.0 - r / delta;
                support.push_back(i);
            }
        }

        Eigen::Vector2d integral = Eigen::Vector2d::Zero();
        for (int i : support) {
            const int ixi = patch.ix_of(i), iyi = patch.iy_of(i);
            const Point ci = patch.center(i);
            for (int j = 0; j < patch.size(); ++j) {
                if (j == i) continue;
                if (phi[j] > 0.0 && j < i) continue; // unordered: count once
                const int adx = std::abs(patch.ix_of(j) - ixi);
                const int ady = std::abs(patch.iy_of(j) - iyi);
                const double dx = (ixi - patch.ix_of(j)) * hx;
                const double dy = (iyi - patch.iy_of(j)) * hy;
                const double dphi = phi[i] - phi[j];
                Eigen::Vector2d v;
                if (std::hypot(dx, dy) > near_cutoff) {
                    double w = ti ? table[static_cast<std::size_t>(ady) * nx + adx]
                                  : kval(ci, patch.center(j));
                    v = Eigen::Vector2d(dx * dphi * w, dy * dphi * w);
                } else {
                    v = pair_quadrature<Eigen::Vector2d>(
                        patch, i, j, options.refinement,
                        [&](const Point& a, const Point& b) -> Eigen::Vector2d {
                            double w =
                                (cone_value(a, apex, delta) - cone_value(b, apex, delta)) *
                                kval(a, b);
                            return {(a[0] - b[0]) * w, (a[1] - b[1]) * w};
                        },
                        Eigen::Vector2d::Zero());
                }
                integral += 2.0 * v; // both orientations of the ordered pair
            }
        }
        probe.vectors.push_back(std::pow(delta, scale_exp) * (V2 * integral));
    }

    LadderFit fit = fit_ladder(ladder, probe.vectors);
    probe.extrapolated = fit.extrapolated;
    probe.fitted_exponent = fit.fitted_exponent;
    probe.converged = fit.converged;
    probe.last_variation = fit.last_variation;
    if (probe.converged && probe.extrapolated.norm() > 0.0)
        probe.direction = probe.extrapolated.normalized();
    return probe;
}

ExponentFit halfball_integral_exponent(int dim, double r, const std::vector<double>& ladder,
                                    const ProbeOptions& options) {
    if (dim != 1 && dim != 2) fail_invalid("halfball_integral_exponent: dim must be 1 or 2");
    if (!(r > -1.0 - dim)) fail_invalid("halfball_integral_exponent requires r > -1-n");
    check_ladder(ladder, 3);
    if (options.resolution < 4) fail_invalid("probe resolution must be >= 4");

    const double dmax = ladder.front(), dmin = ladder.back();
    const double h = dmin / options.resolution;

    Grid patch = dim == 2
                     ? Grid(2, {2.0 * dmax, dmax},
                            {std::max(8, static_cast<int>(std::llround(2.0 * dmax / h))),
                             std::max(4, static_cast<int>(std::llround(dmax / h)))},
                            1 << 23)
                     : Grid(1, {dmax, 1.0},
                            {std::max(8, static_cast<int>(std::llround(dmax / h))), 1}, 1 << 23);
    const Point apex = dim == 2 ? Point(dmax, 0.0) : Point(0.0);
    const double V2 = patch.cell_volume() * patch.cell_volume();
    const double near_cutoff = 3.0 * patch.max_spacing();

    auto integrand = [&](const Point& a, const Point& b) {
        double sep = distance(a, b);
        return std::pow(sep, r) * std::abs(distance(a, apex) - distance(b, apex));
    };

    ExponentFit fit;
    fit.deltas = ladder;
    fit.predicted = 1.0 + r + 2.0 * dim;

    // fraction of a cell covered by the ball of radius delta, by subsampling;
    // all-or-nothing support would bias the fitted slope by O(h/delta)
    auto coverage = [&](int i, double delta) {
        const Point c = patch.center(i);
        const double r = distance(c, apex);
        const double reach = 0.5 * std::hypot(patch.spacing(0), patch.spacing(1));
        if (r + reach < delta) return 1.0;
        if (r - reach > delta) return 0.0;
        const int m = 8;
        int inside = 0;
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < (dim == 2 ? m : 1); ++q) {
                Point s = c;
                s[0] += (-0.5 + (p + 0.5) / m) * patch.spacing(0);
                if (dim == 2) s[1] += (-0.5 + (q + 0.5) / m) * patch.spacing(1);
                if (distance(s, apex) < delta) ++inside;
            }
        return static_cast<double>(inside) / (dim == 2 ? m * m : m);
    };

    for (double delta : ladder) {
        std::vector<int> support;
        std::vector<double> weight;
        for (int i = 0; i < patch.size(); ++i) {
            double w = coverage(i, delta);
            if (w > 0.0) {
                support.push_back(i);
                weight.push_back(w);
            }
        }

        double integral = 0.0;
        for (std::size_t a = 0; a < support.size(); ++a) {
            const int i = support[a];
            const Point ci = patch.center(i);
            // cell self-pair: subcell rule with the coincident diagonal excluded
            integral += weight[a] * weight[a] *
                        pair_quadrature<double>(patch, i, i, options.refinement, integrand);
            for (std::size_t b = a + 1; b < support.size(); ++b) {
                const int j = support[b];
                double v = distance(ci, patch.center(j)) > near_cutoff
                               ? integrand(ci, patch.center(j))
                               : pair_quadrature<double>(patch, i, j, options.refinement,
                                                         integrand);
                integral += 2.0 * weight[a] * weight[b] * v;
            }
        }
        fit.integrals.push_back(integral * V2);
    }

    // least squares slope of log I against log delta
    const std::size_t n = ladder.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double x = std::log(ladder[k]), y = std::log(fit.integrals[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

double neumann_defect(const Grid& grid, const Vec& u, Face face, double along,
                      const Eigen::Vector2d& n_x0) {
    if (u.size() != grid.size()) fail_invalid("neumann_defect: field size mismatch");

    // quadratic one-sided stencils at cell centers (h/2, 3h/2, 5h/2) from a wall
    auto deriv_at_wall = [](double u0, double u1, double u2, double h) {
        return (-2.0 * u0 + 3.0 * u1 - u2) / h;
    };
    auto value_at_wall = [](double u0, double u1, double u2) {
        return 1.875 * u0 - 1.25 * u1 + 0.375 * u2;
    };

    if (grid.dim() == 1) {
        if (grid.cells(0) < 3) fail_invalid("neumann_defect: need at least 3 cells");
        if (face == Face::y_lo || face == Face::y_hi)
            fail_invalid("neumann_defect: y faces do not exist in 1D");
        double gx;
        if (face == Face::x_lo)
            gx = deriv_at_wall(u[0], u[1], u[2], grid.spacing(0));
        else
            gx = -deriv_at_wall(u[grid.size() - 1], u[grid.size() - 2], u[grid.size() - 3],
                                grid.spacing(0));
        return gx * n_x0[0];
    }

    const int nx = grid.cells(0), ny = grid.cells(1);
    if (nx < 3 || ny < 3) fail_invalid("neumann_defect: need at least 3 cells per axis");
    const double hx = grid.spacing(0), hy = grid.spacing(1);

    const bool yface = (face == Face::y_lo || face == Face::y_hi);
    const double tangential_extent = yface ? grid.extent(0) : grid.extent(1);
    if (!(along > 0.0 && along < tangential_extent))
        fail_invalid("neumann_defect: probe point is not interior to the face");
    const double ht = yface ? hx : hy, hn = yface ? hy : hx;
    const int nt = yface ? nx : ny, nn = yface ? ny : nx;
    const bool lo = (face == Face::x_lo || face == Face::y_lo);

    auto cell = [&](int tix, int layer) {
        int nix = lo ? layer : (nn - 1 - layer);
        return yface ? u[grid.index(tix, nix)] : u[grid.index(nix, tix)];
    };
    // linear tangential interpolation keeps the probe at exactly `along`
    // independent of how cell centers fall at each refinement level
    auto sample = [&](double t, int layer) {
        double pos = t / ht - 0.5;
        int i0 = std::clamp(static_cast<int>(std::floor(pos)), 0, nt - 2);
        double w = std::clamp(pos - i0, 0.0, 1.0);
        return (1.0 - w) * cell(i0, layer) + w * cell(i0 + 1, layer);
    };

    double un = deriv_at_wall(sample(along, 0), sample(along, 1), sample(along, 2), hn);
    if (!lo) un = -un; // inward coordinate runs against the axis at the far wall

    auto tang_deriv = [&](int layer) {
        return (sample(along + ht, layer) - sample(along - ht, layer)) / (2.0 * ht);
    };
    double ut = value_at_wall(tang_deriv(0), tang_deriv(1), tang_deriv(2));

    const double gx = yface ? ut : un;
    const double gy = yface ? un : ut;
    return gx * n_x0[0] + gy * n_x0[1];
}

} // namespace nlch
