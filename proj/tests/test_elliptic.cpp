#include <cmath>
#include <doctest.h>

#include "core/elliptic.hpp"
#include "core/errors.hpp"

using namespace nlch;

namespace {

Grid make_grid1d(int n = 64) { return Grid(1, {1.0, 1.0}, {n, 1}); }

Vec random_mean_zero(const Grid& grid, std::uint64_t seed) {
    CounterRng rng{seed};
    Vec u(grid.size());
    for (int i = 0; i < grid.size(); ++i) u[i] = rng.sym(static_cast<std::uint64_t>(i));
    return project_mean_zero(u);
}

} // namespace

TEST_CASE("zero right-hand side gives the zero solution") {
    Grid grid = make_grid1d();
    CouplingMatrix cm = assemble_coupling(grid, Kernel::homogeneous(1, 1.5, 1.0), 4);
    CHECK(solve_elliptic({grid, cm, 0.0, Vec::Zero(grid.size()), 1e-10}).u.norm() == 0.0);
    CHECK(solve_elliptic({grid, cm, 0.5, Vec::Zero(grid.size()), 1e-10}).u.norm() == 0.0);
}

TEST_CASE("defining property against random test fields") {
    Grid grid = make_grid1d();
    CouplingMatrix cm = assemble_coupling(grid, Kernel::homogeneous(1, 1.5, 1.0), 4);
    Vec g = random_mean_zero(grid, 1);
    Vec u = solve_elliptic({grid, cm, 0.0, g, 1e-10}).u;
    const double V = grid.cell_volume();
    for (int s = 0; s < 20; ++s) {
        Vec psi = random_mean_zero(grid, 40 + static_cast<std::uint64_t>(s));
        double lhs = bilinear(grid, cm, u, psi);
        double rhs = g.dot(psi) * V;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("forward operator recovers the data (round trip)") {
    Grid grid = make_grid1d(96);
    CouplingMatrix cm = assemble_coupling(grid, Kernel::homogeneous(1, 1.4, 1.0), 4);
    for (int s = 0; s < 5; ++s) {
        Vec g = random_mean_zero(grid, 7 + static_cast<std::uint64_t>(s));
        Vec u = solve_elliptic({grid, cm, 0.0, g, 1e-10}).u;
        CHECK((apply_nonlocal(grid, cm, u) - g).norm() <= 1e-10 * g.norm());
        CHECK(std::abs(u.mean()) <= 1e-12);
    }
}

TEST_CASE("non-mean-zero data is rejected") {
    Grid grid = make_grid1d();
    CouplingMatrix cm = assemble_coupling(grid, Kernel::homogeneous(1, 1.5, 1.0), 4);
    CHECK_THROWS_AS(solve_elliptic({grid, cm, 0.0, Vec::Constant(grid.size(), 1.0), 1e-10}),
                    Error);
}

TEST_CASE("regularized estimate is bounded uniformly across a theta sweep") {
    Grid grid = make_grid1d(96);
    CouplingMatrix cm = assemble_coupling(grid, Kernel::homogeneous(1, 1.5, 4.0), 4);
    Norms norms(grid, 1.5);
    Vec g = random_mean_zero(grid, 33);
    double lo = 1e300, hi = 0.0;
    for (double theta : {1.0, 0.1, 0.01}) {
        Vec u = solve_elliptic({grid, cm, theta, g, 1e-10}).u;
        double ratio = regularized_estimate_ratio(norms, theta, u, g);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo <= 3.0);
}

TEST_CASE("theta -> 0 continuation approaches the unregularized solution") {
    Grid grid = make_grid1d(64);
    CouplingMatrix cm = assemble_coupling(grid, Kernel::homogeneous(1, 1.5, 1.0), 4);
    Vec g = random_mean_zero(grid, 5);
    Vec u0 = solve_elliptic({grid, cm, 0.0, g, 1e-10}).u;
    double prev = 1e300;
    for (double theta = 1.0; theta >= 1.0 / 64 - 1e-12; theta /= 2.0) {
        Vec ut = solve_elliptic({grid, cm, theta, g, 1e-10}).u;
        double dist = std::sqrt((ut - u0).squaredNorm() * grid.cell_volume());
        CHECK(dist < prev);
        prev = dist;
    }
}

TEST_CASE("energy optimality of the solution") {
    Grid grid = make_grid1d(48);
    CouplingMatrix cm = assemble_coupling(grid, Kernel::homogeneous(1, 1.6, 1.0), 4);
    Vec g = random_mean_zero(grid, 21);
    const double theta = 0.3;
    Vec u = solve_elliptic({grid, cm, theta, g, 1e-10}).u;
    const double V = grid.cell_volume();
    auto objective = [&](const Vec& v) {
        return 0.5 * (theta * grad_sq_norm(grid, v) + bilinear(grid, cm, v, v)) - g.dot(v) * V;
    };
    const double at_solution = objective(u);
    for (int s = 0; s < 10; ++s) {
        Vec dir = random_mean_zero(grid, 60 + static_cast<std::uint64_t>(s));
        dir *= 1e-3 / dir.norm();
        CHECK(objective(u + dir) >= at_solution - 1e-14 * (1.0 + std::abs(at_solution)));
    }
}

TEST_CASE("nonlocal energy grows as theta decreases") {
    Grid grid = make_grid1d(64);
    CouplingMatrix cm = assemble_coupling(grid, Kernel::homogeneous(1, 1.5, 1.0), 4);
    Vec g = random_mean_zero(grid, 13);
    double prev = -1.0;
    for (double theta : {1.0, 0.25, 0.0625, 0.0}) {
        Vec u = solve_elliptic({grid, cm, theta, g, 1e-10}).u;
        double nonlocal = bilinear(grid, cm, u, u);
        CHECK(nonlocal >= prev - 1e-12);
        prev = nonlocal;
    }
}
