#include <cmath>
#include <doctest.h>

#include "core/boundary.hpp"
#include "core/coupling.hpp"
#include "core/elliptic.hpp"
#include "core/errors.hpp"

using namespace nlch;

TEST_CASE("cone test function: apex, profile, support, Lipschitz bound") {
    Grid grid(1, {1.0, 1.0}, {128, 1});
    const double delta = 0.25;
    const Point x0(0.5);
    Vec phi = cone_test_function(grid, x0, delta);
    for (int i = 0; i < grid.size(); ++i) {
        double r = std::abs(grid.center(i)[0] - 0.5);
        if (r < delta)
            CHECK(phi[i] == doctest::Approx(1.0 - r / delta).epsilon(1e-14));
        else
            CHECK(phi[i] == 0.0);
        CHECK(phi[i] >= 0.0);
        CHECK(phi[i] <= 1.0);
    }
    // half-profile value and Lipschitz constant 1/delta across adjacent cells
    for (int i = 0; i + 1 < grid.size(); ++i)
        CHECK(std::abs(phi[i + 1] - phi[i]) <= grid.spacing(0) / delta + 1e-14);

    CHECK_THROWS_AS(cone_test_function(grid, x0, 2.0 * grid.spacing(0)), Error);
}

TEST_CASE("ladder fit: synthetic power-law corrections extrapolate correctly") {
    std::vector<double> deltas{0.4, 0.2, 0.1, 0.05};
    const Eigen::Vector2d limit(0.3, -1.1);
    const double beta = 1.5;
    std::vector<Eigen::Vector2d> values;
    for (double d : deltas)
        values.push_back(limit + std::pow(d, beta) * Eigen::Vector2d(0.9, 0.4));
    LadderFit fit = fit_ladder(deltas, values);
    CHECK(fit.converged);
    CHECK(fit.fitted_exponent == doctest::Approx(beta).epsilon(1e-10));
    CHECK((fit.extrapolated - limit).norm() <= 1e-12);
}

TEST_CASE("ladder fit flags oscillating data as inconclusive") {
    std::vector<double> deltas{0.4, 0.2, 0.1};
    std::vector<Eigen::Vector2d> values{{1.0, 0.0}, {-1.0, 0.0}, {1.0, 0.0}};
    LadderFit fit = fit_ladder(deltas, values);
    CHECK(!fit.converged);
    CHECK(fit.last_variation > 0.10);
}

TEST_CASE("isotropic kernel: direction parallel to the outward normal") {
    Kernel kernel = Kernel::homogeneous(2, 1.5, 1.0);
    std::vector<double> ladder{0.2, 0.1, 0.05};
    ProbeOptions options;
    options.resolution = 6;
    options.truncation = 8.0;
    DirectionProbe probe = direction_vector(kernel, Point(0.5, 0.0), ladder, options);
    REQUIRE(probe.converged);
    // frame: component 0 tangential, component 1 inward normal; outward normal
    // is (0,-1)
    Eigen::Vector2d nu(0.0, -1.0);
    double cosine = probe.direction.dot(nu);
    CHECK(std::abs(cosine) >= 0.99);
    // tangential cancellation by reflection symmetry
    CHECK(std::abs(probe.direction[0]) / std::abs(probe.direction[1]) <= 0.05);
}

TEST_CASE("tangential component shrinks as quadrature depth increases") {
    Kernel kernel = Kernel::homogeneous(2, 1.6, 1.0);
    std::vector<double> ladder{0.2, 0.1};
    double prev = 1e300;
    for (int resolution : {4, 6, 8}) {
        ProbeOptions options;
        options.resolution = resolution;
        options.truncation = 6.0;
        DirectionProbe probe = direction_vector(kernel, Point(0.5, 0.0), ladder, options);
        double tangential = std::abs(probe.vectors.back()[0]);
        CHECK(tangential <= prev + 1e-12);
        prev = tangential;
    }
}

TEST_CASE("modulated kernel matches the frozen-coefficient direction within 5%") {
    // g continuous at (x0,x0): freezing the modulation at the boundary point
    // must reproduce the extrapolated direction
    const Point x0(0.5, 0.0);
    Expression g = Expression::parse("1 + x1/2 + y1/4");
    Kernel kernel = Kernel::modulated(2, 1.5, 1.0, std::move(g), 0.5, 3.0);

    std::map<std::string, double> vars{{"x1", x0[0]}, {"x2", x0[1]}, {"y1", x0[0]},
                                       {"y2", x0[1]}, {"x", x0[0]},  {"y", x0[0]}};
    const double g_frozen = Expression::parse("1 + x1/2 + y1/4").eval(vars);
    Kernel frozen = Kernel::homogeneous(2, 1.5, g_frozen);

    std::vector<double> ladder{0.12, 0.06, 0.03};
    ProbeOptions options;
    options.resolution = 6;
    options.truncation = 6.0;
    DirectionProbe full = direction_vector(kernel, x0, ladder, options);
    DirectionProbe ref = direction_vector(frozen, x0, ladder, options);
    REQUIRE(full.converged);
    REQUIRE(ref.converged);
    CHECK((full.extrapolated - ref.extrapolated).norm() <= 0.05 * ref.extrapolated.norm());
}

TEST_CASE("scaled integrals vary by <= 10% between the last rungs when converged") {
    Kernel kernel = Kernel::homogeneous(2, 1.5, 1.0);
    std::vector<double> ladder{0.2, 0.1, 0.05};
    ProbeOptions options;
    options.resolution = 6;
    options.truncation = 8.0;
    DirectionProbe probe = direction_vector(kernel, Point(0.5, 0.0), ladder, options);
    if (probe.converged) {
        const auto& v = probe.vectors;
        CHECK((v[v.size() - 1] - v[v.size() - 2]).norm() <= 0.10 * v.back().norm());
    }
}

TEST_CASE("half-ball exponent: 1D r = 0 has slope 3 and an exact closed form") {
    std::vector<double> ladder{0.2, 0.1, 0.05};
    ProbeOptions options;
    options.resolution = 16;
    ExponentFit fit = halfball_integral_exponent(1, 0.0, ladder, options);
    CHECK(fit.predicted == doctest::Approx(3.0));
    CHECK(std::abs(fit.slope - 3.0) <= 0.1);
    // I_0(delta) = delta^3 / 3 exactly in 1D
    for (std::size_t k = 0; k < ladder.size(); ++k)
        CHECK(fit.integrals[k] ==
              doctest::Approx(std::pow(ladder[k], 3.0) / 3.0).epsilon(0.02));
}

TEST_CASE("half-ball exponent: dyadic ratio sanity") {
    std::vector<double> ladder{0.2, 0.1, 0.05};
    ProbeOptions options;
    options.resolution = 12;
    ExponentFit fit = halfball_integral_exponent(2, -1.0, ladder, options);
    const double expected = std::pow(2.0, fit.predicted);
    for (std::size_t k = 0; k + 1 < fit.integrals.size(); ++k) {
        double ratio = fit.integrals[k] / fit.integrals[k + 1];
        CHECK(std::abs(ratio - expected) <= 0.10 * expected);
    }
}

TEST_CASE("half-ball exponent input validation") {
    ProbeOptions options;
    CHECK_THROWS_AS(halfball_integral_exponent(1, -2.5, {0.2, 0.1, 0.05}, options), Error);
    CHECK_THROWS_AS(halfball_integral_exponent(1, 0.0, {0.2, 0.1}, options), Error);
    CHECK_THROWS_AS(halfball_integral_exponent(2, 0.0, {0.1, 0.2, 0.4}, options), Error);
}

TEST_CASE("neumann defect: constants vanish, manufactured slope is recovered") {
    Grid grid(2, {1.0, 1.0}, {32, 32});
    Vec c = Vec::Constant(grid.size(), 0.7);
    CHECK(neumann_defect(grid, c, Face::y_lo, 0.5, {0.0, -1.0}) == doctest::Approx(0.0));

    // u = 0.3 y + 0.2 x + x y: grad at (0.5, 0) is (0.2 + y, 0.3 + x) = (0.2, 0.8)
    Vec u(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        Point p = grid.center(i);
        u[i] = 0.3 * p[1] + 0.2 * p[0] + p[0] * p[1];
    }
    double d = neumann_defect(grid, u, Face::y_lo, 0.5, {0.0, 1.0});
    CHECK(d == doctest::Approx(0.8).epsilon(1e-10)); // exact for bilinear fields

    // quadratic-in-normal manufactured slope at the far wall, O(h^2) stencil is exact
    Vec q(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        Point p = grid.center(i);
        q[i] = 0.4 * (1.0 - p[1]) * (1.0 - p[1]) + 0.5 * (1.0 - p[1]) - 0.1 * p[0];
    }
    // grad q at (0.5, 1) = (-0.1, -0.5); defect against n = (0,1)
    CHECK(neumann_defect(grid, q, Face::y_hi, 0.5, {0.0, 1.0}) ==
          doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(neumann_defect(grid, q, Face::x_lo, 0.5, {1.0, 0.0}) ==
          doctest::Approx(-0.1).epsilon(1e-10));

    CHECK_THROWS_AS(neumann_defect(grid, u, Face::y_lo, 1.5, {0.0, 1.0}), Error);
}

TEST_CASE("1D defect at both endpoints") {
    Grid grid(1, {1.0, 1.0}, {64, 1});
    Vec u(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double x = grid.center(i)[0];
        u[i] = 0.5 * x * x - 0.2 * x;
    }
    // u' = x - 0.2: -0.2 at 0, 0.8 at 1; 1D direction convention n = 1
    CHECK(neumann_defect(grid, u, Face::x_lo, 0.0, {1.0, 0.0}) ==
          doctest::Approx(-0.2).epsilon(1e-10));
    CHECK(neumann_defect(grid, u, Face::x_hi, 0.0, {1.0, 0.0}) ==
          doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("steady elliptic defect shrinks under refinement") {
    // smooth mean-zero data; isotropic kernel so n_{x0} = outward normal
    auto defect_at = [](int n) {
        Grid grid(2, {1.0, 1.0}, {n, n});
        CouplingMatrix cm = assemble_coupling(grid, Kernel::homogeneous(2, 1.8, 1.0), 4);
        Vec g(grid.size());
        for (int i = 0; i < grid.size(); ++i) {
            Point p = grid.center(i);
            g[i] = std::cos(M_PI * p[0]) * std::cos(M_PI * p[1]);
        }
        g = project_mean_zero(g);
        Vec u = solve_elliptic({grid, cm, 0.0, g, 1e-9}).u;
        return std::abs(neumann_defect(grid, u, Face::y_lo, 0.5, {0.0, -1.0}));
    };
    double d16 = defect_at(16), d32 = defect_at(32);
    CHECK(d32 <= d16 * 1.05);
}
