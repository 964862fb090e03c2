#include <cmath>
#include <doctest.h>

#include "core/errors.hpp"
#include "core/expression.hpp"
#include "core/kernel.hpp"

using namespace nlch;

namespace {

Grid unit_interval(int n = 64) { return Grid(1, {1.0, 1.0}, {n, 1}); }

} // namespace

TEST_CASE("homogeneous kernel evaluates the power law") {
    Kernel k = Kernel::homogeneous(1, 1.5, 1.0);
    // |x-y| = 2, exponent n+alpha = 2.5
    CHECK(k.eval(Point(0.0), Point(2.0)) == doctest::Approx(std::pow(2.0, -2.5)).epsilon(1e-14));
    CHECK(k.eval(Point(0.0), Point(2.0)) == doctest::Approx(0.17677669529663687).epsilon(1e-14));
}

TEST_CASE("kernel pair symmetry k(x,y,z) = k(y,x,-z)") {
    Kernel k = Kernel::homogeneous(2, 1.3, 2.5);
    CounterRng rng{11};
    for (int i = 0; i < 100; ++i) {
        Point x(rng.uniform01(4 * i), rng.uniform01(4 * i + 1));
        Point y(rng.uniform01(4 * i + 2) + 1.001, rng.uniform01(4 * i + 3));
        CHECK(k.eval(x, y) == doctest::Approx(k.eval(y, x)).epsilon(1e-14));
    }
}

TEST_CASE("modulated kernel with constant g = 2") {
    Kernel k = Kernel::modulated(1, 1.5, 1.0, Expression::parse("2"), 2.0, 2.0);
    CHECK(k.eval(Point(0.0), Point(1.0)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("construction rejects alpha outside (1,2)") {
    CHECK_THROWS_AS(Kernel::homogeneous(1, 2.5, 1.0), Error);
    CHECK_THROWS_AS(Kernel::homogeneous(1, 1.0, 1.0), Error);
    CHECK_THROWS_AS(Kernel::homogeneous(1, 0.5, 1.0), Error);
}

TEST_CASE("coincident points are a domain error") {
    Kernel k = Kernel::homogeneous(1, 1.5, 1.0);
    CHECK_THROWS_AS(k.eval(Point(0.3), Point(0.3)), Error);
}

TEST_CASE("symmetrize is a fixed point on symmetric kernels") {
    Kernel k = Kernel::homogeneous(1, 1.4, 3.0);
    Kernel ks = k.symmetrized();
    CounterRng rng{3};
    for (int i = 0; i < 50; ++i) {
        Point x(rng.uniform01(2 * i));
        Point y(rng.uniform01(2 * i + 1) + 1.5);
        CHECK(ks.eval(x, y) == k.eval(x, y));
    }
}

TEST_CASE("symmetrize averages an asymmetric kernel") {
    // k(x,y,z) = (1+x1) |z|^{-n-alpha} on x1 in (0,1)
    const double alpha = 1.5;
    auto raw = [alpha](const Point& x, const Point&, const Point& z) {
        return (1.0 + x[0]) * std::pow(norm(z), -(1.0 + alpha));
    };
    Kernel k = Kernel::custom(1, alpha, raw, 1.0, 2.0).symmetrized();
    CounterRng rng{5};
    for (int i = 0; i < 50; ++i) {
        Point x(rng.uniform01(2 * i));
        Point y(rng.uniform01(2 * i + 1) + 1.2);
        double expected = (1.0 + 0.5 * (x[0] + y[0])) * std::pow(distance(x, y), -(1.0 + alpha));
        CHECK(k.eval(x, y) == doctest::Approx(expected).epsilon(1e-13));
        // after symmetrization: eval(x,y) == eval(y,x) to round-off
        CHECK(std::abs(k.eval(x, y) - k.eval(y, x)) <= 1e-12 * k.eval(x, y));
    }
}

TEST_CASE("symmetrize is idempotent on 100 random triples") {
    auto raw = [](const Point& x, const Point& y, const Point& z) {
        return (1.0 + 0.7 * x[0] + 0.1 * y[0]) * std::pow(norm(z), -2.4);
    };
    Kernel once = Kernel::custom(1, 1.4, raw, 0.5, 3.0).symmetrized();
    Kernel twice = once.symmetrized();
    CounterRng rng{17};
    for (int i = 0; i < 100; ++i) {
        Point x(rng.uniform01(3 * i)), y(rng.uniform01(3 * i + 1) + 1.01);
        Point z = x - y;
        CHECK(twice.value(x, y, z) == once.value(x, y, z));
    }
}

TEST_CASE("scale consistency of the homogeneous family") {
    Kernel k = Kernel::homogeneous(2, 1.7, 0.8);
    const double expo = 2.0 + 1.7;
    Point x(0.0, 0.0);
    for (double s : {0.01, 0.1, 0.5}) {
        double v1 = k.eval(x, Point(s, 0.0));
        double v2 = k.eval(x, Point(2.0 * s, 0.0));
        CHECK(v2 == doctest::Approx(std::pow(2.0, -expo) * v1).epsilon(1e-12));
    }
}

TEST_CASE("verify_bounds: tight declaration has no violations, worst ratio 1") {
    Kernel k = Kernel::homogeneous(1, 1.5, 1.0);
    BoundReport report = verify_bounds(k, unit_interval(), 512, 42);
    CHECK(report.samples > 400);
    CHECK(report.violations.empty());
    CHECK(report.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.ratio_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.ratio_max == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("verify_bounds: modulated kernel inside declared range") {
    // g = 0.5 + 1.5 x1 y1 on (0,1)^2 stays within [0.5, 2]
    Kernel k = Kernel::modulated(1, 1.5, 1.0, Expression::parse("0.5 + 1.5*x1*y1"), 0.5, 2.0);
    BoundReport report = verify_bounds(k, unit_interval(), 512, 9);
    CHECK(report.violations.empty());
    CHECK(report.ratio_min >= 0.5 - 1e-12);
    CHECK(report.ratio_max <= 2.0 + 1e-12);
}

TEST_CASE("verify_bounds: falsely declared C0 is reported at every sample") {
    // brute-force sampling oracle: a unit homogeneous kernel has ratio 1
    // everywhere, so declaring C0 = 0.5 must flag every sampled pair
    auto raw = [](const Point&, const Point&, const Point& z) {
        return std::pow(norm(z), -2.5);
    };
    Kernel k = Kernel::custom(1, 1.5, raw, 0.25, 0.5);
    BoundReport report = verify_bounds(k, unit_interval(), 256, 4);
    CHECK(report.samples > 0);
    CHECK(static_cast<int>(report.violations.size()) == report.samples);
    CHECK(report.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("finite-difference smoothness spot check at random triples") {
    // derivative bound |d/dx1 k| <= C |z|^{-n-alpha-1}-ish sanity, 10 triples
    Kernel k = Kernel::modulated(1, 1.5, 1.0, Expression::parse("1 + x1/2"), 0.5, 2.0);
    CounterRng rng{23};
    const double eps = 1e-6;
    for (int i = 0; i < 10; ++i) {
        Point x(rng.uniform01(2 * i));
        Point y(rng.uniform01(2 * i + 1) + 1.1);
        double base = k.eval(x, y);
        double dx = (k.eval(Point(x[0] + eps), y) - k.eval(Point(x[0] - eps), y)) / (2 * eps);
        CHECK(std::isfinite(dx));
        CHECK(std::abs(dx) <= 10.0 * (base / distance(x, y) + base));
    }
}

TEST_CASE("modulation range estimate brackets the true range") {
    Expression g = Expression::parse("0.5 + 1.5*x1*y1");
    auto [lo, hi] = estimate_modulation_range(g, 1, {1.0, 1.0});
    CHECK(lo >= 0.5);
    CHECK(lo <= 0.52);
    CHECK(hi <= 2.0);
    CHECK(hi >= 1.9);
}
