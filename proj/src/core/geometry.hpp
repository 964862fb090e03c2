// geometry.hpp -- uniform cell-centered grids on intervals and rectangles
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace nlch {

struct Point {
    std::array<double, 2> v{0.0, 0.0};

    Point() = default;
    Point(double x) : v{x, 0.0} {}
    Point(double x, double y) : v{x, y} {}

    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
};

inline Point operator-(const Point& a, const Point& b) { return {a.v[0] - b.v[0], a.v[1] - b.v[1]}; }
inline Point operator+(const Point& a, const Point& b) { return {a.v[0] + b.v[0], a.v[1] + b.v[1]}; }

inline double norm(const Point& p) { return std::hypot(p.v[0], p.v[1]); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

// Uniform cell-centered mesh of (0,Lx) or (0,Lx)x(0,Ly). Cell i has center
// ((ix+1/2)hx, (iy+1/2)hy) with row-major index i = iy*nx + ix.
class Grid {
public:
    static constexpr int default_max_cells = 65536;

    Grid(int dim, std::array<double, 2> extent, std::array<int, 2> cells,
         int max_cells = default_max_cells);

    int dim() const { return dim_; }
    int cells(int axis) const { return cells_[static_cast<std::size_t>(axis)]; }
    int size() const { return total_; }
    double extent(int axis) const { return extent_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
    double max_spacing() const { return dim_ == 1 ? h_[0] : std::max(h_[0], h_[1]); }
    double cell_volume() const { return volume_; }
    double domain_volume() const { return extent_[0] * (dim_ == 2 ? extent_[1] : 1.0); }
    double diameter() const {
        return dim_ == 1 ? extent_[0] : std::hypot(extent_[0], extent_[1]);
    }

    int index(int ix, int iy = 0) const { return iy * cells_[0] + ix; }
    int ix_of(int i) const { return i % cells_[0]; }
    int iy_of(int i) const { return i / cells_[0]; }

    Point center(int i) const {
        Point p((ix_of(i) + 0.5) * h_[0]);
        if (dim_ == 2) p[1] = (iy_of(i) + 0.5) * h_[1];
        return p;
    }

    bool contains(const Point& p) const {
        if (p[0] <= 0.0 || p[0] >= extent_[0]) return false;
        if (dim_ == 2 && (p[1] <= 0.0 || p[1] >= extent_[1])) return false;
        return true;
    }

    std::uint64_t hash() const;

private:
    int dim_;
    std::array<double, 2> extent_;
    std::array<int, 2> cells_;
    std::array<double, 2> h_;
    int total_;
    double volume_;
};

// Counter-based deterministic generator: value k of stream `seed` is a pure
// function of (seed, k), so initial data are reproducible bit for bit.
struct CounterRng {
    std::uint64_t seed;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t k) const { return mix(mix(seed) ^ mix(k * 0x2545f4914f6cdd1dULL + 0x632be59bd9b4e019ULL)); }

    // uniform in [0,1)
    double uniform01(std::uint64_t k) const {
        return static_cast<double>(bits(k) >> 11) * 0x1.0p-53;
    }
    // uniform in (-1,1)
    double sym(std::uint64_t k) const { return 2.0 * uniform01(k) - 1.0; }
};

} // namespace nlch
