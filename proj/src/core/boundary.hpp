// boundary.hpp -- emergent boundary condition probes: the kernel-dependent
// direction vector n_{x0} by delta -> 0 extrapolation, the asymptotic-order
// law of the half-ball double integral I_r, and the Neumann defect
// grad(u) . n_{x0} of steady solutions at boundary points.
//
// Probes run on dedicated locally refined uniform patches in a frame attached
// to the boundary point: component 0 is tangential, component 1 points into
// the domain. Physical coordinates (for modulated kernels) are x0 + offset.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "geometry.hpp"
#include "kernel.hpp"
#include "neumann.hpp"

namespace nlch {

// max(0, 1 - |x - x0| / delta) sampled at cell centers. delta must resolve:
// delta >= 3 max_spacing.
Vec cone_test_function(const Grid& grid, const Point& x0, double delta);

struct ProbeOptions {
    int resolution = 8;       // cells per smallest delta (>= 4)
    double truncation = 10.0; // patch radius in units of delta_max
    int refinement = 4;       // near-pair subcell order
};

struct LadderFit {
    Eigen::Vector2d extrapolated = Eigen::Vector2d::Zero();
    double fitted_exponent = 0.0;
    bool converged = false;
    double last_variation = 0.0; // relative change between the last two rungs
};

// Richardson extrapolation of a geometric delta ladder assuming a leading
// O(delta^beta) correction with beta fitted from the last three rungs. The
// converged flag requires the last two rungs to agree within 10%.
LadderFit fit_ladder(const std::vector<double>& deltas,
                     const std::vector<Eigen::Vector2d>& values);

struct DirectionProbe {
    std::vector<double> deltas;
    std::vector<Eigen::Vector2d> vectors; // delta^{alpha-1-n} * double integral
    Eigen::Vector2d extrapolated = Eigen::Vector2d::Zero();
    Eigen::Vector2d direction = Eigen::Vector2d::Zero(); // unit, zero if inconclusive
    double fitted_exponent = 0.0;
    bool converged = false;
    double last_variation = 0.0;
};

// n = 2 probe of the limit defining n_{x0}. For n = 1 the convention is
// n_{x0} = 1 and no quadrature is needed.
DirectionProbe direction_vector(const Kernel& kernel, const Point& x0,
                                const std::vector<double>& ladder,
                                const ProbeOptions& options = {});

struct ExponentFit {
    std::vector<double> deltas;
    std::vector<double> integrals;
    double slope = 0.0;     // least-squares fit of log I_r against log delta
    double predicted = 0.0; // 1 + r + 2n
};

// I_r(delta) = int int over the half-ball pair of |x-y|^r | |x-x0| - |y-x0| |.
// Requires r > -1-n and at least 3 rungs.
ExponentFit halfball_integral_exponent(int dim, double r, const std::vector<double>& ladder,
                                    const ProbeOptions& options = {});

enum class Face { x_lo, x_hi, y_lo, y_hi };

// One-sided second-order gradient at the boundary point dotted with n. `along`
// is the coordinate along the face (ignored in 1D). n is given in physical
// axes.
double neumann_defect(const Grid& grid, const Vec& u, Face face, double along,
                      const Eigen::Vector2d& n_x0);

} // namespace nlch
