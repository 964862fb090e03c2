// kernel.hpp -- admissible interaction kernels k(x,y,z), comparable to
// |z|^(-n-alpha) from both sides, with the pair symmetry k(x,y,z)=k(y,x,-z).
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "expression.hpp"
#include "geometry.hpp"

namespace nlch {

enum class KernelFamily { homogeneous, modulated, custom };

class Kernel {
public:
    using RawFn = std::function<double(const Point&, const Point&, const Point&)>;

    // k = amplitude * |z|^(-n-alpha); bounds c0 = C0 = amplitude.
    static Kernel homogeneous(int dim, double alpha, double amplitude);

    // k = amplitude * g(x,y) * |z|^(-n-alpha). The declared bounds must cover
    // amplitude*g over the domain of use; estimate_modulation_range helps.
    static Kernel modulated(int dim, double alpha, double amplitude, Expression g,
                            double c0, double C0);

    // User kernel with self-declared singularity bounds.
    static Kernel custom(int dim, double alpha, RawFn fn, double c0, double C0);

    double value(const Point& x, const Point& y, const Point& z) const;
    double eval(const Point& x, const Point& y) const;

    // (k(x,y,z) + k(y,x,-z)) / 2, exactly symmetric by construction.
    Kernel symmetrized() const;

    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    double amplitude() const { return amplitude_; }
    double singular_exponent() const { return dim_ + alpha_; }
    double c0() const { return c0_; }
    double C0() const { return C0_; }
    KernelFamily family() const { return family_; }
    bool is_symmetrized() const { return symmetrized_; }

    // Homogeneous kernels depend on z only; assemblies exploit this.
    bool translation_invariant() const {
        return family_ == KernelFamily::homogeneous;
    }

    std::uint64_t hash() const;

private:
    Kernel(KernelFamily family, int dim, double alpha);

    double raw(const Point& x, const Point& y, const Point& z) const;

    KernelFamily family_;
    int dim_;
    double alpha_;
    double amplitude_ = 1.0;
    std::shared_ptr<const Expression> modulation_;
    Expression::Bound modulation_bound_;
    RawFn custom_fn_;
    double c0_ = 1.0;
    double C0_ = 1.0;
    bool symmetrized_ = false;
    std::uint64_t custom_id_ = 0;
};

// Range of amplitude*g(x,y) over box^2, sampled densely; used to derive the
// declared bounds of config-built modulated kernels.
std::pair<double, double> estimate_modulation_range(const Expression& g, int dim,
                                                    std::array<double, 2> extent,
                                                    int samples_per_axis = 48);

struct BoundViolation {
    Point x, y;
    double separation;
    double ratio; // k * |z|^(n+alpha)
};

struct BoundReport {
    std::vector<BoundViolation> violations;
    double worst_ratio = 1.0; // sampled ratio farthest outside [c0, C0]
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    int samples = 0;
};

// Samples pairs across dyadic separation scales in [h/10, diam(domain)] and
// audits the declared two-sided bound. Report-only, never throws on violations.
BoundReport verify_bounds(const Kernel& kernel, const Grid& domain, int sample_count,
                          std::uint64_t rng_seed);

} // namespace nlch
