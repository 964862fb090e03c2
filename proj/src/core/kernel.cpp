#include "kernel.hpp"

#include <atomic>
#include <limits>
#include <map>
#include <cmath>

#include "errors.hpp"

namespace nlch {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::atomic<std::uint64_t> next_custom_id{1};

void check_alpha(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0))
        fail_invalid("kernel order alpha must lie in (1,2), got " + std::to_string(alpha));
}

} // namespace

Kernel::Kernel(KernelFamily family, int dim, double alpha)
    : family_(family), dim_(dim), alpha_(alpha) {
    if (dim != 1 && dim != 2) fail_invalid("kernel dimension must be 1 or 2");
    check_alpha(alpha);
}

Kernel Kernel::homogeneous(int dim, double alpha, double amplitude) {
    Kernel k(KernelFamily::homogeneous, dim, alpha);
    if (amplitude <= 0.0) fail_invalid("kernel amplitude must be positive");
    k.amplitude_ = amplitude;
    k.c0_ = amplitude;
    k.C0_ = amplitude;
    return k;
}

Kernel Kernel::modulated(int dim, double alpha, double amplitude, Expression g, double c0,
                         double C0) {
    Kernel k(KernelFamily::modulated, dim, alpha);
    if (amplitude <= 0.0) fail_invalid("kernel amplitude must be positive");
    if (!(c0 > 0.0) || !(C0 >= c0)) fail_invalid("kernel bounds need 0 < c0 <= C0");
    k.amplitude_ = amplitude;
    k.modulation_ = std::make_shared<const Expression>(std::move(g));
    k.modulation_bound_ = k.modulation_->bind({"x1", "x2", "y1", "y2", "x", "y"});
    k.c0_ = c0;
    k.C0_ = C0;
    return k;
}

Kernel Kernel::custom(int dim, double alpha, RawFn fn, double c0, double C0) {
    Kernel k(KernelFamily::custom, dim, alpha);
    if (!fn) fail_invalid("custom kernel needs an evaluation function");
    if (!(c0 > 0.0) || !(C0 >= c0)) fail_invalid("kernel bounds need 0 < c0 <= C0");
    k.custom_fn_ = std::move(fn);
    k.c0_ = c0;
    k.C0_ = C0;
    k.custom_id_ = next_custom_id.fetch_add(1);
    return k;
}

double Kernel::raw(const Point& x, const Point& y, const Point& z) const {
    switch (family_) {
    case KernelFamily::homogeneous:
        return amplitude_ * std::pow(norm(z), -(dim_ + alpha_));
    case KernelFamily::modulated: {
        const double slots[6] = {x[0], x[1], y[0], y[1], x[0], y[0]};
        return amplitude_ * modulation_bound_.eval(slots) * std::pow(norm(z), -(dim_ + alpha_));
    }
    case KernelFamily::custom:
        return custom_fn_(x, y, z);
    }
    return 0.0;
}

double Kernel::value(const Point& x, const Point& y, const Point& z) const {
    if (norm(z) == 0.0) fail_invalid("kernel evaluated at z = 0 (singular)");
    if (!symmetrized_) return raw(x, y, z);
    return 0.5 * (raw(x, y, z) + raw(y, x, Point(-z[0], -z[1])));
}

double Kernel::eval(const Point& x, const Point& y) const {
    Point z = x - y;
    if (norm(z) == 0.0) fail_invalid("kernel evaluated at coincident points (singular)");
    return value(x, y, z);
}

Kernel Kernel::symmetrized() const {
    Kernel k = *this;
    k.symmetrized_ = true;
    return k;
}

std::uint64_t Kernel::hash() const {
    std::string desc = std::to_string(static_cast<int>(family_)) + "|" + std::to_string(dim_) +
                       "|" + std::to_string(alpha_) + "|" + std::to_string(amplitude_) + "|" +
                       (modulation_ ? modulation_->text() : std::string()) + "|" + std::to_string(symmetrized_) + "|" +
                       std::to_string(custom_id_);
    return fnv1a(desc);
}

std::pair<double, double> estimate_modulation_range(const Expression& g, int dim,
                                                    std::array<double, 2> extent,
                                                    int samples_per_axis) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    int ns = samples_per_axis;
    auto coord = [&](int k, double ext) { return (k + 0.5) * ext / ns; };
    std::map<std::string, double> vars;
    auto visit = [&](double x1, double x2, double y1, double y2) {
        vars = {{"x1", x1}, {"x2", x2}, {"y1", y1}, {"y2", y2}, {"x", x1}, {"y", y1}};
        double v = g.eval(vars);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    if (dim == 1) {
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < ns; ++j) visit(coord(i, extent[0]), 0.0, coord(j, extent[0]), 0.0);
    } else {
        int n2 = std::max(6, ns / 4);
        for (int i = 0; i < n2; ++i)
            for (int j = 0; j < n2; ++j)
                for (int k = 0; k < n2; ++k)
                    for (int l = 0; l < n2; ++l)
                        visit(coord(i, extent[0]), coord(j, extent[1]), coord(k, extent[0]),
                              coord(l, extent[1]));
    }
    return {lo, hi};
}

BoundReport verify_bounds(const Kernel& kernel, const Grid& domain, int sample_count,
                          std::uint64_t rng_seed) {
    if (sample_count < 1) fail_invalid("verify_bounds needs sample_count >= 1");
    if (kernel.dim() != domain.dim()) fail_invalid("kernel/grid dimension mismatch");

    const double smin = domain.max_spacing() / 10.0;
    const double smax = domain.diameter();
    int nscales = 1;
    for (double s = smax; s * 0.5 > smin; s *= 0.5) ++nscales;

    CounterRng rng{rng_seed};
    BoundReport report;
    report.ratio_min = std::numeric_limits<double>::infinity();
    report.ratio_max = -report.ratio_min;
    const double exponent = kernel.singular_exponent();
    const double slack = 1e-9;

    double worst_excess = -1.0;
    std::uint64_t k = 0;
    for (int s = 0; s < sample_count; ++s) {
        double scale = smax * std::pow(0.5, s % nscales);
        Point x, y;
        bool found = false;
        for (int attempt = 0; attempt < 400 && !found; ++attempt) {
            x[0] = rng.uniform01(k++) * domain.extent(0);
            if (domain.dim() == 2) x[1] = rng.uniform01(k++) * domain.extent(1);
            double dir0 = rng.sym(k++), dir1 = domain.dim() == 2 ? rng.sym(k++) : 0.0;
            double dn = std::hypot(dir0, dir1);
            if (dn == 0.0) continue;
            y[0] = x[0] + scale * dir0 / dn;
            y[1] = x[1] + scale * dir1 / dn;
            found = domain.contains(x) && domain.contains(y);
            if (!found && attempt % 40 == 39) scale *= 0.5; // long separations rarely fit
        }
        if (!found) continue;

        double v = kernel.eval(x, y);
        double ratio = v * std::pow(distance(x, y), exponent);
        ++report.samples;
        report.ratio_min = std::min(report.ratio_min, ratio);
        report.ratio_max = std::max(report.ratio_max, ratio);

        double excess = std::max(ratio / kernel.C0(), kernel.c0() / ratio);
        if (excess > worst_excess) {
            worst_excess = excess;
            report.worst_ratio = ratio;
        }
        bool ok = ratio >= kernel.c0() * (1.0 - slack) && ratio <= kernel.C0() * (1.0 + slack) &&
                  v > 0.0;
        if (!ok) report.violations.push_back({x, y, distance(x, y), ratio});
    }
    if (report.samples == 0) {
        report.ratio_min = 0.0;
        report.ratio_max = 0.0;
    }
    return report;
}

} // namespace nlch
