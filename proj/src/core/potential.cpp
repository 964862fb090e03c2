#include "potential.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace nlch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// f, f', f'' of the polynomial sum_k c_k s^k by Horner.
void horner3(const std::vector<double>& c, double s, double& f, double& df, double& ddf) {
    f = 0.0;
    df = 0.0;
    ddf = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
        ddf = ddf * s + 2.0 * df;
        df = df * s + f;
        f = f * s + c[k];
    }
}

} // namespace

bool PotentialValues::finite() const {
    return std::isfinite(f) && std::isfinite(df) && std::isfinite(ddf);
}

Potential Potential::logarithmic(double T_abs, double T_crit, std::optional<double> d_override) {
    if (T_abs <= 0.0 || T_crit <= 0.0) fail_invalid("potential temperatures must be positive");
    Potential p;
    p.family_ = PotentialFamily::logarithmic;
    p.a_ = -1.0;
    p.b_ = 1.0;
    p.T_abs_ = T_abs;
    p.T_crit_ = T_crit;
    p.d_ = d_override ? *d_override : compute_split_constant(p);
    if (p.d_ < 0.0) fail_invalid("split constant d must be nonnegative");
    return p;
}

Potential Potential::polynomial(std::vector<double> coeffs, double a, double b,
                                std::optional<double> d_override) {
    if (coeffs.empty()) fail_invalid("polynomial potential needs coefficients");
    if (!(a < 0.0 && 0.0 < b)) fail_invalid("potential interval must satisfy a < 0 < b");
    Potential p;
    p.family_ = PotentialFamily::polynomial;
    p.a_ = a;
    p.b_ = b;
    p.coeffs_ = std::move(coeffs);
    p.d_ = d_override ? *d_override : compute_split_constant(p);
    if (p.d_ < 0.0) fail_invalid("split constant d must be nonnegative");
    return p;
}

PotentialValues Potential::eval_f(double s) const {
    PotentialValues v;
    if (s < a_ || s > b_) {
        v.f = kInf;
        v.df = kInf;
        v.ddf = kInf;
        return v;
    }
    if (family_ == PotentialFamily::logarithmic) {
        if (s == a_ || s == b_) {
            // finite limit of f, one-sided blow-up of f'
            v.f = T_abs_ * std::log(2.0) - 0.5 * T_crit_;
            v.df = (s == b_) ? kInf : -kInf;
            v.ddf = kInf;
            return v;
        }
        const double p = 1.0 + s, q = 1.0 - s;
        v.f = 0.5 * T_abs_ * (p * std::log(p) + q * std::log(q)) - 0.5 * T_crit_ * s * s;
        v.df = 0.5 * T_abs_ * (std::log(p) - std::log(q)) - T_crit_ * s;
        v.ddf = T_abs_ / (p * q) - T_crit_;
        return v;
    }
    horner3(coeffs_, s, v.f, v.df, v.ddf);
    return v;
}

PotentialValues Potential::eval_phi(double s) const {
    if (!(s > a_ && s < b_))
        fail_invalid("eval_phi: s = " + std::to_string(s) + " outside the open interval (" +
                     std::to_string(a_) + "," + std::to_string(b_) + ")");
    PotentialValues v = eval_f(s);
    v.f += 0.5 * d_ * s * s;
    v.df += d_ * s;
    v.ddf += d_;
    return v;
}

double Potential::compute_split_constant(const Potential& p) {
    if (p.family_ == PotentialFamily::logarithmic) {
        // inf f'' over (-1,1) is attained at s = 0 and equals T_abs - T_crit.
        return std::max(0.0, p.T_crit_ - p.T_abs_);
    }
    // Dense scan of f'' over [a,b], then ternary refinement around the grossest
    // minimum. f'' of a polynomial is continuous, so this is reliable.
    const int n = 200001;
    double best_s = p.a_;
    double best = kInf;
    for (int i = 0; i < n; ++i) {
        double s = p.a_ + (p.b_ - p.a_) * i / (n - 1);
        double f, df, ddf;
        horner3(p.coeffs_, s, f, df, ddf);
        if (ddf < best) {
            best = ddf;
            best_s = s;
        }
    }
    if (!std::isfinite(best)) fail_invalid("potential has f'' unbounded below (inadmissible)");
    double step = (p.b_ - p.a_) / (n - 1);
    double lo = std::max(p.a_, best_s - step), hi = std::min(p.b_, best_s + step);
    for (int it = 0; it < 200; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        double f, df, d1, d2;
        horner3(p.coeffs_, m1, f, df, d1);
        horner3(p.coeffs_, m2, f, df, d2);
        if (d1 < d2)
            hi = m2;
        else
            lo = m1;
    }
    double f, df, ddf;
    horner3(p.coeffs_, 0.5 * (lo + hi), f, df, ddf);
    best = std::min(best, ddf);
    return std::max(0.0, -best);
}

} // namespace nlch
