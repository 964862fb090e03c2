// potential.hpp -- Helmholtz free energy density f on [a,b] and its convex
// split f(s) = phi(s) - (d/2) s^2.
#pragma once

#include <optional>
#include <vector>

namespace nlch {

enum class PotentialFamily { logarithmic, polynomial };

// Value triple for f or phi. Values outside the natural domain are flagged
// through infinities: f = +inf outside [a,b]; at the endpoints of the
// logarithmic family f stays finite while df carries the one-sided infinity.
struct PotentialValues {
    double f = 0.0;
    double df = 0.0;
    double ddf = 0.0;
    bool finite() const;
};

class Potential {
public:
    // f(c) = (T_abs/2)[(1+c)ln(1+c) + (1-c)ln(1-c)] - (T_crit/2) c^2 on [-1,1].
    static Potential logarithmic(double T_abs, double T_crit,
                                 std::optional<double> d_override = std::nullopt);

    // f(s) = sum_k coeffs[k] s^k restricted to [a,b].
    static Potential polynomial(std::vector<double> coeffs, double a, double b,
                                std::optional<double> d_override = std::nullopt);

    PotentialValues eval_f(double s) const;   // total function via markers
    PotentialValues eval_phi(double s) const; // throws outside (a,b)

    double a() const { return a_; }
    double b() const { return b_; }
    double split_constant() const { return d_; }
    double T_abs() const { return T_abs_; }
    double T_crit() const { return T_crit_; }
    PotentialFamily family() const { return family_; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    // Smallest d >= 0 with f'' + d >= 0 on (a,b). The logarithmic family has
    // the closed form max(0, T_crit - T_abs); polynomials are minimized by
    // dense sampling plus local ternary refinement.
    static double compute_split_constant(const Potential& p);

private:
    Potential() = default;

    PotentialFamily family_ = PotentialFamily::logarithmic;
    double a_ = -1.0, b_ = 1.0;
    double T_abs_ = 1.0, T_crit_ = 1.0;
    std::vector<double> coeffs_;
    double d_ = 0.0;
};

} // namespace nlch
