#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavelab {

/// Equation parameters for  u_tt - Lap(u) = sign*|u|^{p-1}u  in radial 3D.
/// Derived exponents are fixed by p:
///   s_p   = 3/2 - 2/(p-1)      (critical Sobolev regularity)
///   q_p   = 3(p-1)/2           (critical Lebesgue exponent)
///   alpha = 2/(p-1) - 1        (self-similar weight exponent)
struct Params {
    double p = 7.0;
    double sign = +1.0;   // +1 focusing, -1 defocusing

    Params() = default;
    Params(double p_, double sign_) : p(p_), sign(sign_) {
        if (!(p > 1.0))
            throw std::invalid_argument("Params: need p > 1, got " + std::to_string(p_));
        if (sign != 1.0 && sign != -1.0)
            throw std::invalid_argument("Params: sign must be +1 or -1");
    }

    double s_p() const { return 1.5 - 2.0 / (p - 1.0); }
    double q_p() const { return 3.0 * (p - 1.0) / 2.0; }
    double alpha() const { return 2.0 / (p - 1.0) - 1.0; }

    /// Exponent of the ODE blow-up solution  c_p (T-t)^{-2/(p-1)}.
    double a_blowup() const { return 2.0 / (p - 1.0); }

    /// Amplitude constant of the ODE blow-up: c_p^{p-1} = 2(p+1)/(p-1)^2.
    double c_p() const {
        return std::pow(2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)), 1.0 / (p - 1.0));
    }

    bool supercritical() const { return p > 5.0; }
};

inline Params focusing(double p) { return Params(p, +1.0); }
inline Params defocusing(double p) { return Params(p, -1.0); }

/// Quintic smoothstep: 0 for t<=0, 1 for t>=1, C^2 across both ends.
inline double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

inline double smoothstep_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t - 60.0 * t * t * t + 30.0 * t * t * t * t;
}

/// Cutoff of the auxiliary Cauchy problems: 0 on [0, 1/4], 1 on [1/2, inf).
inline double chi_cutoff(double r_over_r0) {
    return smoothstep((r_over_r0 - 0.25) / 0.25);
}

} // namespace wavelab
