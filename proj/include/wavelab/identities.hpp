#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "wavelab/grid.hpp"
#include "wavelab/quadrature.hpp"
#include "wavelab/transform.hpp"

namespace wavelab {

/// Both sides of the exterior identity
///   int_{r0}^inf (d_r u)^2 r^2 dr = int_{r0}^inf (d_r v)^2 dr + r0 u(r0)^2,
/// computed independently. The caller asserts equality.
inline std::pair<double, double> exterior_identity(const RadialProfile& u0, double r0) {
    if (!(r0 > 0.0)) throw std::invalid_argument("exterior_identity: need r0 > 0");
    double lhs = quadrature(squared(derivative(u0)), Weight::R2, 0.0, r0, kInf);
    double uR = sample(u0, r0);
    double rhs = quadrature(squared(derivative(to_v(u0))), Weight::One, 0.0, r0, kInf)
               + r0 * uR * uR;
    return {lhs, rhs};
}

/// Strauss ratio  sup_{r>0} sqrt(r)|f(r)| / N_1(f); <= 1 in the
/// radial-normalized convention (the constant C of the pointwise bound).
inline double strauss_ratio(const RadialProfile& f) {
    double n1 = hdot_norm(f, 1.0);
    if (n1 == 0.0) throw std::runtime_error("strauss_ratio: N_1(f) = 0");
    double best = 0.0;
    for (int i = 1; i < f.grid.n; ++i) {
        double r = f.grid.node(i);
        best = std::max(best, std::sqrt(r) * std::abs(f.values[i]));
    }
    return best / n1;
}

/// Flat-core truncation Psi_R: (f~,g~) = (f,g) for r >= R, (f(R), 0) for
/// r <= R. R snaps to the nearest grid node, which makes the operation
/// exactly idempotent on sampled profiles; R below dr/2 is the identity.
inline std::pair<RadialProfile, RadialProfile>
psi_truncate(const RadialProfile& f, const RadialProfile& g, double R) {
    if (!(R >= 0.0) || R >= f.grid.r_max)
        throw std::invalid_argument("psi_truncate: R must lie inside the grid");
    const int jR = (int)std::llround(R / f.grid.dr());
    if (jR == 0) return {f, g};
    RadialProfile ft = f, gt = g;
    const double fR = f.values[jR];
    for (int i = 0; i <= jR; ++i) {
        ft.values[i] = fR;
        gt.values[i] = 0.0;
    }
    return {ft, gt};
}

/// Exterior smallness  delta = r0^{-(p-5)/(p-1)} int_{r0}^inf ((d_r u0)^2 + u1^2) r^2 dr.
inline double exterior_smallness(const RadialProfile& u0, const RadialProfile& u1,
                                 double r0, const Params& pr) {
    if (!(r0 > 0.0)) throw std::invalid_argument("exterior_smallness: need r0 > 0");
    double mass = quadrature(squared(derivative(u0)), Weight::R2, 0.0, r0, kInf)
                + quadrature(squared(u1), Weight::R2, 0.0, r0, kInf);
    return std::pow(r0, -(pr.p - 5.0) / (pr.p - 1.0)) * mass;
}

} // namespace wavelab
