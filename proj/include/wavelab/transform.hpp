#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wavelab/grid.hpp"
#include "wavelab/quadrature.hpp"

namespace wavelab {

/// Frequency-side samples of the half-line sine transform
///   V(xi) = int_0^inf v(r) sin(xi r) dr.
struct SineTransform {
    std::vector<double> xi;   // xi_k = k*dxi, k = 1..m
    std::vector<double> V;
    double dxi = 0.0;
};

/// Sine transform of v on the conjugate DST grid xi_k = k*pi/(m*n*dr),
/// k = 1..m*n (refine = m; the refined grid keeps the discrete Plancherel
/// identity exact while resolving fractional-weight integrals).
/// Requires v(0) = 0 within tol (odd extension must be valid).
inline SineTransform sine_transform(const RadialProfile& v, int refine = 2,
                                    double v0_tol = 1e-9) {
    const int n = v.grid.n;
    const double dr = v.grid.dr();
    double scale = 0.0;
    for (double x : v.values) scale = std::max(scale, std::abs(x));
    if (std::abs(v.values[0]) > v0_tol * (scale + 1.0))
        throw std::runtime_error("sine_transform: v(0) != 0, odd extension invalid");

    const int m = refine * n;
    SineTransform out;
    out.dxi = M_PI / (m * dr);
    out.xi.resize(m);
    out.V.assign(m, 0.0);
    // sin(xi_k r_j) via the Chebyshev three-term recurrence per frequency row
    for (int k = 1; k <= m; ++k) {
        const double th = M_PI * k / m;   // xi_k * dr
        const double c2 = 2.0 * std::cos(th);
        double s_prev = 0.0, s_cur = std::sin(th);
        double acc = 0.0;
        for (int j = 1; j < n; ++j) {
            acc += v.values[j] * s_cur;
            double s_next = c2 * s_cur - s_prev;
            s_prev = s_cur;
            s_cur = s_next;
        }
        out.xi[k - 1] = k * out.dxi;
        out.V[k - 1] = acc * dr;
    }
    return out;
}

/// Radial-normalized homogeneous Sobolev norm:
///   N_s(f)^2 = (2/pi) int_0^inf xi^{2s} V(xi)^2 dxi,  V = sine_transform(r f).
/// N_0(f)^2 = int f^2 r^2 dr and N_1(f)^2 = int (d_r(r f))^2 dr by Plancherel.
/// Errors out when the frequency tail (top octave) carries more than 1% of
/// the total, i.e. the grid under-resolves f.
inline double hdot_norm(const RadialProfile& f, double s, int refine = 2) {
    if (s < 0.0 || s > 2.0) throw std::invalid_argument("hdot_norm: need 0 <= s <= 2");
    SineTransform T = sine_transform(to_v(f), refine);
    double total = 0.0, tail = 0.0;
    const double xi_half = T.xi.back() / 2.0;
    for (size_t k = 0; k < T.xi.size(); ++k) {
        double term = std::pow(T.xi[k], 2.0 * s) * T.V[k] * T.V[k];
        total += term;
        if (T.xi[k] > xi_half) tail += term;
    }
    total *= 2.0 / M_PI * T.dxi;
    tail *= 2.0 / M_PI * T.dxi;
    if (total > 0.0 && tail > 0.01 * total)
        throw std::runtime_error("hdot_norm: frequency grid under-resolves f "
                                 "(top-octave share " + std::to_string(tail / total) + ")");
    return std::sqrt(total);
}

/// Critical-norm pair N_{s_p}(u), N_{s_p-1}(u_t).
struct CriticalNorm {
    double pos = 0.0;   // N_{s_p}(u)
    double vel = 0.0;   // N_{s_p-1}(u_t)
    double sum() const { return pos + vel; }
};

inline CriticalNorm critical_norm(const RadialProfile& u, const RadialProfile& ut,
                                  const Params& pr, int refine = 2) {
    CriticalNorm c;
    c.pos = hdot_norm(u, pr.s_p(), refine);
    c.vel = hdot_norm(ut, pr.s_p() - 1.0, refine);
    return c;
}

} // namespace wavelab
