#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "wavelab/grid.hpp"

namespace wavelab {

/// Composite Simpson for a callable on [a,b] with npanels (even) subdivisions.
template <class F>
double simpson(F&& f, double a, double b, int npanels) {
    if (b <= a) return 0.0;
    if (npanels % 2) ++npanels;
    const double h = (b - a) / npanels;
    double s = f(a) + f(b);
    for (int i = 1; i < npanels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Composite Simpson over uniformly sampled values (odd count preferred;
/// an even count closes the last cell with a 3-point quadratic rule).
inline double simpson_samples(const std::vector<double>& f, double dx) {
    const int n = (int)f.size();
    if (n < 2) return 0.0;
    int m = (n % 2) ? n : n - 1;
    double s = f[0] + f[m - 1];
    for (int i = 1; i < m - 1; ++i) s += f[i] * (i % 2 ? 4.0 : 2.0);
    s *= dx / 3.0;
    if (m != n) s += dx / 12.0 * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]);
    return s;
}

enum class Weight { One, R2, SingularR2 };  // 1, r^2, (1-r^2)^beta r^2

/// Integral of f(r)*weight(r) over [a,b] for a callable f.
/// The (1-r^2)^beta weight with beta in (-1,0) is handled by a geometric
/// subdivision of the cell nearest r=1, graded down to width 1e-10.
template <class F>
double weighted_integral(F&& f, Weight w, double beta, double a, double b,
                         int npanels = 2048) {
    auto g = [&](double r) -> double {
        switch (w) {
            case Weight::One: return f(r);
            case Weight::R2: return f(r) * r * r;
            case Weight::SingularR2: {
                double q = 1.0 - r * r;
                return f(r) * std::pow(q, beta) * r * r;
            }
        }
        return 0.0;
    };
    if (w != Weight::SingularR2 || b < 1.0 - 1e-6) return simpson(g, a, b, npanels);
    if (beta <= -1.0 && std::abs(f(1.0 - 1e-8)) > 1e-12)
        throw std::runtime_error("weighted_integral: non-integrable weight, beta <= -1 "
                                 "with nonvanishing integrand at r = 1");
    // regular part up to the graded zone, then geometric refinement toward b
    const double split = std::max(a, b - 0.05 * (b - a));
    double total = simpson(g, a, split, npanels);
    double lo = split;
    double width = b - lo;
    while (width > 1e-10) {
        double hi = b - width / 2.0;
        total += simpson(g, lo, hi, 32);
        lo = hi;
        width = b - lo;
    }
    // closed-form closure of the residual sliver, integrand frozen at its edge
    if (beta > -1.0) {
        double q = 1.0 - lo * lo;
        total += f(lo) * lo * lo * std::pow(q, beta + 1.0) / (2.0 * lo * (beta + 1.0));
    }
    return total;
}

/// Spec-level quadrature of a sampled profile against {1, r^2, (1-r^2)^beta r^2}
/// on [a,b]; b may exceed r_max, in which case the analytic tail model closes
/// the remainder (Weight::One and Weight::R2 only).
inline double quadrature(const RadialProfile& f, Weight w, double beta,
                         double a, double b, int npanels = 4096) {
    if (b <= a) return 0.0;
    const double rmax = f.grid.r_max;
    double head = weighted_integral([&](double r) { return sample(f, r); },
                                    w, beta, a, std::min(b, rmax), npanels);
    if (b <= rmax) return head;
    if (f.decay.kind == DecayClass::Compact) return head;
    if (w == Weight::SingularR2)
        throw std::runtime_error("quadrature: singular weight beyond grid not supported");
    // tail:  c * r^{-k} * weight, integrated [rmax, b]
    const double c = f.decay.tail_coefficient;
    const double k = f.decay.tail_exponent;
    const double pw = (w == Weight::R2) ? 2.0 : 0.0;
    const double e = pw - k;   // integrand ~ c r^e
    if (e >= -1.0 && c != 0.0)
        throw std::runtime_error("quadrature: tail does not decay fast enough to integrate");
    auto prim = [&](double r) { return c * std::pow(r, e + 1.0) / (e + 1.0); };
    const double hi = std::isinf(b) ? 0.0 : prim(b);
    return head + hi - prim(rmax);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace wavelab
