#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wavelab/params.hpp"

namespace wavelab {

/// Uniform radial grid r_i = i*dr on [0, r_max], origin included.
struct RadialGrid {
    double r_max = 1.0;
    int n = 16;

    RadialGrid() = default;
    RadialGrid(double r_max_, int n_) : r_max(r_max_), n(n_) {
        if (!(r_max > 0.0)) throw std::invalid_argument("RadialGrid: r_max must be > 0");
        if (n < 16) throw std::invalid_argument("RadialGrid: need n >= 16");
    }

    double dr() const { return r_max / (n - 1); }
    double node(int i) const { return i * dr(); }
    bool operator==(const RadialGrid& o) const { return r_max == o.r_max && n == o.n; }
};

/// Decay model attached to a profile, used to close integrals beyond r_max.
struct DecayClass {
    enum Kind { Compact, Algebraic } kind = Compact;
    double support_radius = 0.0;     // Compact: values vanish beyond this radius
    double tail_exponent = 0.0;      // Algebraic: f(r) ~ tail_coefficient * r^{-tail_exponent}
    double tail_coefficient = 0.0;

    static DecayClass compact(double radius) {
        DecayClass d; d.kind = Compact; d.support_radius = radius; return d;
    }
    static DecayClass algebraic(double exponent, double coefficient) {
        DecayClass d; d.kind = Algebraic; d.tail_exponent = exponent; d.tail_coefficient = coefficient;
        return d;
    }
};

/// Sampled radial function, the carrier for u, v = r*u, Z_l, w.
struct RadialProfile {
    RadialGrid grid;
    std::vector<double> values;
    DecayClass decay;

    RadialProfile() = default;
    RadialProfile(RadialGrid g, std::vector<double> vals, DecayClass d = DecayClass{})
        : grid(g), values(std::move(vals)), decay(d) {
        if ((int)values.size() != grid.n)
            throw std::invalid_argument("RadialProfile: values size != grid.n");
    }

    static RadialProfile zeros(RadialGrid g) {
        return RadialProfile(g, std::vector<double>(g.n, 0.0), DecayClass::compact(0.0));
    }

    template <class F>
    static RadialProfile from_function(RadialGrid g, F&& f, DecayClass d = DecayClass{}) {
        std::vector<double> v(g.n);
        for (int i = 0; i < g.n; ++i) v[i] = f(g.node(i));
        return RadialProfile(g, std::move(v), d);
    }

    double tail_value(double r) const {
        if (decay.kind == DecayClass::Compact) return 0.0;
        return decay.tail_coefficient * std::pow(r, -decay.tail_exponent);
    }
};

/// Cubic Lagrange interpolation of grid samples; uses the analytic tail beyond r_max.
inline double sample(const RadialProfile& f, double r) {
    const auto& g = f.grid;
    const double dr = g.dr();
    if (r >= g.r_max) {
        if (r == g.r_max) return f.values.back();
        return f.tail_value(r);
    }
    if (r <= 0.0) return f.values.front();
    int j = (int)(r / dr);
    j = std::clamp(j, 1, g.n - 3);
    double t = r / dr - j;
    const double* y = f.values.data() + (j - 1);
    return -t * (t - 1.0) * (t - 2.0) / 6.0 * y[0]
         + (t * t - 1.0) * (t - 2.0) / 2.0 * y[1]
         - t * (t + 1.0) * (t - 2.0) / 2.0 * y[2]
         + t * (t * t - 1.0) / 6.0 * y[3];
}

/// 4th-order first derivative: central in the interior, one-sided at the ends.
inline std::vector<double> derivative4(const std::vector<double>& f, double dx) {
    const int n = (int)f.size();
    assert(n >= 5);
    std::vector<double> g(n);
    for (int i = 2; i < n - 2; ++i)
        g[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dx);
    g[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * dx);
    g[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * dx);
    g[n - 2] = -(-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]) / (12.0 * dx);
    g[n - 1] = -(-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]) / (12.0 * dx);
    return g;
}

inline RadialProfile derivative(const RadialProfile& f) {
    RadialProfile d(f.grid, derivative4(f.values, f.grid.dr()), f.decay);
    if (f.decay.kind == DecayClass::Algebraic) {
        d.decay = DecayClass::algebraic(f.decay.tail_exponent + 1.0,
                                        -f.decay.tail_exponent * f.decay.tail_coefficient);
    }
    return d;
}

/// v = r*u with the matching tail model.
inline RadialProfile to_v(const RadialProfile& u) {
    RadialProfile v = u;
    for (int i = 0; i < u.grid.n; ++i) v.values[i] = u.grid.node(i) * u.values[i];
    if (u.decay.kind == DecayClass::Algebraic)
        v.decay = DecayClass::algebraic(u.decay.tail_exponent - 1.0, u.decay.tail_coefficient);
    return v;
}

/// u = v/r; the origin value is the limit v'(0).
inline RadialProfile to_u(const RadialProfile& v) {
    RadialProfile u = v;
    const double dr = v.grid.dr();
    for (int i = 1; i < v.grid.n; ++i) u.values[i] = v.values[i] / v.grid.node(i);
    const double* y = v.values.data();
    u.values[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * dr);
    if (v.decay.kind == DecayClass::Algebraic)
        u.decay = DecayClass::algebraic(v.decay.tail_exponent + 1.0, v.decay.tail_coefficient);
    return u;
}

/// Pointwise square, with the squared tail model.
inline RadialProfile squared(const RadialProfile& f) {
    RadialProfile s = f;
    for (auto& x : s.values) x *= x;
    if (f.decay.kind == DecayClass::Algebraic)
        s.decay = DecayClass::algebraic(2.0 * f.decay.tail_exponent,
                                        f.decay.tail_coefficient * f.decay.tail_coefficient);
    return s;
}

/// A (u, du/dt) snapshot; both profiles share one grid.
struct StatePair {
    RadialProfile u;
    RadialProfile ut;
    Params params;
    double time = 0.0;

    StatePair() = default;
    StatePair(RadialProfile u_, RadialProfile ut_, Params pr, double t = 0.0)
        : u(std::move(u_)), ut(std::move(ut_)), params(pr), time(t) {
        if (!(u.grid == ut.grid))
            throw std::invalid_argument("StatePair: u and ut must share one grid");
    }
};

} // namespace wavelab
