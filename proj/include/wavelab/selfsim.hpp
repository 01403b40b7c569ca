#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wavelab/evolve.hpp"
#include "wavelab/grid.hpp"
#include "wavelab/quadrature.hpp"

namespace wavelab {

/// Optional smooth cone restriction applied by to_selfsim: multiply by
/// zeta(eta), eta = y/(1 - delta e^s), with zeta = 1 on [0, eta1] and 0
/// beyond eta2 (quintic in between). This enforces the support law
/// supp w(.,s) in {y <= eta2 (1 - delta e^s)} and keeps the dissipation
/// weight (1-y^2)^{alpha-1} integrable; without it no numerically evolved
/// trace satisfies the shrinking-support condition.
struct ConeWindow {
    bool enabled = false;
    double eta1 = 0.5;
    double eta2 = 0.9;

    static ConeWindow none() { return ConeWindow{}; }
    static ConeWindow cone(double e1 = 0.5, double e2 = 0.9) {
        ConeWindow w; w.enabled = true; w.eta1 = e1; w.eta2 = e2; return w;
    }
    double value(double eta) const {
        if (!enabled) return 1.0;
        return 1.0 - smoothstep((eta - eta1) / (eta2 - eta1));
    }
    double deriv(double eta) const {
        if (!enabled) return 0.0;
        return -smoothstep_deriv((eta - eta1) / (eta2 - eta1)) / (eta2 - eta1);
    }
};

/// Samples of (w_delta, d_s w_delta, d_y w_delta) on y in [0,1) per s.
struct SelfSimilarFrame {
    double delta = 0.0;
    double alpha = 0.0;
    double p = 7.0;
    double T_plus = 1.0;
    ConeWindow window;
    std::vector<double> s_grid;
    std::vector<double> y;          // uniform on [0, 1)
    std::vector<std::vector<double>> w, wy, ws;
    std::vector<double> support;    // support radius of w(.,s) in y

    double dy() const { return y[1] - y[0]; }
};

/// Self-similar change of variables of an evolved trace:
///   w_delta(y,s) = e^{-2s/(p-1)} u~(e^{-s} y, 1 + delta - e^{-s}),
/// where u~ is the trace solution rescaled so that T_plus = 1
/// (u~(x,t) = T^{2/(p-1)} u(Tx, Tt)). d_s w is assembled from the chain
/// rule on the stored (u, u_t, u_r), never by differencing across s.
inline SelfSimilarFrame to_selfsim(const EvolutionTrace& tr, double T_plus, double delta,
                                   const std::vector<double>& s_grid, int ny = 2049,
                                   ConeWindow window = ConeWindow::none()) {
    if (delta < 0.0) throw std::invalid_argument("to_selfsim: need delta >= 0");
    const Params& pr = tr.params;
    const double a = pr.a_blowup();
    SelfSimilarFrame fr;
    fr.delta = delta;
    fr.alpha = pr.alpha();
    fr.p = pr.p;
    fr.T_plus = T_plus;
    fr.window = window;
    fr.s_grid = s_grid;
    fr.y.resize(ny);
    const double dy = (1.0 - 1e-12) / (ny - 1);
    for (int i = 0; i < ny; ++i) fr.y[i] = i * dy;

    const double dr = tr.grid.dr();
    std::vector<double> v, vt;
    for (double s : s_grid) {
        if (delta > 0.0 && s >= -std::log(delta))
            throw std::invalid_argument("to_selfsim: need s < -log(delta)");
        const double es = std::exp(-s);
        const double t_orig = T_plus * (1.0 + delta - es);
        if (t_orig < -1e-12 || t_orig > tr.snap_times.back() + 1e-12)
            throw std::runtime_error("to_selfsim: trace does not cover s = " + std::to_string(s));
        tr.sample_state(std::max(t_orig, 0.0), v, vt);
        std::vector<double> dv = derivative4(v, dr);
        std::vector<double> dvt = derivative4(vt, dr);
        RadialProfile pv(tr.grid, v, DecayClass::compact(tr.grid.r_max));
        RadialProfile pvt(tr.grid, vt, DecayClass::compact(tr.grid.r_max));
        RadialProfile pdv(tr.grid, dv, DecayClass::compact(tr.grid.r_max));
        RadialProfile pdvt(tr.grid, dvt, DecayClass::compact(tr.grid.r_max));

        const double L = 1.0 - delta / es;     // 1 - delta e^s
        const double e2s = std::exp(-a * s);
        const double Ta = std::pow(T_plus, a);
        std::vector<double> W(ny), Wy(ny), Ws(ny);
        for (int i = 0; i < ny; ++i) {
            const double yv = fr.y[i];
            const double x = T_plus * es * yv;   // original radius
            double u, ur, ut;
            if (x < 0.5 * dr) {
                u = pdv.values[0];
                ur = 0.0;
                ut = pdvt.values[0];
            } else {
                double vx = sample(pv, x), vtx = sample(pvt, x), dvx = sample(pdv, x);
                u = vx / x;
                ur = (dvx - u) / x;
                ut = vtx / x;
            }
            // normalized solution: u~ = T^a u, d_t u~ = T^{a+1} u_t, d_r u~ = T^{a+1} u_r
            const double un = Ta * u;
            const double unr = Ta * T_plus * ur;
            const double unt = Ta * T_plus * ut;
            const double eta = (L > 0.0) ? yv / L : 2.0;
            const double z = window.value(eta), zp = window.deriv(eta);
            W[i] = e2s * un * z;
            Wy[i] = e2s * (unr * es * z + un * zp / L);
            // chain rule (in the normalized variables) plus the window's own
            // s dependence through eta = y/L, dL/ds = -(1-L)... = -delta e^s
            const double c8 = -a * un + es * unt - es * yv * unr;
            const double detads = (delta > 0.0 && L > 0.0) ? eta * (delta / es) / L : 0.0;
            Ws[i] = e2s * (c8 * z + un * zp * detads);
        }
        // support radius in y
        double scale = 0.0;
        for (double x : W) scale = std::max(scale, std::abs(x));
        double supp = 0.0;
        for (int i = ny - 1; i >= 0; --i)
            if (std::abs(W[i]) > 1e-12 * (scale + 1.0)) { supp = fr.y[i]; break; }
        fr.support.push_back(supp);
        fr.w.push_back(std::move(W));
        fr.wy.push_back(std::move(Wy));
        fr.ws.push_back(std::move(Ws));
    }
    return fr;
}

namespace detail {

inline double interp_arr(const std::vector<double>& y, const std::vector<double>& f, double x) {
    const int n = (int)y.size();
    const double h = y[1] - y[0];
    int j = (int)(x / h);
    j = std::clamp(j, 1, n - 3);
    double t = x / h - j;
    return -t * (t - 1.0) * (t - 2.0) / 6.0 * f[j - 1]
         + (t * t - 1.0) * (t - 2.0) / 2.0 * f[j]
         - t * (t + 1.0) * (t - 2.0) / 2.0 * f[j + 1]
         + t * (t * t - 1.0) / 6.0 * f[j + 2];
}

} // namespace detail

/// The weighted Lyapunov energy in self-similar variables:
///   E~(s) = 1/2 int (1-r^2)^{alpha+1} (d_r w)^2 r^2
///         + 1/2 int (1-r^2)^{alpha} (d_s w)^2 r^2
///         + (p+1)/(p-1)^2 int (1-r^2)^{alpha} w^2 r^2
///         - 1/(p+1) int (1-r^2)^{alpha} |w|^{p+1} r^2.
/// The w^2 coefficient is (p+1)/(p-1)^2: this is the unique value for which
/// the equation in self-similar variables yields the dissipation identity
///   d/ds E~ = -2 alpha int (1-r^2)^{alpha-1} (d_s w)^2 r^2 dr.
inline double tilde_energy(const SelfSimilarFrame& fr, int si) {
    const double p = fr.p, al = fr.alpha;
    const auto& w = fr.w[si];
    const auto& wy = fr.wy[si];
    const auto& ws = fr.ws[si];
    auto term = [&](const std::vector<double>& f, double expo, double power) {
        return weighted_integral([&](double r) {
            double v = detail::interp_arr(fr.y, f, r);
            return std::pow(std::abs(v), power);
        }, Weight::SingularR2, expo, 0.0, 1.0, 4096);
    };
    return 0.5 * term(wy, al + 1.0, 2.0)
         + 0.5 * term(ws, al, 2.0)
         + (p + 1.0) / ((p - 1.0) * (p - 1.0)) * term(w, al, 2.0)
         - term(w, al, p + 1.0) / (p + 1.0);
}

/// Dissipation rate D(s) = -2 alpha int (1-r^2)^{alpha-1} (d_s w)^2 r^2 dr >= 0.
/// The weight exponent alpha - 1 <= -1, so the support of w must stay away
/// from y = 1 (windowed frames, or C2-compatible data); otherwise the
/// quadrature layer raises the non-integrable error.
inline double dissipation_rate(const SelfSimilarFrame& fr, int si) {
    const double al = fr.alpha;
    const auto& ws = fr.ws[si];
    return -2.0 * al * weighted_integral([&](double r) {
        double v = detail::interp_arr(fr.y, ws, r);
        return v * v;
    }, Weight::SingularR2, al - 1.0, 0.0, 1.0, 4096);
}

/// D(s) on the whole s grid plus the cumulative trapezoid integral.
struct DissipationSeries {
    std::vector<double> D;
    std::vector<double> cumulative;
};

inline DissipationSeries dissipation_series(const SelfSimilarFrame& fr) {
    DissipationSeries out;
    const int ns = (int)fr.s_grid.size();
    out.D.resize(ns);
    out.cumulative.assign(ns, 0.0);
    for (int i = 0; i < ns; ++i) out.D[i] = dissipation_rate(fr, i);
    for (int i = 1; i < ns; ++i)
        out.cumulative[i] = out.cumulative[i - 1]
            + 0.5 * (out.D[i] + out.D[i - 1]) * (fr.s_grid[i] - fr.s_grid[i - 1]);
    return out;
}

/// Sup-norm residual of the stationary self-similar profile equation
///   -(1/((1-r^2)^alpha r^2)) d_r((1-r^2)^{alpha+1} r^2 w')
///     + 2(p+1)/(p-1)^2 w - |w|^{p-1} w = 0
/// over y in [dy, 1-dy]. The constant c_p (c_p^{p-1} = 2(p+1)/(p-1)^2)
/// cancels the zeroth-order terms exactly.
inline double elliptic_residual(const RadialProfile& w_star, double p) {
    const double al = 2.0 / (p - 1.0) - 1.0;
    const int n = w_star.grid.n;
    const double h = w_star.grid.dr();
    std::vector<double> w1 = derivative4(w_star.values, h);
    std::vector<double> w2 = derivative4(w1, h);
    double worst = 0.0;
    for (int j = 1; j < n - 1; ++j) {
        double r = w_star.grid.node(j);
        if (r < h || r > 1.0 - h) continue;
        double q = 1.0 - r * r;
        double lhs = -q * (w2[j] + 2.0 * w1[j] / r) + 2.0 * (al + 1.0) * r * w1[j]
                   + 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)) * w_star.values[j]
                   - std::pow(std::abs(w_star.values[j]), p - 1.0) * w_star.values[j];
        worst = std::max(worst, std::abs(lhs));
    }
    return worst;
}

} // namespace wavelab
