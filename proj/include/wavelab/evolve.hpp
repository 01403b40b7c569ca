#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wavelab/grid.hpp"
#include "wavelab/quadrature.hpp"
#include "wavelab/transform.hpp"

namespace wavelab {

enum class Variant { Plain, Cutoff, Perturbation };

struct EvolveOptions {
    double cfl = 0.9;                  // dt = cfl * dr, cfl in (0, 1]
    double t_end = 1.0;
    double blowup_guard_factor = 1e6;  // guard = factor * initial amplitude
    Variant variant = Variant::Plain;
    double r0 = 4.0;                   // cutoff radius of chi_{r0} (Cutoff/Perturbation)
    std::function<double(double)> potential;  // V(r) for Perturbation (e.g. chi_{r0} Z_1)
    int snap_every = 1;                // state storage stride

    void validate() const {
        if (!(cfl > 0.0 && cfl <= 1.0))
            throw std::invalid_argument("EvolveOptions: need cfl in (0,1]");
        if (!(t_end > 0.0)) throw std::invalid_argument("EvolveOptions: need t_end > 0");
        if (variant != Variant::Plain && !(r0 > 0.0))
            throw std::invalid_argument("EvolveOptions: need r0 > 0 for cutoff variants");
        if (snap_every < 1) throw std::invalid_argument("EvolveOptions: snap_every >= 1");
    }
};

struct BlowupInfo {
    double T_est = 0.0;
    double fit_exponent = 0.0;   // slope of log max|u| vs log(T_est - t)
    double guard = 0.0;
};

/// Time series of the evolution in v = r*u variables. States are stored
/// every snap_every steps; per-step diagnostics at every step.
struct EvolutionTrace {
    RadialGrid grid;
    Params params;
    double dt = 0.0;
    Variant variant = Variant::Plain;
    double r0 = 0.0;

    std::vector<double> times;        // every step
    std::vector<double> amplitude;    // max |u|
    std::vector<double> energy_series;
    std::vector<double> support_series;

    std::vector<double> snap_times;   // stored states
    std::vector<std::vector<double>> snap_v;
    std::vector<std::vector<double>> snap_vt;
    // Perturbation variant: deviation fields d = h - h_lin (v variables);
    // snap_v then carries the full field h = h_lin + d.
    std::vector<std::vector<double>> snap_vd;
    std::vector<std::vector<double>> snap_vdt;

    std::optional<BlowupInfo> blowup;

    /// Cubic-in-time state sample from the stored snapshots (v and v_t).
    void sample_state(double t, std::vector<double>& v, std::vector<double>& vt) const {
        const int ns = (int)snap_times.size();
        if (ns < 4) throw std::runtime_error("EvolutionTrace: too few snapshots");
        if (t < snap_times.front() - 1e-12 || t > snap_times.back() + 1e-12)
            throw std::runtime_error("EvolutionTrace: requested time outside coverage");
        int i = (int)std::distance(snap_times.begin(),
                 std::lower_bound(snap_times.begin(), snap_times.end(), t));
        i = std::clamp(i, 2, ns - 2);
        const int idx[4] = {i - 2, i - 1, i, i + 1};
        const int n = grid.n;
        v.assign(n, 0.0);
        vt.assign(n, 0.0);
        for (int jj = 0; jj < 4; ++jj) {
            double L = 1.0;
            for (int mm = 0; mm < 4; ++mm)
                if (mm != jj)
                    L *= (t - snap_times[idx[mm]]) / (snap_times[idx[jj]] - snap_times[idx[mm]]);
            const auto& sv = snap_v[idx[jj]];
            const auto& svt = snap_vt[idx[jj]];
            for (int k = 0; k < n; ++k) { v[k] += L * sv[k]; vt[k] += L * svt[k]; }
        }
    }

    StatePair state_at(double t) const {
        std::vector<double> v, vt;
        sample_state(t, v, vt);
        RadialProfile pv(grid, std::move(v), DecayClass::compact(grid.r_max));
        RadialProfile pvt(grid, std::move(vt), DecayClass::compact(grid.r_max));
        StatePair s(to_u(pv), to_u(pvt), params, t);
        return s;
    }
};

/// Conserved energy E = int [ (u_t)^2/2 + (u_r)^2/2 - sign |u|^{p+1}/(p+1) ] r^2 dr,
/// evaluated in the v variables (B35 with r0 -> 0 turns the gradient term
/// into int (d_r v)^2 dr for compactly supported states).
inline double energy_v(const std::vector<double>& v, const std::vector<double>& vt,
                       const RadialGrid& g, const Params& pr) {
    const int n = g.n;
    const double dr = g.dr();
    std::vector<double> dv = derivative4(v, dr);
    std::vector<double> dens(n);
    for (int j = 0; j < n; ++j) {
        double nl = 0.0;
        if (j > 0) {
            double r = g.node(j);
            double u = v[j] / r;
            nl = std::pow(std::abs(u), pr.p + 1.0) * r * r;
        }
        dens[j] = 0.5 * vt[j] * vt[j] + 0.5 * dv[j] * dv[j] - pr.sign * nl / (pr.p + 1.0);
    }
    return simpson_samples(dens, dr);
}

inline double energy(const StatePair& s) {
    std::vector<double> v(s.u.grid.n), vt(s.u.grid.n);
    for (int j = 0; j < s.u.grid.n; ++j) {
        v[j] = s.u.grid.node(j) * s.u.values[j];
        vt[j] = s.u.grid.node(j) * s.ut.values[j];
    }
    return energy_v(v, vt, s.u.grid, s.params);
}

/// Largest radius with |u| + |u_t| above tol (0 when none).
inline double support_radius(const StatePair& s, double tol) {
    for (int j = s.u.grid.n - 1; j >= 0; --j)
        if (std::abs(s.u.values[j]) + std::abs(s.ut.values[j]) > tol)
            return s.u.grid.node(j);
    return 0.0;
}

namespace detail {

inline double support_radius_v(const std::vector<double>& v, const std::vector<double>& vt,
                               const RadialGrid& g, double tol) {
    for (int j = g.n - 1; j >= 1; --j)
        if ((std::abs(v[j]) + std::abs(vt[j])) / g.node(j) > tol) return g.node(j);
    return 0.0;
}

} // namespace detail

/// Explicit leapfrog on v = r*u with v(0,t) = 0:
///   v^{n+1} = 2 v^n - v^{n-1} + dt^2 ( D2 v^n + RHS(v^n) ),
/// second order, CFL dt = cfl*dr. The grid must contain the light cone of
/// the data support for all of [0, t_end] (no outer boundary condition).
///
/// Variants:
///   Plain        RHS = sign |v/r|^{p-1} v
///   Cutoff       RHS = chi_{r0}^p |v/r|^{p-1} v              (B40, sign +1)
///   Perturbation advances the pair (h_lin, d) with h = h_lin + d so that h
///                solves  h_tt - Lap h = |V + chi h|^{p-1}(V + chi h) - |V|^{p-1}V
///                discretely, and d is exactly the deviation from the free
///                evolution of the same data (measurable at amplitude^p scale).
inline EvolutionTrace evolve(const StatePair& init, const EvolveOptions& opts) {
    opts.validate();
    const RadialGrid g = init.u.grid;
    const Params pr = init.params;
    const int n = g.n;
    const double dr = g.dr();
    const double dt = opts.cfl * dr;
    const int nsteps = (int)std::ceil(opts.t_end / dt - 1e-12);

    // light-cone precondition
    double supp0 = support_radius(init, 1e-14);
    if (supp0 + opts.t_end + 2.0 * dr >= g.r_max)
        throw std::invalid_argument("evolve: light cone exits the grid; enlarge r_max");

    std::vector<double> chi_p(n, 1.0), Vr(n, 0.0);
    if (opts.variant != Variant::Plain) {
        for (int j = 0; j < n; ++j)
            chi_p[j] = std::pow(chi_cutoff(g.node(j) / opts.r0), pr.p);
        if (opts.variant == Variant::Perturbation && opts.potential)
            for (int j = 0; j < n; ++j) Vr[j] = opts.potential(g.node(j));
    }
    std::vector<double> chi1(n, 1.0);
    if (opts.variant == Variant::Perturbation)
        for (int j = 0; j < n; ++j) chi1[j] = chi_cutoff(g.node(j) / opts.r0);

    auto accel_plain = [&](const std::vector<double>& v, std::vector<double>& acc) {
        acc[0] = 0.0;
        for (int j = 1; j < n - 1; ++j) {
            double lap = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (dr * dr);
            double u = v[j] / g.node(j);
            double nl = (opts.variant == Variant::Plain)
                            ? pr.sign * std::pow(std::abs(u), pr.p - 1.0) * v[j]
                            : chi_p[j] * std::pow(std::abs(u), pr.p - 1.0) * v[j];
            acc[j] = lap + nl;
        }
        acc[n - 1] = 0.0;
    };
    // deviation acceleration for the Perturbation pair
    auto accel_dev = [&](const std::vector<double>& vlin, const std::vector<double>& vd,
                         std::vector<double>& acc) {
        acc[0] = 0.0;
        for (int j = 1; j < n - 1; ++j) {
            double lap = (vd[j + 1] - 2.0 * vd[j] + vd[j - 1]) / (dr * dr);
            double r = g.node(j);
            double h = (vlin[j] + vd[j]) / r;
            double w = Vr[j] + chi1[j] * h;
            double F = std::pow(std::abs(w), pr.p - 1.0) * w
                     - std::pow(std::abs(Vr[j]), pr.p - 1.0) * Vr[j];
            acc[j] = lap + F * r;
        }
        acc[n - 1] = 0.0;
    };
    auto accel_lin = [&](const std::vector<double>& v, std::vector<double>& acc) {
        acc[0] = 0.0;
        for (int j = 1; j < n - 1; ++j)
            acc[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (dr * dr);
        acc[n - 1] = 0.0;
    };

    EvolutionTrace tr;
    tr.grid = g; tr.params = pr; tr.dt = dt; tr.variant = opts.variant; tr.r0 = opts.r0;

    std::vector<double> v(n), vt0(n);
    for (int j = 0; j < n; ++j) {
        v[j] = g.node(j) * init.u.values[j];
        vt0[j] = g.node(j) * init.ut.values[j];
    }
    const bool pert = (opts.variant == Variant::Perturbation);
    std::vector<double> acc(n), accd(n);
    std::vector<double> vl_prev, vl_cur, vd_prev, vd_cur, v_prev, v_cur;

    double amp0 = 0.0;
    for (int j = 1; j < n; ++j) amp0 = std::max(amp0, std::abs(v[j]) / g.node(j));
    const double guard = opts.blowup_guard_factor * (amp0 > 0.0 ? amp0 : 1.0);

    if (pert) {
        vl_prev = v; vd_prev.assign(n, 0.0);
        accel_lin(vl_prev, acc);
        vl_cur.resize(n);
        for (int j = 0; j < n; ++j) vl_cur[j] = vl_prev[j] + dt * vt0[j] + 0.5 * dt * dt * acc[j];
        accel_dev(vl_prev, vd_prev, accd);
        vd_cur.resize(n);
        for (int j = 0; j < n; ++j) vd_cur[j] = 0.5 * dt * dt * accd[j];
    } else {
        v_prev = v;
        accel_plain(v_prev, acc);
        v_cur.resize(n);
        for (int j = 0; j < n; ++j) v_cur[j] = v_prev[j] + dt * vt0[j] + 0.5 * dt * dt * acc[j];
    }

    auto record = [&](int k, const std::vector<double>& vk, const std::vector<double>& vtk,
                      const std::vector<double>* vdk, const std::vector<double>* vdtk) {
        tr.times.push_back(k * dt);
        double amp = 0.0;
        for (int j = 1; j < n; ++j) amp = std::max(amp, std::abs(vk[j]) / g.node(j));
        tr.amplitude.push_back(amp);
        tr.energy_series.push_back(energy_v(vk, vtk, g, pr));
        tr.support_series.push_back(detail::support_radius_v(vk, vtk, g, 1e-12 * (amp0 + 1.0)));
        if (k % opts.snap_every == 0 || k == 0 || k == nsteps) {
            tr.snap_times.push_back(k * dt);
            tr.snap_v.push_back(vk);
            tr.snap_vt.push_back(vtk);
            if (vdk) { tr.snap_vd.push_back(*vdk); tr.snap_vdt.push_back(*vdtk); }
        }
        return amp;
    };
    record(0, v, vt0, pert ? &vd_prev : nullptr, pert ? &vd_prev : nullptr);

    bool blew_up = false;
    std::vector<double> vnew(n), vdnew(n), vtk(n), vdtk(n);
    for (int k = 1; k <= nsteps; ++k) {
        double amp;
        if (pert) {
            accel_lin(vl_cur, acc);
            accel_dev(vl_cur, vd_cur, accd);
            for (int j = 0; j < n; ++j) {
                vnew[j] = 2.0 * vl_cur[j] - vl_prev[j] + dt * dt * acc[j];
                vdnew[j] = 2.0 * vd_cur[j] - vd_prev[j] + dt * dt * accd[j];
            }
            for (int j = 0; j < n; ++j) {
                vtk[j] = (vnew[j] - vl_prev[j]) / (2.0 * dt) + (vdnew[j] - vd_prev[j]) / (2.0 * dt);
                vdtk[j] = (vdnew[j] - vd_prev[j]) / (2.0 * dt);
            }
            std::vector<double> vfull(n);
            for (int j = 0; j < n; ++j) vfull[j] = vl_cur[j] + vd_cur[j];
            amp = record(k, vfull, vtk, &vd_cur, &vdtk);
            vl_prev.swap(vl_cur); vl_cur.swap(vnew);
            vd_prev.swap(vd_cur); vd_cur.swap(vdnew);
        } else {
            accel_plain(v_cur, acc);
            for (int j = 0; j < n; ++j) vnew[j] = 2.0 * v_cur[j] - v_prev[j] + dt * dt * acc[j];
            for (int j = 0; j < n; ++j) vtk[j] = (vnew[j] - v_prev[j]) / (2.0 * dt);
            amp = record(k, v_cur, vtk, nullptr, nullptr);
            v_prev.swap(v_cur); v_cur.swap(vnew);
        }
        if (!std::isfinite(amp))
            throw std::runtime_error("evolve: NaN at t = " + std::to_string(k * dt));
        if (amp > guard) { blew_up = true; break; }
    }

    if (blew_up || tr.amplitude.back() > 3.0 * (amp0 > 0 ? amp0 : 1.0)) {
        // endpoint-anchored estimate T = t + (c_p/|u|max)^{(p-1)/2}, averaged
        // over the trailing samples, plus the log-log amplitude fit
        BlowupInfo bi;
        bi.guard = guard;
        const int m = (int)tr.times.size();
        const int nanchor = std::min(12, m / 4);
        double Tsum = 0.0;
        for (int i = m - nanchor; i < m; ++i)
            Tsum += tr.times[i] + std::pow(pr.c_p() / tr.amplitude[i], (pr.p - 1.0) / 2.0);
        bi.T_est = Tsum / nanchor;
        double sx = 0, sy = 0, sxx = 0, sxy = 0; int cnt = 0;
        for (int i = m - nanchor * 8; i < m; ++i) {
            if (i < 0 || bi.T_est <= tr.times[i]) continue;
            double x = std::log(bi.T_est - tr.times[i]), y = std::log(tr.amplitude[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y; ++cnt;
        }
        if (cnt >= 2 && cnt * sxx - sx * sx != 0.0)
            bi.fit_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        tr.blowup = bi;
    }
    return tr;
}

/// Critical-norm series along a trace: N_{s_p}(u(t)) and N_{s_p-1}(u_t(t)).
/// lightcone(R) mode multiplies by the fixed shrinking cutoff supported in
/// |x| <= R - t before taking norms.
struct NormTracePoint {
    double t = 0.0;
    double norm_sp = 0.0;
    double norm_spm1 = 0.0;
    double sum() const { return norm_sp + norm_spm1; }
};

enum class NormMode { Full, Lightcone };

inline std::vector<NormTracePoint>
critical_norm_trace(const EvolutionTrace& tr, NormMode mode, double R,
                    const std::vector<double>& times, int refine = 2) {
    std::vector<NormTracePoint> out;
    const RadialGrid& g = tr.grid;
    std::vector<double> v, vt;
    for (double t : times) {
        tr.sample_state(t, v, vt);
        RadialProfile pu = to_u(RadialProfile(g, v, DecayClass::compact(g.r_max)));
        RadialProfile put = to_u(RadialProfile(g, vt, DecayClass::compact(g.r_max)));
        if (mode == NormMode::Lightcone) {
            double Rt = R - t;
            if (Rt <= 0.0)
                throw std::runtime_error("critical_norm_trace: lightcone closed at t >= R");
            for (int j = 0; j < g.n; ++j) {
                double z = 1.0 - smoothstep((g.node(j) / Rt - 0.6) / 0.4);
                pu.values[j] *= z;
                put.values[j] *= z;
            }
        }
        NormTracePoint pt;
        pt.t = t;
        pt.norm_sp = hdot_norm(pu, tr.params.s_p(), refine);
        pt.norm_spm1 = hdot_norm(put, tr.params.s_p() - 1.0, refine);
        out.push_back(pt);
    }
    return out;
}

/// Plateau datum: level on [0, r_flat], quintic falloff to 0 at r_support.
/// With level = c_p T^{-2/(p-1)} and velocity (2/(p-1)) c_p T^{-2/(p-1)-1},
/// the solution equals the ODE blow-up c_p (T-t)^{-2/(p-1)} inside the
/// light cone over the flat core.
inline StatePair plateau_state(const Params& pr, RadialGrid g, double T,
                               double r_flat, double r_support) {
    const double a = pr.a_blowup();
    const double lvl = pr.c_p() * std::pow(T, -a);
    const double vel = a * pr.c_p() * std::pow(T, -a - 1.0);
    auto prof = [&](double r) { return 1.0 - smoothstep((r - r_flat) / (r_support - r_flat)); };
    RadialProfile u0 = RadialProfile::from_function(g, [&](double r) { return lvl * prof(r); },
                                                    DecayClass::compact(r_support));
    RadialProfile u1 = RadialProfile::from_function(g, [&](double r) { return vel * prof(r); },
                                                    DecayClass::compact(r_support));
    return StatePair(std::move(u0), std::move(u1), pr, 0.0);
}

} // namespace wavelab
