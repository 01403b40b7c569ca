#pragma once

#include <cmath>
#include <cstdlib>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "wavelab/dalembert.hpp"
#include "wavelab/evolve.hpp"
#include "wavelab/identities.hpp"
#include "wavelab/selfsim.hpp"
#include "wavelab/stationary.hpp"
#include "wavelab/transform.hpp"

namespace wavelab {

struct CriterionResult {
    std::string id;
    std::string name;
    bool pass = false;
    bool known_unattainable = false;   // documented spec-level impossibility
    std::string detail;
};

namespace detail {

inline std::string fnum(double x) {
    std::ostringstream ss;
    ss.precision(9);
    ss << x;
    return ss.str();
}

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = (double)x.size();
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline int env_threads() {
    const char* s = std::getenv("WAVE_LAB_THREADS");
    if (!s) return 1;
    int n = std::atoi(s);
    return n < 1 ? 1 : n;
}

} // namespace detail

struct AcceptanceOptions {
    bool quick = false;
    std::uint64_t seed = 1;
};

/// The acceptance suite: every criterion evaluated at its stated tolerance.
/// One result per criterion clause; `verify-all` and the ctest acceptance
/// binary both print one pass/fail line per entry.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {}) {
    std::vector<CriterionResult> out;
    const Params pr = focusing(7.0);
    const double a = pr.a_blowup(), cp = pr.c_p();

    // ---------------------------------------------------------------- C1
    {
        const int samples = opt.quick ? 50 : 200;
        RadialGrid g(2.2, 1024);
        std::vector<double> tg(201);
        for (int i = 0; i <= 200; ++i) tg[i] = -5.0 + i * 0.05;
        double worst = 1.0;
        int bad = 0;
        const int nthreads = detail::env_threads();
        auto work = [&](int k) {
            FreeWaveData data = random_bump_data(opt.seed + k, g);
            double w = 1.0;
            for (double r0 : {0.0, 0.5, 1.0}) {
                ChannelReport rep = channel_check(data, r0, tg);
                if (rep.initial_exterior > 0.0) w = std::min(w, rep.ratio());
            }
            return w;
        };
        if (nthreads <= 1) {
            for (int k = 0; k < samples; ++k) {
                double w = work(k);
                worst = std::min(worst, w);
                if (w < 0.5 - 1e-6) ++bad;
            }
        } else {
            std::vector<std::future<double>> fut;
            for (int k = 0; k < samples; ++k)
                fut.push_back(std::async(std::launch::async, work, k));
            for (auto& f : fut) {
                double w = f.get();
                worst = std::min(worst, w);
                if (w < 0.5 - 1e-6) ++bad;
            }
        }
        out.push_back({"1", "channel inequality (200 data x {0,0.5,1} x 201 t)",
                       bad == 0,
                       false,
                       "worst ratio " + detail::fnum(worst) + " vs 0.5 - 1e-6, "
                       + std::to_string(samples) + " samples"});
    }

    // ------------------------------------------------------------- C2, C3
    {
        StationarySolution sol = build_Z(1.0, 7.0, PicardConfig(7.0, 4.0), 1e-4);
        Asymptotics as = verify_asymptotics(sol);

        out.push_back({"2a", "Picard iterates stay in ||g-1||_V <= 1",
                       sol.outer.vnorm_max <= 1.0, false,
                       "max ball norm " + detail::fnum(sol.outer.vnorm_max)});

        // The criterion pins the fitted decay exponent of |r Z1 - 1| to
        // -2 +- 0.15. The construction's sharp tail is r^{-(p-3)} (see the
        // closed form T(1) = 1 - r^{3-p}/((p-2)(p-3))), so at p = 7 the
        // honest fit is -4; B4's |r Z1 - 1| <= C/r^2 is an upper bound that
        // the faster decay satisfies. Evaluated as stated; see the decisions
        // ledger for the blocking analysis.
        bool b4_as_stated = std::abs(as.slope_B4_fit + 2.0) <= 0.15;
        bool b4_bound = (as.slope_B4_fit <= -2.0 + 0.15) && std::isfinite(as.C_B4);
        out.push_back({"2b", "B4 fitted decay exponent of |r Z1 - 1| = -2 +- 0.15",
                       b4_as_stated, true,
                       "measured " + detail::fnum(as.slope_B4_fit)
                       + " (= -(p-3)); the B4 bound itself "
                       + (b4_bound ? "HOLDS" : "fails")
                       + ", C_B4 = " + detail::fnum(as.C_B4)});
        out.push_back({"2c", "B5 edge slope r^2 Z1' = -1 +- 1e-2",
                       std::abs(as.slope_B5 + 1.0) <= 1e-2, false,
                       "measured " + detail::fnum(as.slope_B5)});
        double res = ode_residual_max(sol);
        out.push_back({"2d", "ODE residual < 1e-6 on [2 r_min, R_max]",
                       res < 1e-6, false, "max relative residual " + detail::fnum(res)});
        std::vector<double> phi = phi_series(sol);
        int viol = 0;
        for (size_t j = 1; j < phi.size(); ++j)
            if (phi[j] > phi[j - 1] * (1.0 + 1e-10) + 1e-14) ++viol;
        out.push_back({"2e", "Phi nonincreasing at every adjacent node pair",
                       viol == 0, false, std::to_string(viol) + " violations over "
                       + std::to_string(phi.size()) + " nodes"});

        std::vector<double> m = lqp_divergence(sol, {1.0, 1e-2, 1e-4});
        bool grow = m[2] >= m[1] + 0.5 * (m[1] - m[0]);
        std::vector<double> cm = comparator_masses(7.0, {1.0, 1e-2, 1e-4});
        double ratio = (cm[2] - cm[1]) / (cm[1] - cm[0]);
        out.push_back({"3", "L^{q_p} mass diverges; bounded comparator converges",
                       grow && ratio < 0.3, false,
                       "masses " + detail::fnum(m[0]) + ", " + detail::fnum(m[1]) + ", "
                       + detail::fnum(m[2]) + "; comparator increment ratio "
                       + detail::fnum(ratio)});
    }

    // ---------------------------------------------------------------- C4
    {
        std::vector<double> errs;
        for (int n : {1024, 2048, 4096}) {
            RadialGrid g(8.0, n);
            StatePair s = plateau_state(pr, g, 1.0, 2.0, 3.0);
            EvolveOptions o; o.t_end = 0.5; o.snap_every = 4;
            EvolutionTrace tr = evolve(s, o);
            double emax = 0.0;
            for (size_t k = 0; k < tr.snap_times.size(); ++k) {
                const auto& v = tr.snap_v[k];
                double dr = g.dr();
                double u0 = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * dr);
                emax = std::max(emax, std::abs(u0 - cp * std::pow(1.0 - tr.snap_times[k], -a)));
            }
            errs.push_back(emax);
        }
        double q1 = errs[0] / errs[1], q2 = errs[1] / errs[2];
        bool ok = q1 >= 3.5 && q1 <= 4.5 && q2 >= 3.5 && q2 <= 4.5;
        out.push_back({"4", "ODE blow-up oracle, second-order convergence",
                       ok, false, "halving ratios " + detail::fnum(q1) + ", " + detail::fnum(q2)
                       + "; err(n=4096) = " + detail::fnum(errs[2])});
    }

    // ------------------------------------------------- shared 4096 runs
    RadialGrid g8(8.0, 4096);
    EvolutionTrace tr_foc, tr_def;
    {
        StatePair s = plateau_state(pr, g8, 1.0, 2.0, 3.0);
        EvolveOptions o; o.t_end = 0.9925; o.snap_every = 1;
        tr_foc = evolve(s, o);
        StatePair sd = plateau_state(defocusing(7.0), g8, 1.0, 2.0, 3.0);
        EvolveOptions od; od.t_end = 2.0; od.snap_every = 8;
        tr_def = evolve(sd, od);
    }

    // ---------------------------------------------------------------- C5
    {
        std::vector<double> times, lx, ly;
        for (int i = 0; i < 15; ++i) {
            double Tt = 1e-2 * std::pow(10.0, i / 14.0);
            times.push_back(1.0 - Tt);
        }
        auto pts = critical_norm_trace(tr_foc, NormMode::Lightcone, 1.5, times);
        for (const auto& q : pts) {
            lx.push_back(std::log(1.0 - q.t));
            ly.push_back(std::log(q.norm_sp));
        }
        double slope = detail::ls_slope(lx, ly);
        bool ok_f = std::abs(slope + a) <= 0.2 * a;

        std::vector<double> td;
        for (int i = 0; i <= 16; ++i) td.push_back(2.0 * i / 16.0);
        auto pd = critical_norm_trace(tr_def, NormMode::Full, 0.0, td);
        double n0 = pd.front().sum(), worst = 0.0;
        for (const auto& q : pd) worst = std::max(worst, q.sum() / n0);
        bool ok_d = worst <= 3.0;
        out.push_back({"5", "critical-norm divergence exponent + defocusing comparator",
                       ok_f && ok_d, false,
                       "lightcone N_{s_p}(u) slope " + detail::fnum(slope) + " vs -"
                       + detail::fnum(a) + " +- 20%; defocusing max/initial "
                       + detail::fnum(worst) + " (<= 3)"});
    }

    // ---------------------------------------------------------------- C6
    {
        const int n = opt.quick ? 2048 : 3072;
        auto run = [&](double r0, double eps) {
            RadialGrid g(96.0, n);
            RadialProfile h0 = RadialProfile::from_function(g, [&](double r) {
                double W = (1.0 - smoothstep((r - 32.0) / 16.0)) * smoothstep((r - 0.5) / 0.5);
                return eps * W / std::sqrt(std::max(r, 1e-12));
            }, DecayClass::compact(48.0));
            h0.values[0] = 0.0;
            RadialProfile v0 = to_v(h0);
            RadialProfile v1(g, derivative4(v0.values, g.dr()), DecayClass::compact(48.0));
            for (auto& x : v1.values) x = -x;
            StatePair s(h0, to_u(v1), pr, 0.0);
            EvolveOptions o;
            o.variant = Variant::Perturbation;
            o.r0 = r0;
            o.t_end = 40.0;
            o.snap_every = 20;
            EvolutionTrace tr = evolve(s, o);
            double best = 0.0;
            for (size_t k = 0; k < tr.snap_times.size(); ++k) {
                std::vector<double> dv = derivative4(tr.snap_vd[k], g.dr());
                std::vector<double> dens(g.n);
                for (int j = 0; j < g.n; ++j)
                    dens[j] = dv[j] * dv[j] + tr.snap_vdt[k][j] * tr.snap_vdt[k][j];
                best = std::max(best, std::sqrt(simpson_samples(dens, g.dr())));
            }
            return best;
        };
        double D44 = run(4.0, 1e-3), D34 = run(4.0, 1e-4), D48 = run(8.0, 1e-3);
        double eps_exp = std::log(D44 / D34) / std::log(10.0);
        double r0_exp = std::log(D44 / D48) / std::log(2.0);
        bool ok = std::abs(eps_exp - 7.0) <= 0.7 && std::abs(r0_exp - 1.0) <= 0.2;
        out.push_back({"6", "B23 perturbative smallness: amplitude^p and r0^{-(p-5)/2}",
                       ok, false, "eps exponent " + detail::fnum(eps_exp)
                       + " (7 +- 10%), r0 exponent " + detail::fnum(r0_exp) + " (1 +- 20%)"});
    }

    // ---------------------------------------------------------------- C7
    {
        const double dl = 1e-2;
        std::vector<double> sg;
        const int ns = 121;
        for (int i = 0; i < ns; ++i) sg.push_back(2.5 * i / (ns - 1.0));
        SelfSimilarFrame fr = to_selfsim(tr_foc, 1.0, dl, sg, 2049, ConeWindow::cone());
        std::vector<double> E(ns);
        for (int i = 0; i < ns; ++i) E[i] = tilde_energy(fr, i);
        DissipationSeries ds = dissipation_series(fr);
        double slack = 1e-3 * (std::abs(E[0]) + 1.0);
        bool mono = true;
        for (int i = 1; i < ns; ++i) mono = mono && E[i] >= E[i - 1] - slack;
        double defect = 0.0;
        for (int i = 0; i < ns; ++i)
            defect = std::max(defect, std::abs(E[i] - E[0] - ds.cumulative[i]));
        bool budget = defect <= 1e-2 * (std::abs(E[0]) + 1.0);

        RadialGrid gy(1.0, 1025);
        RadialProfile wst = RadialProfile::from_function(gy, [&](double) { return cp; });
        double eres = elliptic_residual(wst, 7.0);
        out.push_back({"7", "self-similar energy law (delta = 1e-2, n = 4096)",
                       mono && budget && eres < 1e-8, false,
                       "E(0) = " + detail::fnum(E[0]) + ", budget defect " + detail::fnum(defect)
                       + " (tol " + detail::fnum(1e-2 * (std::abs(E[0]) + 1.0))
                       + "), monotone " + (mono ? "yes" : "NO")
                       + ", elliptic residual(c_p) " + detail::fnum(eres)});
    }

    // ---------------------------------------------------------------- C8
    {
        RadialGrid g(10.0, 4096);
        RadialProfile u = RadialProfile::from_function(g, [](double r) {
            return std::exp(-r * r) * (1.0 - smoothstep((r - 5.0) / 1.0));
        }, DecayClass::compact(6.0));
        auto [lhs, rhs] = exterior_identity(u, 1.0);
        bool b35 = std::abs(lhs - rhs) <= 1e-8 * std::abs(lhs);

        RadialGrid gs(8.0, 2048);
        double worst_strauss = 0.0;
        for (int k = 0; k < 100; ++k) {
            FreeWaveData d = random_bump_data(opt.seed + 1000 + k, RadialGrid(2.2, 1024));
            RadialProfile f = to_u(d.v0);
            f.decay = DecayClass::compact(2.2);
            if (hdot_norm(f, 1.0) == 0.0) continue;
            worst_strauss = std::max(worst_strauss, strauss_ratio(f));
        }
        bool strauss_ok = worst_strauss <= 1.0 + 1e-6;

        bool energy_ok = true;
        double worst_drift = 0.0;
        for (double sign : {+1.0, -1.0}) {
            Params ps(7.0, sign);
            RadialGrid ge(4.0, 4096);
            RadialProfile u0 = RadialProfile::from_function(ge, [](double r) {
                return 0.2 * std::exp(-((r - 1.5) / 0.8) * ((r - 1.5) / 0.8))
                     * (1.0 - smoothstep((r - 2.4) / 0.5));
            }, DecayClass::compact(2.9));
            StatePair s(u0, RadialProfile::zeros(ge), ps, 0.0);
            EvolveOptions o; o.t_end = 1.0; o.snap_every = 64;
            EvolutionTrace tr = evolve(s, o);
            double e0 = tr.energy_series.front(), w = 0.0;
            for (double e : tr.energy_series) w = std::max(w, std::abs(e - e0));
            worst_drift = std::max(worst_drift, w / (std::abs(e0) + 1.0));
            energy_ok = energy_ok && w <= 1e-6 * (std::abs(e0) + 1.0);
        }

        // finite speed at unit CFL (exact lattice cone; at cfl < 1 the
        // dispersive front smears past R + t + 2 dr)
        RadialGrid gf(6.0, 2048);
        RadialProfile uf = RadialProfile::from_function(gf, [](double r) {
            double q = 1.0 - (r - 0.8) * (r - 0.8) / 0.16;
            return q > 0.0 ? 0.4 * q * q * q : 0.0;
        }, DecayClass::compact(1.2));
        StatePair sf(uf, RadialProfile::zeros(gf), pr, 0.0);
        double R = support_radius(sf, 1e-13);
        EvolveOptions of; of.cfl = 1.0; of.t_end = 3.5; of.snap_every = 64;
        EvolutionTrace trf = evolve(sf, of);
        bool speed_ok = true;
        for (size_t k = 0; k < trf.times.size(); ++k)
            speed_ok = speed_ok
                       && trf.support_series[k] <= R + trf.times[k] + 2.0 * gf.dr();

        out.push_back({"8", "identities: B35, Strauss, energy conservation, finite speed",
                       b35 && strauss_ok && energy_ok && speed_ok, false,
                       "B35 rel " + detail::fnum(std::abs(lhs - rhs) / std::abs(lhs))
                       + ", Strauss max " + detail::fnum(worst_strauss)
                       + ", energy drift " + detail::fnum(worst_drift)
                       + ", finite speed " + (speed_ok ? "ok" : "VIOLATED")});
    }

    return out;
}

} // namespace wavelab
