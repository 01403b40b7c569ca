// wavelab: radial supercritical wave-equation laboratory.
//
// Subcommands: channels, stationary, evolve, selfsim, norms, verify-all,
// plots. Every run writes a config echo, CSV artifacts with 17-digit
// floats, and a report.json; identical config + seed reproduces identical
// CSVs byte for byte. Exit codes: 0 ok, 1 check failure, 2 config error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wavelab/acceptance.hpp"
#include "wavelab/dalembert.hpp"
#include "wavelab/evolve.hpp"
#include "wavelab/io.hpp"
#include "wavelab/selfsim.hpp"
#include "wavelab/stationary.hpp"

namespace fs = std::filesystem;
using namespace wavelab;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void write_config(const fs::path& dir, const ExperimentConfig& cfg, RunReport& rep) {
    fs::create_directories(dir);
    std::ofstream(dir / "config.txt") << cfg.serialize();
    for (const auto& [k, v] : cfg.kv) rep.config[k] = v;
}

// ----------------------------------------------------------------- plots
int emit_plots(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        std::cerr << "plots: no such directory " << dir << "\n";
        return 2;
    }
    int written = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".csv") continue;
        const std::string stem = e.path().stem().string();
        const fs::path script = dir / ("plot_" + stem + ".py");
        std::ofstream out(script);
        out << "#!/usr/bin/env python3\n"
            << "# standalone plot for " << stem << ".csv\n"
            << "import csv\n"
            << "import matplotlib\n"
            << "matplotlib.use('Agg')\n"
            << "import matplotlib.pyplot as plt\n\n"
            << "rows = list(csv.DictReader(open('" << stem << ".csv')))\n"
            << "cols = {k: [float(r[k]) for r in rows] for k in rows[0]}\n";
        if (stem == "trace") {
            out << "T = max(cols['t']) + 1e-9\n"
                << "x = [T - t for t in cols['t']]\n"
                << "plt.loglog(x, cols['norm_sp'], '.-', label='N_sp(u)')\n"
                << "plt.loglog(x, cols['norm_spm1'], '.-', label='N_sp-1(ut)')\n"
                << "plt.xlabel('T - t'); plt.ylabel('critical norm'); plt.legend()\n";
        } else if (stem == "selfsim") {
            out << "plt.plot(cols['s'], cols['E_tilde'], '.-', label='E~(s)')\n"
                << "plt.plot(cols['s'], cols['cumulative_D'], '--', label='int D ds')\n"
                << "plt.xlabel('s'); plt.legend()\n";
        } else if (stem == "Z") {
            out << "plt.loglog(cols['r'], [abs(z) for z in cols['Z']], label='|Z|')\n"
                << "plt.xlabel('r'); plt.ylabel('|Z(r)|'); plt.legend()\n";
        } else if (stem == "channels") {
            out << "plt.plot(cols['sample'], cols['ratio'], '.')\n"
                << "plt.axhline(0.5, color='r')\n"
                << "plt.xlabel('sample'); plt.ylabel('min exterior / initial')\n";
        } else {
            out << "ks = list(cols)\n"
                << "for k in ks[1:]:\n"
                << "    plt.plot(cols[ks[0]], cols[k], label=k)\n"
                << "plt.xlabel(ks[0]); plt.legend()\n";
        }
        out << "plt.savefig('" << stem << ".png', dpi=130)\n"
            << "print('wrote " << stem << ".png')\n";
        ++written;
    }
    if (written == 0) std::cerr << "plots: no CSV files in " << dir << ", nothing to do\n";
    return 0;
}

// --------------------------------------------------------------- channels
int run_channels(double t_max, int samples, std::uint64_t seed,
                 std::vector<double> r0s, const std::string& outdir, bool plots) {
    Timer tim;
    if (r0s.empty()) r0s = {0.0, 0.5, 1.0};
    ExperimentConfig cfg;
    cfg.set("subcommand", "channels");
    cfg.set("samples", (double)samples);
    cfg.set("seed", (double)seed);
    cfg.set("t_max", t_max);
    {
        std::string rs;
        for (double r : r0s) rs += (rs.empty() ? "" : " ") + fmt17(r);
        cfg.set("r0", rs);
    }
    RunReport rep;
    write_config(outdir, cfg, rep);

    RadialGrid g(2.2, 1024);
    std::vector<double> tg(201);
    for (int i = 0; i <= 200; ++i) tg[i] = -t_max + 2.0 * t_max * i / 200.0;

    std::ofstream csv(fs::path(outdir) / "channels.csv");
    csv << "sample,r0,initial,min_pos,min_neg,ratio\n";
    double worst = 1.0;
    const int nthreads = detail::env_threads();
    std::vector<std::vector<ChannelReport>> reports(samples);
    auto work = [&](int k) {
        std::vector<ChannelReport> rs;
        FreeWaveData data = random_bump_data(seed + k, g);
        for (double r0 : r0s) rs.push_back(channel_check(data, r0, tg));
        return rs;
    };
    if (nthreads <= 1) {
        for (int k = 0; k < samples; ++k) reports[k] = work(k);
    } else {
        std::vector<std::future<std::vector<ChannelReport>>> fut;
        for (int k = 0; k < samples; ++k)
            fut.push_back(std::async(std::launch::async, work, k));
        for (int k = 0; k < samples; ++k) reports[k] = fut[k].get();
    }
    for (int k = 0; k < samples; ++k) {
        for (const auto& r : reports[k]) {
            csv << k << ',' << fmt17(r.r0) << ',' << fmt17(r.initial_exterior) << ','
                << fmt17(r.min_over_t_pos) << ',' << fmt17(r.min_over_t_neg) << ','
                << fmt17(r.ratio()) << '\n';
            worst = std::min(worst, r.ratio());
        }
    }
    csv.close();
    rep.values["worst_ratio"] = worst;
    rep.add_check("channel ratio >= 0.5 - 1e-6", worst >= 0.5 - 1e-6, worst, 0.5 - 1e-6);
    rep.artifacts = {"channels.csv", "config.txt"};
    rep.wall_clock_s = tim.secs();
    rep.write((fs::path(outdir) / "report.json").string());
    if (plots) emit_plots(outdir);
    std::cout << "channels: worst ratio " << worst << " over " << samples
              << " samples -> " << outdir << "\n";
    return rep.all_pass() ? 0 : 1;
}

// -------------------------------------------------------------- stationary
int run_stationary(double p, double ell, double r_min, const std::string& outdir,
                   bool plots) {
    Timer tim;
    ExperimentConfig cfg;
    cfg.set("subcommand", "stationary");
    cfg.set("p", p);
    cfg.set("ell", ell);
    cfg.set("r_min", r_min);
    RunReport rep;
    write_config(outdir, cfg, rep);

    StationarySolution sol = build_Z(ell, p, PicardConfig(p, 4.0), r_min);
    Asymptotics as = verify_asymptotics(sol);
    std::vector<double> masses = lqp_divergence(
        sol, {1.0, 1e-2, std::max(1e-4, sol.inner_r_min())});

    // Z.csv on a log grid spanning the matched solution
    std::ofstream csv(fs::path(outdir) / "Z.csv");
    csv << "r,Z,Zp\n";
    const double lo = sol.inner_r_min() * 1.0000001, hi = sol.lambda * sol.outer.Rmax;
    const int m = 2000;
    for (int i = 0; i < m; ++i) {
        double r = lo * std::pow(hi / lo, i / (m - 1.0));
        csv << fmt17(r) << ',' << fmt17(sol.Z(r)) << ',' << fmt17(sol.Zp(r)) << '\n';
    }
    csv.close();

    rep.values["C_B4"] = as.C_B4;
    rep.values["slope_B4_fit"] = as.slope_B4_fit;
    rep.values["slope_B5"] = as.slope_B5;
    rep.values["origin_exponent"] = as.origin_exponent;
    rep.values["contraction_factors"] = sol.outer.contraction_factors;
    rep.values["vnorm_max"] = sol.outer.vnorm_max;
    rep.values["matching_mismatch"] = sol.matching_mismatch;
    rep.values["ode_residual_max"] = ode_residual_max(sol);
    rep.values["lqp_masses"] = masses;
    rep.values["lambda"] = sol.lambda;
    double want_b5 = -(ell >= 0 ? 1.0 : -1.0) * std::abs(ell);
    rep.add_check("slope_B5 within 1e-2 of -ell", std::abs(as.slope_B5 - want_b5) < 1e-2,
                  as.slope_B5, 1e-2);
    rep.add_check("ball norm <= 1", sol.outer.vnorm_max <= 1.0, sol.outer.vnorm_max, 1.0);
    rep.add_check("ODE residual < 1e-6", ode_residual_max(sol) < 1e-6,
                  ode_residual_max(sol), 1e-6);
    rep.artifacts = {"Z.csv", "config.txt"};
    rep.wall_clock_s = tim.secs();
    rep.write((fs::path(outdir) / "report.json").string());
    if (plots) emit_plots(outdir);
    std::cout << "stationary: slope_B5 = " << as.slope_B5 << ", origin exponent = "
              << as.origin_exponent << " -> " << outdir << "\n";
    return rep.all_pass() ? 0 : 1;
}

// ------------------------------------------------------------------ evolve
struct EvolveArgs {
    double p = 7.0, sign = 1.0, r0 = 4.0, cfl = 0.9, t_end = 0.9, r_max = 8.0, T = 1.0;
    int n = 2048, snap_every = 8, snap_states = 0, norm_points = 33;
    std::string data = "plateau", variant = "plain", file;
    double amp = 0.2;
};

StatePair make_data(const EvolveArgs& A, const Params& pr) {
    RadialGrid g(A.r_max, A.n);
    if (A.data == "plateau")
        return plateau_state(pr, g, A.T, 2.0, 3.0);
    if (A.data == "bump") {
        RadialProfile u0 = RadialProfile::from_function(g, [&](double r) {
            return A.amp * std::exp(-((r - 1.5) / 0.6) * ((r - 1.5) / 0.6))
                 * (1.0 - smoothstep((r - 2.6) / 0.5));
        }, DecayClass::compact(3.1));
        return StatePair(u0, RadialProfile::zeros(g), pr, 0.0);
    }
    if (A.data == "file") return read_pair_csv(A.file);
    throw std::invalid_argument("evolve: unknown data kind " + A.data);
}

int run_evolve(const EvolveArgs& A, const std::string& outdir, bool plots) {
    Timer tim;
    Params pr(A.p, A.sign);
    ExperimentConfig cfg;
    cfg.set("subcommand", "evolve");
    cfg.set("p", A.p); cfg.set("sign", A.sign); cfg.set("data", A.data);
    cfg.set("variant", A.variant); cfg.set("r0", A.r0); cfg.set("n", (double)A.n);
    cfg.set("cfl", A.cfl); cfg.set("t_end", A.t_end); cfg.set("r_max", A.r_max);
    cfg.set("T", A.T); cfg.set("snap_every", (double)A.snap_every);
    cfg.set("amp", A.amp);
    if (!A.file.empty()) cfg.set("file", A.file);
    RunReport rep;
    write_config(outdir, cfg, rep);

    StatePair init = make_data(A, pr);
    EvolveOptions opts;
    opts.cfl = A.cfl;
    opts.t_end = A.t_end;
    opts.snap_every = A.snap_every;
    if (A.variant == "cutoff") { opts.variant = Variant::Cutoff; opts.r0 = A.r0; }
    else if (A.variant == "perturbation") {
        opts.variant = Variant::Perturbation;
        opts.r0 = A.r0;
        // V = chi_{r0} Z_1, the stationary potential of the perturbed problem
        auto z1 = std::make_shared<StationarySolution>(
            build_Z(1.0, A.p, PicardConfig(A.p, 4.0), 1e-3));
        double r0 = A.r0;
        opts.potential = [z1, r0](double r) {
            return r > 0.0 ? chi_cutoff(r / r0) * z1->Z(r) : 0.0;
        };
    } else if (A.variant != "plain") {
        throw std::invalid_argument("evolve: unknown variant " + A.variant);
    }

    EvolutionTrace tr = evolve(init, opts);

    // norms at a decimated subset of snapshot times
    std::vector<double> nt;
    const int stride = std::max(1, (int)tr.snap_times.size() / std::max(1, A.norm_points));
    for (size_t k = 0; k + 2 < tr.snap_times.size(); k += stride)
        nt.push_back(tr.snap_times[k]);
    nt.push_back(tr.snap_times[tr.snap_times.size() - 3]);
    std::vector<NormTracePoint> norms = critical_norm_trace(tr, NormMode::Full, 0.0, nt);
    write_trace_csv((fs::path(outdir) / "trace.csv").string(), tr, norms);

    if (A.snap_states > 0) {
        int idx = 0;
        for (size_t k = 0; k < tr.snap_times.size(); k += A.snap_states) {
            StatePair s = tr.state_at(tr.snap_times[k]);
            char name[64];
            std::snprintf(name, sizeof name, "state_%04d.csv", idx++);
            write_pair_csv((fs::path(outdir) / name).string(), s);
        }
    }

    rep.values["steps"] = tr.times.size();
    rep.values["final_amplitude"] = tr.amplitude.back();
    rep.values["energy_drift"] =
        std::abs(tr.energy_series.back() - tr.energy_series.front());
    if (tr.blowup) {
        rep.values["T_est"] = tr.blowup->T_est;
        rep.values["fit_exponent"] = tr.blowup->fit_exponent;
    }
    rep.add_check("finished", true, tr.times.back(), 0.0);
    rep.artifacts = {"trace.csv", "config.txt"};
    rep.wall_clock_s = tim.secs();
    rep.write((fs::path(outdir) / "report.json").string());
    if (plots) emit_plots(outdir);
    std::cout << "evolve: " << tr.times.size() << " steps, final amplitude "
              << tr.amplitude.back();
    if (tr.blowup) std::cout << ", T_est " << tr.blowup->T_est;
    std::cout << " -> " << outdir << "\n";
    return 0;
}

// ------------------------------------------------------------------ selfsim
int run_selfsim(const std::string& trace_path, double delta, double s_max, int s_steps,
                double t_plus, bool window, const std::string& outdir, bool plots) {
    Timer tim;
    // Re-evolve deterministically from the config echoed next to the trace,
    // at snapshot stride 1 (the chain rule needs dense time sampling).
    fs::path tdir = fs::path(trace_path).parent_path();
    std::ifstream cf(tdir / "config.txt");
    if (!cf) throw std::invalid_argument("selfsim: missing config.txt next to " + trace_path);
    std::stringstream ss;
    ss << cf.rdbuf();
    ExperimentConfig ecfg = ExperimentConfig::parse(ss.str());
    if (ecfg.str("subcommand", "") != "evolve")
        throw std::invalid_argument("selfsim: trace config is not an evolve run");

    EvolveArgs A;
    A.p = ecfg.num("p", 7.0); A.sign = ecfg.num("sign", 1.0);
    A.data = ecfg.str("data", "plateau"); A.variant = ecfg.str("variant", "plain");
    A.r0 = ecfg.num("r0", 4.0); A.n = (int)ecfg.num("n", 2048);
    A.cfl = ecfg.num("cfl", 0.9); A.t_end = ecfg.num("t_end", 0.9);
    A.r_max = ecfg.num("r_max", 8.0); A.T = ecfg.num("T", 1.0);
    A.amp = ecfg.num("amp", 0.2); A.file = ecfg.str("file", "");
    A.snap_every = 1;

    Params pr(A.p, A.sign);
    StatePair init = make_data(A, pr);
    EvolveOptions opts;
    opts.cfl = A.cfl; opts.t_end = A.t_end; opts.snap_every = 1;
    EvolutionTrace tr = evolve(init, opts);

    if (t_plus <= 0.0)   // auto: measured blow-up time, else 1
        t_plus = tr.blowup ? tr.blowup->T_est : 1.0;

    ExperimentConfig cfg;
    cfg.set("subcommand", "selfsim");
    cfg.set("trace", trace_path);
    cfg.set("delta", delta);
    cfg.set("s_max", s_max);
    cfg.set("s_steps", (double)s_steps);
    cfg.set("T_plus", t_plus);
    cfg.set("window", window ? "cone" : "none");
    RunReport rep;
    write_config(outdir, cfg, rep);

    std::vector<double> sg(s_steps);
    for (int i = 0; i < s_steps; ++i) sg[i] = s_max * i / (s_steps - 1.0);
    SelfSimilarFrame fr = to_selfsim(tr, t_plus, delta, sg, 2049,
                                     window ? ConeWindow::cone() : ConeWindow::none());
    DissipationSeries ds;
    bool have_D = true;
    try {
        ds = dissipation_series(fr);
    } catch (const std::runtime_error&) {
        have_D = false;   // unwindowed frame touching y = 1: D non-integrable
        ds.D.assign(sg.size(), std::nan(""));
        ds.cumulative.assign(sg.size(), std::nan(""));
    }
    std::ofstream csv(fs::path(outdir) / "selfsim.csv");
    csv << "s,E_tilde,D,cumulative_D,support\n";
    std::vector<double> E(sg.size());
    for (size_t i = 0; i < sg.size(); ++i) {
        E[i] = tilde_energy(fr, (int)i);
        csv << fmt17(sg[i]) << ',' << fmt17(E[i]) << ',' << fmt17(ds.D[i]) << ','
            << fmt17(ds.cumulative[i]) << ',' << fmt17(fr.support[i]) << '\n';
    }
    csv.close();

    double mono = 0.0;
    for (size_t i = 1; i < E.size(); ++i) mono = std::min(mono, E[i] - E[i - 1]);
    rep.values["E0"] = E.front();
    rep.values["E_end"] = E.back();
    rep.values["min_energy_step"] = mono;
    rep.values["T_plus"] = t_plus;
    if (have_D) {
        double defect = 0.0;
        for (size_t i = 0; i < E.size(); ++i)
            defect = std::max(defect, std::abs(E[i] - E.front() - ds.cumulative[i]));
        rep.values["budget_defect"] = defect;
        rep.add_check("energy nondecreasing (1e-3 relative slack)",
                      mono >= -1e-3 * (std::abs(E.front()) + 1.0), mono, 1e-3);
        rep.add_check("budget defect <= 1e-2 relative",
                      defect <= 1e-2 * (std::abs(E.front()) + 1.0), defect, 1e-2);
    }
    rep.artifacts = {"selfsim.csv", "config.txt"};
    rep.wall_clock_s = tim.secs();
    rep.write((fs::path(outdir) / "report.json").string());
    if (plots) emit_plots(outdir);
    std::cout << "selfsim: E(0) = " << E.front() << ", E(end) = " << E.back()
              << (have_D ? "" : " (D non-integrable without the cone window)")
              << " -> " << outdir << "\n";
    return rep.all_pass() ? 0 : 1;
}

// -------------------------------------------------------------------- norms
int run_norms(const std::string& file, double s, const std::string& outdir) {
    Timer tim;
    StatePair st = read_pair_csv(file);
    if (s < 0.0) s = st.params.s_p();
    ExperimentConfig cfg;
    cfg.set("subcommand", "norms");
    cfg.set("file", file);
    cfg.set("s", s);
    RunReport rep;
    write_config(outdir, cfg, rep);
    double nu = hdot_norm(st.u, s);
    double nut = hdot_norm(st.ut, std::max(0.0, s - 1.0));
    rep.values["N_s_u"] = nu;
    rep.values["N_sm1_ut"] = nut;
    rep.values["s"] = s;
    rep.add_check("norms finite", std::isfinite(nu) && std::isfinite(nut), nu, 0.0);
    rep.wall_clock_s = tim.secs();
    rep.write((fs::path(outdir) / "report.json").string());
    std::cout << "norms: N_" << s << "(u) = " << nu << ", N_" << (s - 1.0)
              << "(ut) = " << nut << "\n";
    return 0;
}

// --------------------------------------------------------------- verify-all
int run_verify_all(bool quick, const std::string& outdir) {
    Timer tim;
    ExperimentConfig cfg;
    cfg.set("subcommand", "verify-all");
    cfg.set("quick", quick ? "true" : "false");
    RunReport rep;
    write_config(outdir, cfg, rep);
    AcceptanceOptions opt;
    opt.quick = quick;
    auto results = run_acceptance(opt);
    int failed = 0;
    for (const auto& r : results) {
        std::printf("[%s] criterion %-3s %s\n       %s\n", r.pass ? "PASS" : "FAIL",
                    r.id.c_str(), r.name.c_str(), r.detail.c_str());
        nlohmann::json j{{"id", r.id}, {"name", r.name}, {"pass", r.pass},
                         {"detail", r.detail}, {"known_unattainable", r.known_unattainable}};
        rep.checks.push_back(j);
        if (!r.pass) ++failed;
    }
    rep.wall_clock_s = tim.secs();
    rep.write((fs::path(outdir) / "report.json").string());
    std::printf("%zu criteria, %d failed, %.1f s\n", results.size(), failed, rep.wall_clock_s);
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavelab: numerical laboratory for the radial supercritical "
                 "focusing wave equation"};
    app.require_subcommand(1);
    bool plots = false;

    // channels
    auto* ch = app.add_subcommand("channels", "exterior-energy channels of free waves");
    double t_max = 5.0; int samples = 200; std::uint64_t seed = 1;
    std::vector<double> r0s;
    std::string out_ch = "run-channels";
    ch->add_option("--t-max", t_max, "time horizon");
    ch->add_option("--samples", samples, "number of random data samples");
    ch->add_option("--seed", seed, "RNG seed (mt19937_64)");
    ch->add_option("--r0", r0s, "channel radii (default 0 0.5 1)");
    ch->add_option("--out", out_ch, "output directory");
    ch->add_flag("--plots", plots, "emit plot scripts");

    // stationary
    auto* st = app.add_subcommand("stationary", "singular stationary solution Z_ell");
    double p = 7.0, ell = 1.0, r_min = 1e-4;
    std::string out_st = "run-stationary";
    st->add_option("--p", p, "exponent p > 5");
    st->add_option("--ell", ell, "tail value of r Z(r)");
    st->add_option("--r-min", r_min, "inner cutoff of the continuation");
    st->add_option("--out", out_st, "output directory");
    st->add_flag("--plots", plots, "emit plot scripts");

    // evolve
    auto* ev = app.add_subcommand("evolve", "leapfrog evolution of the nonlinear wave");
    EvolveArgs A;
    std::string out_ev = "run-evolve";
    ev->add_option("--p", A.p, "exponent p > 5");
    ev->add_option("--sign", A.sign, "+1 focusing, -1 defocusing");
    ev->add_option("--data", A.data, "plateau | bump | file");
    ev->add_option("--file", A.file, "pair CSV for --data file");
    ev->add_option("--variant", A.variant, "plain | cutoff | perturbation");
    ev->add_option("--r0", A.r0, "cutoff radius for the variants");
    ev->add_option("--n", A.n, "grid points");
    ev->add_option("--r-max", A.r_max, "grid extent");
    ev->add_option("--cfl", A.cfl, "dt = cfl * dr");
    ev->add_option("--t-end", A.t_end, "final time");
    ev->add_option("--T", A.T, "plateau ODE blow-up time");
    ev->add_option("--amp", A.amp, "bump amplitude");
    ev->add_option("--snap-every", A.snap_every, "state storage stride");
    ev->add_option("--snap-states", A.snap_states, "write every k-th stored state (0 = none)");
    ev->add_option("--out", out_ev, "output directory");
    ev->add_flag("--plots", plots, "emit plot scripts");

    // selfsim
    auto* ssm = app.add_subcommand("selfsim", "self-similar frame energies of a trace");
    std::string trace = "run-evolve/trace.csv", out_ss = "run-selfsim";
    double delta = 1e-2, s_maxv = 2.5, t_plus = -1.0;
    int s_steps = 121;
    bool no_window = false;
    ssm->add_option("--trace", trace, "trace.csv of an evolve run");
    ssm->add_option("--delta", delta, "frame parameter delta >= 0");
    ssm->add_option("--s-max", s_maxv, "largest s");
    ssm->add_option("--s-steps", s_steps, "number of s samples");
    ssm->add_option("--t-plus", t_plus, "blow-up time (<= 0: auto from the trace)");
    ssm->add_flag("--no-window", no_window, "disable the cone restriction");
    ssm->add_option("--out", out_ss, "output directory");
    ssm->add_flag("--plots", plots, "emit plot scripts");

    // norms
    auto* nm = app.add_subcommand("norms", "critical Sobolev norms of a stored state");
    std::string nfile, out_nm = "run-norms";
    double ns = -1.0;
    nm->add_option("--file", nfile, "pair CSV")->required();
    nm->add_option("--s", ns, "order (default s_p from the sidecar)");
    nm->add_option("--out", out_nm, "output directory");

    // verify-all
    auto* va = app.add_subcommand("verify-all", "run the acceptance suite");
    bool quick = false;
    std::string out_va = "run-verify";
    va->add_flag("--quick", quick, "reduced sample counts");
    va->add_option("--out", out_va, "output directory");

    // plots
    auto* pl = app.add_subcommand("plots", "emit plot scripts for a run directory");
    std::string pdir = ".";
    pl->add_option("dir", pdir, "run directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ch) return run_channels(t_max, samples, seed, r0s, out_ch, plots);
        if (*st) return run_stationary(p, ell, r_min, out_st, plots);
        if (*ev) return run_evolve(A, out_ev, plots);
        if (*ssm) return run_selfsim(trace, delta, s_maxv, s_steps, t_plus, !no_window,
                                     out_ss, plots);
        if (*nm) return run_norms(nfile, ns, out_nm);
        if (*va) return run_verify_all(quick, out_va);
        if (*pl) return emit_plots(pdir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
