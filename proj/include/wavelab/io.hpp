#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavelab/evolve.hpp"
#include "wavelab/grid.hpp"

namespace wavelab {

/// Full round-trip float formatting (17 significant digits).
inline std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline nlohmann::json decay_to_json(const DecayClass& d) {
    if (d.kind == DecayClass::Compact)
        return {{"kind", "compact"}, {"support_radius", d.support_radius}};
    return {{"kind", "algebraic"},
            {"tail_exponent", d.tail_exponent},
            {"tail_coefficient", d.tail_coefficient}};
}

inline DecayClass decay_from_json(const nlohmann::json& j) {
    if (j.at("kind") == "compact")
        return DecayClass::compact(j.at("support_radius").get<double>());
    return DecayClass::algebraic(j.at("tail_exponent").get<double>(),
                                 j.at("tail_coefficient").get<double>());
}

/// Profile CSV (`r,value`) with a JSON sidecar `<path>.json` holding
/// {p, sign, time, decay_class}.
inline void write_profile_csv(const std::string& path, const RadialProfile& f,
                              const Params& pr, double time) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "r,value\n";
    for (int i = 0; i < f.grid.n; ++i)
        out << fmt17(f.grid.node(i)) << ',' << fmt17(f.values[i]) << '\n';
    nlohmann::json side{{"p", pr.p}, {"sign", pr.sign}, {"time", time},
                        {"decay_class", decay_to_json(f.decay)}};
    std::ofstream(path + ".json") << side.dump(2) << '\n';
}

/// State-pair CSV (`r,u,ut`) with the same sidecar scheme.
inline void write_pair_csv(const std::string& path, const StatePair& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "r,u,ut\n";
    for (int i = 0; i < s.u.grid.n; ++i)
        out << fmt17(s.u.grid.node(i)) << ',' << fmt17(s.u.values[i]) << ','
            << fmt17(s.ut.values[i]) << '\n';
    nlohmann::json side{{"p", s.params.p}, {"sign", s.params.sign}, {"time", s.time},
                        {"decay_class", decay_to_json(s.u.decay)}};
    std::ofstream(path + ".json") << side.dump(2) << '\n';
}

inline StatePair read_pair_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line);
    if (line != "r,u,ut") throw std::runtime_error("bad pair header in " + path);
    std::vector<double> r, u, ut;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double a, b, c; char comma;
        ss >> a >> comma >> b >> comma >> c;
        r.push_back(a); u.push_back(b); ut.push_back(c);
    }
    if (r.size() < 16) throw std::runtime_error("too few samples in " + path);
    std::ifstream sj(path + ".json");
    if (!sj) throw std::runtime_error("missing sidecar " + path + ".json");
    nlohmann::json side = nlohmann::json::parse(sj);
    RadialGrid g(r.back(), (int)r.size());
    DecayClass d = decay_from_json(side.at("decay_class"));
    Params pr(side.at("p").get<double>(), side.at("sign").get<double>());
    StatePair s(RadialProfile(g, std::move(u), d), RadialProfile(g, std::move(ut), d), pr,
                side.at("time").get<double>());
    return s;
}

/// Flat key = value experiment configuration. Unknown keys are rejected at
/// validation; parse -> serialize -> parse is the identity.
struct ExperimentConfig {
    std::map<std::string, std::string> kv;

    static ExperimentConfig parse(const std::string& text) {
        ExperimentConfig c;
        std::istringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line without '=': " + line);
            auto trim = [](std::string s) {
                size_t a = s.find_first_not_of(" \t");
                size_t b = s.find_last_not_of(" \t");
                return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
            };
            c.kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return c;
    }
    std::string serialize() const {
        std::ostringstream ss;
        for (const auto& [k, v] : kv) ss << k << " = " << v << '\n';
        return ss.str();
    }
    void reject_unknown(const std::vector<std::string>& allowed) const {
        for (const auto& [k, v] : kv) {
            bool ok = false;
            for (const auto& a : allowed) ok = ok || a == k;
            if (!ok) throw std::invalid_argument("unknown config key: " + k);
        }
    }
    double num(const std::string& k, double dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : std::stod(it->second);
    }
    std::string str(const std::string& k, const std::string& dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    }
    void set(const std::string& k, double v) { kv[k] = fmt17(v); }
    void set(const std::string& k, const std::string& v) { kv[k] = v; }
};

/// Per-run report: config echo, named checks, wall clock, artifact list.
struct RunReport {
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json checks = nlohmann::json::array();
    nlohmann::json values = nlohmann::json::object();
    std::vector<std::string> artifacts;
    double wall_clock_s = 0.0;

    void add_check(const std::string& name, bool pass, double measured, double tol) {
        checks.push_back({{"name", name}, {"pass", pass},
                          {"measured", measured}, {"tolerance", tol}});
    }
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.at("pass").get<bool>()) return false;
        return true;
    }
    void write(const std::string& path) const {
        nlohmann::json j{{"config", config}, {"checks", checks}, {"values", values},
                         {"wall_clock_s", wall_clock_s}, {"artifacts", artifacts}};
        std::ofstream(path) << j.dump(2) << '\n';
    }
};

/// trace.csv rows at the stored snapshot times; norms filled when computed.
inline void write_trace_csv(const std::string& path, const EvolutionTrace& tr,
                            const std::vector<NormTracePoint>& norms) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,amplitude,energy,support,norm_sp,norm_spm1\n";
    size_t qn = 0;
    for (size_t k = 0; k < tr.times.size(); ++k) {
        double t = tr.times[k];
        double nsp = 0.0, nspm1 = 0.0;
        bool have = false;
        while (qn < norms.size() && norms[qn].t < t - 1e-12) ++qn;
        if (qn < norms.size() && std::abs(norms[qn].t - t) < 1e-12) {
            nsp = norms[qn].norm_sp; nspm1 = norms[qn].norm_spm1; have = true;
        }
        if (!have && !norms.empty()) continue;   // only rows with norms when requested
        out << fmt17(t) << ',' << fmt17(tr.amplitude[k]) << ','
            << fmt17(tr.energy_series[k]) << ',' << fmt17(tr.support_series[k]) << ','
            << fmt17(nsp) << ',' << fmt17(nspm1) << '\n';
    }
}

} // namespace wavelab
