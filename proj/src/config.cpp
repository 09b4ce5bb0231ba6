#include "toalab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "toalab/distribution.hpp"

namespace toalab {

using nlohmann::json;

int NumericsConfig::n() const {
    if (grid_n > 0) return grid_n;
    return int(std::lround((box_hi - box_lo) / grid_h));
}

std::vector<double> TauGridConfig::grid() const { return linspace(start, stop, count); }

namespace {

void only_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError("section '" + section + "' must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in section '" + section + "'");
}

template <class T>
void get(const json& j, const char* key, T& out, const std::string& section) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad type for '" + section + "." + key + "'");
    }
}

}  // namespace

void validate(const RunConfig& c) {
    try {
        c.params.validate();
        c.state.validate();
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }
    const auto& n = c.numerics;
    if (!(n.box_hi > n.box_lo)) throw ConfigError("numerics: box_hi must exceed box_lo");
    if (!(n.grid_h > 0) && n.grid_n <= 0) throw ConfigError("numerics: grid_h must be > 0");
    if (n.n() < 64) throw ConfigError("numerics: grid must have at least 64 nodes");
    if (n.n() > 20000) throw ConfigError("numerics: grid larger than 20000 nodes");
    if (n.gregory_order < 0 || n.gregory_order > 5) throw ConfigError("numerics: gregory_order must be in [0,5]");
    if (n.quad_order < 2 || n.quad_order > 64) throw ConfigError("numerics: quad_order must be in [2,64]");
    if (!(n.tolerance > 0) || n.tolerance > 1e-2) throw ConfigError("numerics: tolerance must be in (0, 1e-2]");
    if (n.r_max < 0 || n.r_max > 12) throw ConfigError("numerics: r_max must be in [0,12]");
    if (c.tau_grid.set && (c.tau_grid.count < 2 || !(c.tau_grid.stop > c.tau_grid.start)))
        throw ConfigError("tau_grid: need count >= 2 and stop > start");
    for (double t : c.evolve.times)
        if (!(t >= 0)) throw ConfigError("evolve: times must be >= 0");
    if (!(c.evolve.pad > 0) || !(c.evolve.grid_h > 0)) throw ConfigError("evolve: pad and grid_h must be > 0");
    if (c.spectrum.time_points < 2) throw ConfigError("spectrum: time_points must be >= 2");
    if (c.spectrum.classify_count < 0) throw ConfigError("spectrum: classify_count must be >= 0");
    if (!(c.spectrum.window > 0)) throw ConfigError("spectrum: window must be > 0");
    for (const auto* axis : {&c.sweep.mu, &c.sweep.ratio, &c.sweep.sigma2})
        for (double v : *axis)
            if (!(v > 0)) throw ConfigError("sweep: mu, ratio and sigma2 values must be > 0");
    for (double v : c.sweep.v0)
        if (!(std::abs(v) > 0)) throw ConfigError("sweep: v0 values must be nonzero");
    if (c.threads < 1) throw ConfigError("threads must be >= 1");
}

RunConfig parse_config(const json& j) {
    only_keys(j, "<root>", {"experiment", "physics", "state", "numerics", "tau_grid", "evolve", "spectrum", "sweep"});
    RunConfig c;
    get(j, "experiment", c.experiment, "<root>");
    if (j.contains("physics")) {
        const json& p = j["physics"];
        only_keys(p, "physics", {"hbar", "g", "mass", "m_inertial", "m_grav"});
        get(p, "hbar", c.params.hbar, "physics");
        get(p, "g", c.params.g, "physics");
        if (p.contains("mass") && (p.contains("m_inertial") || p.contains("m_grav")))
            throw ConfigError("physics: give either 'mass' or 'm_inertial' + 'm_grav'");
        if (p.contains("mass")) {
            double m = 1.0;
            get(p, "mass", m, "physics");
            c.params.m_inertial = c.params.m_grav = m;
        } else {
            get(p, "m_inertial", c.params.m_inertial, "physics");
            get(p, "m_grav", c.params.m_grav, "physics");
        }
    }
    if (j.contains("state")) {
        const json& s = j["state"];
        only_keys(s, "state", {"q0", "v0", "sigma2"});
        double s2 = c.state.sigma2();
        get(s, "q0", c.state.q0, "state");
        get(s, "v0", c.state.v0, "state");
        get(s, "sigma2", s2, "state");
        if (!(s2 > 0)) throw ConfigError("state: sigma2 must be > 0");
        c.state.sigma = std::sqrt(s2);
    }
    if (j.contains("numerics")) {
        const json& n = j["numerics"];
        only_keys(n, "numerics", {"box_lo", "box_hi", "box_half_width", "grid_h", "grid_n", "gregory_order",
                                  "quad_order", "tolerance", "r_max", "branch", "frame"});
        auto& N = c.numerics;
        if (n.contains("box_half_width")) {
            if (n.contains("box_lo") || n.contains("box_hi"))
                throw ConfigError("numerics: give either box_half_width or box_lo/box_hi");
            double l = 0;
            get(n, "box_half_width", l, "numerics");
            if (!(l > 0)) throw ConfigError("numerics: box_half_width must be > 0");
            N.box_lo = -l;
            N.box_hi = l;
        }
        get(n, "box_lo", N.box_lo, "numerics");
        get(n, "box_hi", N.box_hi, "numerics");
        get(n, "grid_h", N.grid_h, "numerics");
        get(n, "grid_n", N.grid_n, "numerics");
        get(n, "gregory_order", N.gregory_order, "numerics");
        get(n, "quad_order", N.quad_order, "numerics");
        get(n, "tolerance", N.tolerance, "numerics");
        get(n, "r_max", N.r_max, "numerics");
        std::string s;
        try {
            if (n.contains("branch")) {
                get(n, "branch", s, "numerics");
                N.branch = cut_side_from_string(s);
            }
            if (n.contains("frame")) {
                get(n, "frame", s, "numerics");
                N.frame = frame_from_string(s);
            }
        } catch (const InputError& e) {
            throw ConfigError(std::string("numerics: ") + e.what());
        }
    }
    if (j.contains("tau_grid")) {
        const json& t = j["tau_grid"];
        only_keys(t, "tau_grid", {"start", "stop", "count"});
        get(t, "start", c.tau_grid.start, "tau_grid");
        get(t, "stop", c.tau_grid.stop, "tau_grid");
        get(t, "count", c.tau_grid.count, "tau_grid");
        c.tau_grid.set = true;
    }
    if (j.contains("evolve")) {
        const json& e = j["evolve"];
        only_keys(e, "evolve", {"times", "pad", "grid_h", "quadrature"});
        get(e, "times", c.evolve.times, "evolve");
        get(e, "pad", c.evolve.pad, "evolve");
        get(e, "grid_h", c.evolve.grid_h, "evolve");
        get(e, "quadrature", c.evolve.quadrature, "evolve");
    }
    if (j.contains("spectrum")) {
        const json& s = j["spectrum"];
        only_keys(s, "spectrum", {"eigenfunctions", "classify", "window", "time_points", "classify_count"});
        get(s, "eigenfunctions", c.spectrum.eigenfunctions, "spectrum");
        get(s, "classify", c.spectrum.classify, "spectrum");
        get(s, "window", c.spectrum.window, "spectrum");
        get(s, "time_points", c.spectrum.time_points, "spectrum");
        get(s, "classify_count", c.spectrum.classify_count, "spectrum");
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        only_keys(s, "sweep", {"mu", "ratio", "v0", "sigma2", "q0", "distributions"});
        get(s, "mu", c.sweep.mu, "sweep");
        get(s, "ratio", c.sweep.ratio, "sweep");
        get(s, "v0", c.sweep.v0, "sweep");
        get(s, "sigma2", c.sweep.sigma2, "sweep");
        get(s, "q0", c.sweep.q0, "sweep");
        get(s, "distributions", c.sweep.distributions, "sweep");
        for (const char* axis : {"mu", "ratio", "v0", "sigma2", "q0"})
            if (s.contains(axis) && s[axis].empty())
                throw ConfigError(std::string("sweep: axis '") + axis + "' is empty");
        c.sweep.set = true;
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["physics"] = {{"hbar", c.params.hbar},
                    {"g", c.params.g},
                    {"m_inertial", c.params.m_inertial},
                    {"m_grav", c.params.m_grav}};
    j["state"] = {{"q0", c.state.q0}, {"v0", c.state.v0}, {"sigma2", c.state.sigma2()}};
    const auto& n = c.numerics;
    j["numerics"] = {{"box_lo", n.box_lo},         {"box_hi", n.box_hi},         {"grid_h", n.grid_h},
                     {"grid_n", n.n()},            {"gregory_order", n.gregory_order},
                     {"quad_order", n.quad_order}, {"tolerance", n.tolerance},   {"r_max", n.r_max},
                     {"branch", to_string(n.branch)}, {"frame", to_string(n.frame)}};
    if (c.tau_grid.set)
        j["tau_grid"] = {{"start", c.tau_grid.start}, {"stop", c.tau_grid.stop}, {"count", c.tau_grid.count}};
    j["evolve"] = {{"times", c.evolve.times},
                   {"pad", c.evolve.pad},
                   {"grid_h", c.evolve.grid_h},
                   {"quadrature", c.evolve.quadrature}};
    j["spectrum"] = {{"eigenfunctions", c.spectrum.eigenfunctions},
                     {"classify", c.spectrum.classify},
                     {"window", c.spectrum.window},
                     {"time_points", c.spectrum.time_points},
                     {"classify_count", c.spectrum.classify_count}};
    if (c.sweep.set)
        j["sweep"] = {{"mu", c.sweep.mu},         {"ratio", c.sweep.ratio}, {"v0", c.sweep.v0},
                  {"sigma2", c.sweep.sigma2}, {"q0", c.sweep.q0},       {"distributions", c.sweep.distributions}};
    return j;
}

}  // namespace toalab
