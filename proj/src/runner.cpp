#include "toalab/runner.hpp"

#include <fftw3.h>
#include <gsl/gsl_version.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <variant>

#include "toalab/distribution.hpp"
#include "toalab/expectation.hpp"
#include "toalab/semiclassical.hpp"

namespace toalab {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string format_number(double x) {
    char b[64];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, long long, std::string>;

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char c : s) {
        if (c == '"') o += '"';
        o += c == '\n' ? ' ' : c;
    }
    return o + "\"";
}

class Csv {
public:
    Csv(const fs::path& p, const std::vector<std::string>& header) : out_(p), ncol_(header.size()) {
        if (!out_) throw IoError("cannot write " + p.string());
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }
    void row(const std::vector<Cell>& cells) {
        if (cells.size() != ncol_) throw std::logic_error("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) out_ << format_number(v);
                    else if constexpr (std::is_same_v<T, long long>) out_ << v;
                    else out_ << csv_escape(v);
                },
                cells[i]);
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
    std::size_t ncol_;
};

long long ll(std::size_t v) { return static_cast<long long>(v); }

json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}}; }

std::string fmt(double x, int prec = 10) {
    char b[64];
    std::snprintf(b, sizeof b, "%.*g", prec, x);
    return b;
}
std::string fmt(cplx z) {
    std::ostringstream os;
    os << fmt(z.real()) << (z.imag() < 0 ? " - " : " + ") << fmt(std::abs(z.imag())) << "i";
    return os.str();
}

class Output {
public:
    Output(fs::path dir, const std::string& sub, const std::string& target, const RunConfig& cfg) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
        manifest_["tool"] = "toalab";
        manifest_["version"] = kVersion;
        manifest_["subcommand"] = sub;
        if (!target.empty()) manifest_["target"] = target;
        manifest_["config"] = to_json(cfg);
        manifest_["threads"] = cfg.threads;
        manifest_["libraries"] = {
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"fftw", std::string(fftw_version)},
            {"gsl", GSL_VERSION},
            {"lapack", "LAPACKE zheevr"}};
        manifest_["conventions"] = {
            {"branch_side", to_string(cfg.numerics.branch)},
            {"branch_meaning", cfg.numerics.branch == CutSide::below ? "2F1 on [1,inf) taken as the limit z - i0"
                                                                      : "2F1 on [1,inf) taken as the limit z + i0"},
            {"expectation_frame", to_string(cfg.numerics.frame)},
            {"spectral_frame", "position"},
            {"q0_reading", "q0 passed through unchanged; signed and magnitude values are both recorded"},
            {"mass_split", "m_inertial = mu fixed, m_grav = mu / ratio, g_eff = g m_grav / m_inertial"},
            {"csv_floats", "17 significant digits"}};
        manifest_["results"] = json::object();
        summary_.push_back("toalab " + std::string(kVersion) + " " + sub + (target.empty() ? "" : " " + target));
    }

    Csv csv(const std::string& name, const std::vector<std::string>& header) {
        files_.push_back(name);
        return Csv(dir_ / name, header);
    }
    json& results() { return manifest_["results"]; }
    json& manifest() { return manifest_; }
    void note(const std::string& s) { summary_.push_back(s); }
    void warn(const std::string& ctx, const std::vector<std::string>& w) {
        for (const auto& s : w) warnings_.push_back(ctx.empty() ? s : ctx + ": " + s);
    }
    void warn(const std::string& ctx, const Warnings& w) { warn(ctx, w.items); }
    void fail_later(const std::string& msg) { failures_.push_back(msg); }
    const std::vector<std::string>& failures() const { return failures_; }

    void write() {
        // dedupe while keeping order
        std::vector<std::string> w;
        for (const auto& s : warnings_)
            if (std::find(w.begin(), w.end(), s) == w.end()) w.push_back(s);
        manifest_["warnings"] = w;
        manifest_["files"] = files_;
        manifest_["status"] = failures_.empty() ? "ok" : "partial-failure";
        if (!failures_.empty()) manifest_["failures"] = failures_;
        std::ofstream m(dir_ / "manifest.json");
        if (!m) throw IoError("cannot write manifest.json");
        m << manifest_.dump(2) << '\n';
        std::ofstream s(dir_ / "summary.txt");
        if (!s) throw IoError("cannot write summary.txt");
        for (const auto& line : summary_) s << line << '\n';
        if (!w.empty()) {
            s << "warnings:\n";
            for (const auto& line : w) s << "  " << line << '\n';
        }
    }
    const std::vector<std::string>& summary() const { return summary_; }

private:
    fs::path dir_;
    json manifest_;
    std::vector<std::string> files_, warnings_, summary_, failures_;
};

QuadControl quad_control(const RunConfig& c) {
    QuadControl q;
    q.order = c.numerics.quad_order;
    q.tol = c.numerics.tolerance;
    q.threads = c.threads;
    return q;
}

// physical first arrival at the origin from q0 with velocity v0 (position frame)
cplx kinematic_arrival(const RunConfig& c) { return classical_toa(c.params, -c.state.q0, c.state.v0); }

// ---------------------------------------------------------------- expectation

void expectation_records(const RunConfig& c, Output& out, Csv& csv, const std::string& label, Frame frame) {
    ComplexAmplitude phi = gaussian(c.state, c.params);
    KernelSpec ks{c.params, frame};
    QuadControl q = quad_control(c);
    for (int method = 0; method < 2; ++method) {
        ExpectationResult r = method == 0 ? expect_toa_exact(phi, ks, q) : expect_toa_centered(phi, ks, q);
        const char* name = method == 0 ? "direct" : "centered";
        csv.row({label, name, std::string(to_string(frame)), c.state.q0, c.state.v0, c.state.sigma2(), r.value,
                 std::abs(r.value), r.imag_residue, r.change, (long long)r.panels, (long long)r.refinements, r.tol});
        out.results()[label + "_" + name] = {{"frame", to_string(frame)},
                                             {"signed", r.value},
                                             {"magnitude", std::abs(r.value)},
                                             {"imag_residue", r.imag_residue},
                                             {"change", r.change},
                                             {"panels", r.panels},
                                             {"refinements", r.refinements}};
        out.warn(label + "/" + name, r.warnings);
        out.note("  " + label + " " + name + " (" + to_string(frame) + " frame): <T> = " + fmt(r.value) +
                 ", |<T>| = " + fmt(std::abs(r.value)) + ", imag residue " + fmt(r.imag_residue, 3));
    }
}

const std::vector<std::string> kExpectationHeader = {
    "reading",      "method",          "frame",        "q0 [length]",   "v0 [length/time]", "sigma2 [length^2]",
    "tau [time]",   "abs_tau [time]",  "imag_residue [1]", "last_change [1]", "panels [1]", "refinements [1]",
    "tolerance [1]"};

void cmd_expectation(const RunConfig& c, Output& out) {
    Csv csv = out.csv("expectation.csv", kExpectationHeader);
    out.note("expected arrival time, state q0 = " + fmt(c.state.q0) + ", v0 = " + fmt(c.state.v0) +
             ", sigma2 = " + fmt(c.state.sigma2()));
    expectation_records(c, out, csv, "as-given", c.numerics.frame);
    cplx lit = classical_toa(c.params, c.state.q0, c.state.v0);
    cplx kin = kinematic_arrival(c);
    out.results()["classical_literal"] = cjson(lit);
    out.results()["classical_kinematic"] = cjson(kin);
    out.note("  classical (q0 as given) " + fmt(lit) + "; kinematic first arrival from q0 " + fmt(kin));
}

// ---------------------------------------------------------------- semiclassical

const std::vector<std::string> kTermsHeader = {"r [1]", "re_alpha [time/hbar^r]", "im_alpha [time/hbar^r]",
                                               "re_alpha_hbar_r [time]", "im_alpha_hbar_r [time]",
                                               "abs_alpha_hbar_r [time]"};

void cmd_semiclassical(const RunConfig& c, Output& out) {
    Warnings w;
    const CutSide side = c.numerics.branch;
    auto terms = expansion_terms(c.state, c.params, c.numerics.r_max, side, &w);
    {
        Csv csv = out.csv("terms.csv", kTermsHeader);
        json arr = json::array();
        for (const auto& t : terms) {
            csv.row({(long long)t.r, t.alpha.real(), t.alpha.imag(), t.contribution.real(), t.contribution.imag(),
                     std::abs(t.contribution)});
            arr.push_back({{"r", t.r}, {"alpha", cjson(t.alpha)}, {"contribution", cjson(t.contribution)}});
        }
        out.results()["terms"] = arr;
    }
    Csv csv = out.csv("leading.csv", {"quantity", "branch_side", "re [time]", "im [time]", "abs [time]"});
    for (CutSide s : {CutSide::below, CutSide::above}) {
        Warnings ws;
        LeadingExpansion le = leading_expansion(c.state, c.params, s, &ws);
        cplx avg = tau0(c.state, c.params, s, &ws);
        const std::string sn = to_string(s);
        for (auto [name, v] : {std::pair<const char*, cplx>{"tau0", le.classical},
                               {"alpha2_hbar2", le.correction2},
                               {"total", le.total},
                               {"tau0_averaged", avg}})
            csv.row({std::string(name), sn, v.real(), v.imag(), std::abs(v)});
        out.results()["leading_" + sn] = {{"tau0", cjson(le.classical)},
                                          {"alpha2_hbar2", cjson(le.correction2)},
                                          {"total", cjson(le.total)},
                                          {"tau0_averaged", cjson(avg)},
                                          {"complex_regime", le.complex_regime}};
        if (s == side) {
            out.warn("", ws);
            out.note("leading expansion (" + sn + " side): tau0 = " + fmt(le.classical) + ", alpha2 hbar^2 = " +
                     fmt(le.correction2) + ", total = " + fmt(le.total) + " (|total| = " + fmt(std::abs(le.total)) +
                     ")");
            out.note("  packet-averaged tau0 = " + fmt(avg));
        }
    }
    // integral route for r = 2 as a cross-check of the closed form
    Envelope env = gaussian_envelope(c.state);
    Warnings wg;
    cplx a2 = alpha_r_general(env, 2, c.state.v0, c.params, side, {}, &wg);
    cplx a2c = alpha_r_gaussian(2, c.state, c.params, side);
    out.results()["alpha2_integral"] = cjson(a2);
    out.results()["alpha2_closed_form"] = cjson(a2c);
    out.warn("alpha2 integral", wg);
    out.note("  alpha2 integral route " + fmt(a2) + " vs closed form " + fmt(a2c));
    SpreadCheck sc = spread_ok(c.state, c.params, &w);
    out.results()["spread_check"] = {{"ok", sc.ok}, {"bound", sc.bound}, {"margin", sc.margin}};
    out.warn("", w);
}

// ---------------------------------------------------------------- spectrum

Spectrum build_spectrum(const RunConfig& c, Output& out, bool full_orthonormality) {
    KernelSpec ks{c.params, Frame::position};
    DiscretizedTOA d = discretize(ks, c.numerics.box(), c.numerics.n(), c.numerics.gregory_order, c.threads);
    out.warn("discretize", d.warnings);
    const double herm = d.hermiticity_residual();
    Spectrum s = eigensystem(d);
    json info = {{"box", {c.numerics.box_lo, c.numerics.box_hi}},
                 {"N", d.N},
                 {"h", d.h},
                 {"gregory_order", d.gregory_order},
                 {"hermiticity_residual", herm}};
    if (full_orthonormality) info["orthonormality_residual"] = s.orthonormality_residual();
    out.results()["discretization"] = info;
    out.note("spectrum: box [" + fmt(c.numerics.box_lo) + ", " + fmt(c.numerics.box_hi) + "], N = " +
             std::to_string(d.N) + ", h = " + fmt(d.h) + ", hermiticity residual " + fmt(herm, 3));
    return s;
}

std::vector<double> arrival_times(double tau, int n) {
    // even counts keep tau itself off the grid
    double a = 0.8 * tau, b = 1.2 * tau;
    if (a > b) std::swap(a, b);
    return linspace(a, b, n);
}


void cmd_spectrum(const RunConfig& c, Output& out) {
    Spectrum s = build_spectrum(c, out, c.numerics.n() <= 2000);
    const auto order = s.order_by_magnitude();
    std::vector<std::size_t> rank(s.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    if (c.spectrum.classify) {
        const std::size_t m = std::min<std::size_t>(order.size(), std::size_t(c.spectrum.classify_count));
        for (std::size_t r = 0; r < m; ++r) s.tags[order[r]] = classify(s, order[r], c.params);
    }
    {
        Csv csv = out.csv("eigenvalues.csv", {"index [1]", "rank_by_magnitude [1]", "tau [time]", "tag"});
        for (std::size_t n = 0; n < s.size(); ++n)
            csv.row({ll(n), ll(rank[n]), s.eigenvalues[n], std::string(to_string(s.tags[n]))});
    }
    json small = json::array();
    for (std::size_t r = 0; r < std::min<std::size_t>(order.size(), 10); ++r)
        small.push_back({{"index", order[r]}, {"tau", s.eigenvalues[order[r]]}, {"tag", to_string(s.tags[order[r]])}});
    out.results()["smallest_magnitude"] = small;
    out.results()["min_tau"] = s.eigenvalues.front();
    out.results()["max_tau"] = s.eigenvalues.back();
    out.note("  tau range [" + fmt(s.eigenvalues.front()) + ", " + fmt(s.eigenvalues.back()) + "]");

    json exported = json::array();
    for (std::size_t k = 0; k < c.spectrum.eigenfunctions.size(); ++k) {
        const std::size_t n = s.nearest(c.spectrum.eigenfunctions[k]);
        const double tau = s.eigenvalues[n];
        GridAmplitude psi = s.eigenfunction(n);
        const std::string sfx = std::to_string(k);
        {
            Csv csv = out.csv("eigenfunction_" + sfx + ".csv",
                              {"q [length]", "re_psi [length^-1/2]", "im_psi [length^-1/2]", "density [1/length]"});
            for (std::size_t i = 0; i < psi.q.size(); ++i)
                csv.row({psi.q[i], psi.v[i].real(), psi.v[i].imag(), std::norm(psi.v[i])});
        }
        ArrivalMetrics am = unitary_arrival_metrics(s, n, c.params, arrival_times(tau, c.spectrum.time_points),
                                                    c.spectrum.window);
        {
            Csv csv = out.csv("arrival_" + sfx + ".csv", {"t [time]", "rms_width [length]"});
            for (std::size_t i = 0; i < am.t.size(); ++i) csv.row({am.t[i], am.metric[i]});
        }
        {
            // density snapshots around the arrival point
            const std::vector<double> frac = {0.0, 0.5, 1.0, 1.5, 2.0};
            std::vector<GridAmplitude> snaps;
            for (double f : frac) snaps.push_back(evolve_fft(psi, f * tau, c.params, 8.0));
            Csv csv = out.csv("snapshots_" + sfx + ".csv",
                              {"q [length]", "density_t0 [1/length]", "density_t0.5tau [1/length]",
                               "density_t1tau [1/length]", "density_t1.5tau [1/length]", "density_t2tau [1/length]"});
            const GridAmplitude& g0 = snaps[0];
            for (std::size_t i = 0; i < g0.q.size(); ++i) {
                if (std::abs(g0.q[i]) > 4.0 * c.spectrum.window) continue;
                std::vector<Cell> row = {g0.q[i]};
                for (const auto& g : snaps) row.push_back(std::norm(g.v[i]));
                csv.row(row);
            }
        }
        const bool within = std::abs(am.argmin - tau) <= am.step * (1 + 1e-9);
        exported.push_back({{"requested", c.spectrum.eigenfunctions[k]},
                            {"index", n},
                            {"tau", tau},
                            {"tag", to_string(am.tag)},
                            {"arrival_argmin", am.argmin},
                            {"time_step", am.step},
                            {"argmin_within_one_step", within}});
        out.note("  eigenfunction " + sfx + ": tau = " + fmt(tau) + " (" + to_string(am.tag) +
                 "), unitary-arrival argmin " + fmt(am.argmin) + (within ? " (within one step)" : " (off)"));
    }
    out.results()["eigenfunctions"] = exported;
}

// ---------------------------------------------------------------- distribution

std::vector<double> default_tau_grid(const SpectralWeights& w) {
    const double sd = std::sqrt(w.variance);
    return linspace(w.mean - 8.0 * sd, w.mean + 8.0 * sd, 2001);
}

void write_distribution(Output& out, const std::string& name, const TOADistribution& d) {
    Csv csv = out.csv(name, {"tau [time]", "density [1/time]", "cdf [1]"});
    for (std::size_t i = 0; i < d.tau.size(); ++i) csv.row({d.tau[i], d.density[i], d.cdf[i]});
}

json dist_json(const TOADistribution& d) {
    return {{"mean", d.mean},   {"stddev", d.stddev}, {"mode", d.mode},
            {"peak", d.peak},   {"total_weight", d.total_weight}};
}

void cmd_distribution(const RunConfig& c, Output& out) {
    Spectrum s = build_spectrum(c, out, false);
    ComplexAmplitude phi = gaussian(c.state, c.params);
    SpectralWeights w = spectral_weights(phi, s);
    const std::vector<double> grid = c.tau_grid.set ? c.tau_grid.grid() : default_tau_grid(w);
    TOADistribution d = toa_distribution(phi, s, grid);
    out.warn("distribution", d.warnings);
    write_distribution(out, "distribution.csv", d);
    {
        Csv csv = out.csv("weights.csv", {"index [1]", "tau [time]", "weight [1]", "raw_density [1/time]"});
        for (std::size_t n = 0; n < d.eig_tau.size(); ++n) csv.row({ll(n), d.eig_tau[n], d.weight[n], d.raw_density[n]});
    }
    out.results()["distribution"] = dist_json(d);
    out.results()["classical_kinematic"] = cjson(kinematic_arrival(c));
    out.note("distribution: mean " + fmt(d.mean) + ", stddev " + fmt(d.stddev) + ", mode " + fmt(d.mode) +
             ", peak " + fmt(d.peak) + ", total weight " + fmt(d.total_weight, 13));

    if (c.evolve.times.empty()) return;
    Csv cov = out.csv("covariance.csv", {"t [time]", "ks [1]", "density_sup [1/time]", "density_rel [1]",
                                         "density_l1 [1]", "mean_shift [time]", "box_escape [1]"});
    json arr = json::array();
    for (std::size_t k = 0; k < c.evolve.times.size(); ++k) {
        const double t = c.evolve.times[k];
        CovarianceResult r = covariance_check(c.state, c.params, t, s);
        out.warn("covariance", r.warnings);
        cov.row({t, r.ks, r.density_sup, r.density_rel, r.density_l1, r.mean_shift, (long long)r.box_escape});
        arr.push_back({{"t", t},
                       {"ks", r.ks},
                       {"density_sup", r.density_sup},
                       {"density_rel", r.density_rel},
                       {"density_l1", r.density_l1},
                       {"mean_shift", r.mean_shift},
                       {"box_escape", r.box_escape}});
        out.note("  covariance t = " + fmt(t) + ": KS " + fmt(r.ks, 3) + ", density L1 " + fmt(r.density_l1, 3) +
                 ", mean shift " + fmt(r.mean_shift, 3) + (r.box_escape ? " (box escape)" : ""));
        // evolved-state distribution, shifted back by t, and the position density
        std::vector<double> shifted(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) shifted[i] = grid[i] - t;
        TOADistribution dt = toa_distribution(evolved_gaussian(c.state, c.params, t), s, shifted);
        {
            Csv csv = out.csv("distribution_t" + std::to_string(k) + ".csv",
                              {"tau [time]", "density_0 [1/time]", "density_t_at_tau_minus_t [1/time]"});
            for (std::size_t i = 0; i < grid.size(); ++i) csv.row({grid[i], d.density[i], dt.density[i]});
        }
        {
            ComplexAmplitude a = evolved_gaussian(c.state, c.params, t);
            Csv csv = out.csv("position_t" + std::to_string(k) + ".csv", {"q [length]", "density [1/length]"});
            for (double q : s.q) csv.row({q, std::norm(a(q))});
        }
    }
    out.results()["covariance"] = arr;
}

// ---------------------------------------------------------------- evolve

void cmd_evolve(const RunConfig& c, Output& out) {
    const std::vector<double> times = c.evolve.times.empty() ? std::vector<double>{0.0} : c.evolve.times;
    ComplexAmplitude phi0 = gaussian(c.state, c.params);
    const double h = c.evolve.grid_h;
    const std::size_t n0 = std::size_t(std::ceil((phi0.hi - phi0.lo) / h)) + 1;
    GridAmplitude g0 = sample(phi0, phi0.lo, h, n0);
    json arr = json::array();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        ComplexAmplitude a = evolved_gaussian(c.state, c.params, t);
        const double reach = std::max({std::abs(a.lo), std::abs(a.hi), c.evolve.pad});
        // compare on the FFT nodes; interpolating psi would dominate the deviation
        const GridAmplitude fft = evolve_fft(g0, t, c.params, reach + 1.0);
        std::vector<std::string> header = {"q [length]", "re_psi [length^-1/2]", "im_psi [length^-1/2]",
                                           "density [1/length]", "density_fft [1/length]"};
        if (c.evolve.quadrature) header.push_back("density_quadrature [1/length]");
        Csv csv = out.csv("evolve_t" + std::to_string(k) + ".csv", header);
        double dev_fft = 0, dev_quad = 0, peak = 0, norm = 0, mean = 0;
        for (std::size_t i = 0; i < fft.q.size(); ++i) {
            const double q = fft.q[i];
            if (q < a.lo || q > a.hi) continue;
            const cplx v = a(q);
            const double dens = std::norm(v), df = std::norm(fft.v[i]);
            std::vector<Cell> row = {q, v.real(), v.imag(), dens, df};
            dev_fft = std::max(dev_fft, std::abs(df - dens));
            if (c.evolve.quadrature) {
                const double dq = t > 0 ? std::norm(propagate_linear_value(phi0, t, c.params, q)) : dens;
                dev_quad = std::max(dev_quad, std::abs(dq - dens));
                row.push_back(dq);
            }
            peak = std::max(peak, dens);
            norm += dens * fft.h();
            mean += q * dens * fft.h();
            csv.row(row);
        }
        json rec = {{"t", t}, {"norm", norm}, {"mean", mean / norm}, {"peak", peak}, {"max_dev_fft", dev_fft}};
        if (c.evolve.quadrature) rec["max_dev_quadrature"] = dev_quad;
        arr.push_back(rec);
        out.note("evolve t = " + fmt(t) + ": norm " + fmt(norm, 12) + ", mean " + fmt(mean / norm) +
                 ", max |fft - closed form| " + fmt(dev_fft, 3) +
                 (c.evolve.quadrature ? ", max |quadrature - closed form| " + fmt(dev_quad, 3) : std::string()));
    }
    out.results()["snapshots"] = arr;
}

// ---------------------------------------------------------------- sweep

std::vector<SweepPoint> points_from(const RunConfig& c) {
    if (!c.sweep.set) throw ConfigError("sweep: the config has no sweep section");
    auto axis = [](const std::vector<double>& v, double base) { return v.empty() ? std::vector<double>{base} : v; };
    // missing axes take the base value ([] is rejected when the config is parsed)
    return sweep_grid(axis(c.sweep.mu, c.params.m_inertial),
                      axis(c.sweep.ratio, c.params.m_inertial / c.params.m_grav), axis(c.sweep.v0, c.state.v0),
                      axis(c.sweep.sigma2, c.state.sigma2()), axis(c.sweep.q0, c.state.q0), c.params.g,
                      c.params.hbar);
}

std::vector<double> auto_tau_grid(const std::vector<SweepPoint>& pts) {
    double lo = 1e300, hi = -1e300;
    for (const auto& p : pts) {
        cplx tc = classical_toa(p.params, -p.state.q0, p.state.v0);
        const double tr = tc.real(), w = 12.0 * p.state.sigma / std::abs(p.state.v0);
        lo = std::min(lo, tr - w);
        hi = std::max(hi, tr + w);
    }
    return linspace(lo, hi, 4001);
}

void write_sweep(const RunConfig& c, const std::vector<SweepPoint>& pts, Output& out, const std::string& prefix) {
    SweepSpec spec;
    spec.points = pts;
    spec.distributions = c.sweep.distributions;
    spec.box = c.numerics.box();
    spec.h = c.numerics.box().length() / c.numerics.n();
    spec.gregory_order = c.numerics.gregory_order;
    spec.side = c.numerics.branch;
    spec.tau_grid = c.tau_grid.set ? c.tau_grid.grid() : auto_tau_grid(pts);
    std::vector<SweepRecord> recs = sweep(spec, c.threads);

    Csv csv = out.csv(prefix + ".csv",
                      {"index [1]", "m_inertial [mass]", "m_grav [mass]", "ratio_mi_over_mg [1]", "g_eff [length/time^2]",
                       "v0 [length/time]", "sigma2 [length^2]", "q0 [length]", "status", "re_tau0 [time]",
                       "im_tau0 [time]", "re_alpha2_hbar2 [time]", "im_alpha2_hbar2 [time]",
                       "abs_alpha2_hbar2 [time]", "mean [time]", "stddev [time]", "mode [time]", "peak [1/time]",
                       "total_weight [1]", "error"});
    json arr = json::array();
    const double nan = std::nan("");
    for (const auto& r : recs) {
        const auto& p = r.point.params;
        const auto& s = r.point.state;
        const bool hd = r.dist.has_value();
        csv.row({ll(r.index), p.m_inertial, p.m_grav, p.m_inertial / p.m_grav, p.g_eff(), s.v0, s.sigma2(), s.q0,
                 std::string(r.ok ? "ok" : "failed"), r.tau0.real(), r.tau0.imag(), r.alpha2_hbar2.real(),
                 r.alpha2_hbar2.imag(), std::abs(r.alpha2_hbar2), hd ? r.dist->mean : nan, hd ? r.dist->stddev : nan,
                 hd ? r.dist->mode : nan, hd ? r.dist->peak : nan, hd ? r.dist->total_weight : nan, r.error});
        json rec = {{"index", r.index},
                    {"m_inertial", p.m_inertial},
                    {"m_grav", p.m_grav},
                    {"v0", s.v0},
                    {"sigma2", s.sigma2()},
                    {"q0", s.q0},
                    {"ok", r.ok},
                    {"tau0", cjson(r.tau0)},
                    {"alpha2_hbar2", cjson(r.alpha2_hbar2)}};
        if (hd) {
            rec["distribution"] = dist_json(*r.dist);
            out.warn(prefix + "[" + std::to_string(r.index) + "]", r.dist->warnings);
        }
        if (!r.ok) {
            rec["error"] = r.error;
            out.fail_later(prefix + "[" + std::to_string(r.index) + "]: " + r.error);
        }
        arr.push_back(rec);
    }
    out.results()[prefix] = arr;
    if (!spec.distributions) return;

    {
        Csv dc = out.csv(prefix + "_distributions.csv", {"index [1]", "tau [time]", "density [1/time]", "cdf [1]"});
        for (const auto& r : recs)
            if (r.dist)
                for (std::size_t i = 0; i < r.dist->tau.size(); ++i)
                    dc.row({ll(r.index), r.dist->tau[i], r.dist->density[i], r.dist->cdf[i]});
    }
    Csv pc = out.csv(prefix + "_pairwise_l1.csv", {"i [1]", "j [1]", "l1 [1]"});
    json pairs = json::array();
    for (std::size_t i = 0; i < recs.size(); ++i)
        for (std::size_t j = i + 1; j < recs.size(); ++j) {
            if (!recs[i].dist || !recs[j].dist) continue;
            const double l1 = l1_distance(spec.tau_grid, recs[i].dist->density, recs[j].dist->density);
            pc.row({ll(i), ll(j), l1});
            pairs.push_back({{"i", i}, {"j", j}, {"l1", l1}});
        }
    out.results()[prefix + "_pairwise_l1"] = pairs;
    out.note(prefix + ": " + std::to_string(recs.size()) + " points, " + std::to_string(pairs.size()) +
             " distribution pairs");
}

void cmd_sweep(const RunConfig& c, Output& out) { write_sweep(c, points_from(c), out, "sweep"); }

// ---------------------------------------------------------------- reproduce

RunConfig base_config(const std::string& id) {
    RunConfig c;
    c.experiment = id;
    c.params = PhysicalParams::natural(1.0, 1.0, 1.0);
    c.state = WavepacketSpec::from_sigma2(-5.0, 0.1, 30.0);
    return c;
}

// |alpha2 hbar^2| along one parameter axis
void semiclassical_table(Output& out, const std::string& name, const std::vector<RunConfig>& rows) {
    Csv csv = out.csv(name, {"m_inertial [mass]", "m_grav [mass]", "ratio_mi_over_mg [1]", "v0 [length/time]",
                             "sigma2 [length^2]", "q0 [length]", "turning_ratio_2gq0_over_v0sq [1]", "re_tau0 [time]",
                             "re_alpha2_hbar2 [time]", "im_alpha2_hbar2 [time]", "abs_alpha2_hbar2 [time]",
                             "spread_ok [1]"});
    for (const auto& c : rows) {
        Warnings w;
        LeadingExpansion le = leading_expansion(c.state, c.params, c.numerics.branch, &w);
        SpreadCheck sc = spread_ok(c.state, c.params);
        csv.row({c.params.m_inertial, c.params.m_grav, c.params.m_inertial / c.params.m_grav, c.state.v0,
                 c.state.sigma2(), c.state.q0, 2.0 * c.params.g_eff() * c.state.q0 / (c.state.v0 * c.state.v0),
                 le.classical.real(), le.correction2.real(), le.correction2.imag(), std::abs(le.correction2),
                 (long long)sc.ok});
        out.warn(name, w);
    }
}

void reproduce(const std::string& target, RunConfig c, Output& out) {
    if (target == "sec4-exact") {
        Csv csv = out.csv("expectation.csv", kExpectationHeader);
        out.note("exact expected arrival time, q0 = -5, v0 = 30, sigma2 = 0.1, mu = g = hbar = 1");
        expectation_records(c, out, csv, "literal-q0", Frame::launch);
        expectation_records(c, out, csv, "position-frame", Frame::position);
        out.results()["reference_abs"] = 0.166663;
        out.results()["classical_literal"] = cjson(classical_toa(c.params, c.state.q0, c.state.v0));
        out.results()["classical_kinematic"] = cjson(kinematic_arrival(c));
        return;
    }
    if (target == "sec4-semiclassical") {
        cmd_semiclassical(c, out);
        out.results()["reference"] = {{"tau0_abs", 0.166206}, {"alpha2_hbar2_abs", 0.000455}, {"total_abs", 0.166662}};
        return;
    }
    if (target == "sec4-tunnel") {
        Csv csv = out.csv("expectation.csv", kExpectationHeader);
        out.note("tunneling regime, v0 = 2");
        expectation_records(c, out, csv, "literal-q0", Frame::launch);
        RunConfig up = c;
        up.state.q0 = -c.state.q0;
        Output& o = out;
        Csv lc = o.csv("leading.csv", {"reading", "quantity", "branch_side", "re [time]", "im [time]", "abs [time]"});
        for (const RunConfig* rc : {&c, &up})
            for (CutSide s : {CutSide::below, CutSide::above}) {
                Warnings w;
                LeadingExpansion le = leading_expansion(rc->state, rc->params, s, &w);
                cplx avg = tau0(rc->state, rc->params, s, &w);
                const std::string reading = rc == &c ? "literal-q0" : "mirrored-q0";
                for (auto [name, v] : {std::pair<const char*, cplx>{"tau0", le.classical},
                                       {"alpha2_hbar2", le.correction2},
                                       {"total", le.total},
                                       {"tau0_averaged", avg}})
                    lc.row({reading, std::string(name), std::string(to_string(s)), v.real(), v.imag(), std::abs(v)});
                out.results()["leading_" + reading + "_" + to_string(s)] = {{"q0", rc->state.q0},
                                                                            {"tau0", cjson(le.classical)},
                                                                            {"alpha2_hbar2", cjson(le.correction2)},
                                                                            {"total", cjson(le.total)},
                                                                            {"tau0_averaged", cjson(avg)},
                                                                            {"complex_regime", le.complex_regime}};
                if (le.complex_regime)
                    out.note("  " + reading + " (q0 = " + fmt(rc->state.q0) + "), " + to_string(s) +
                             " side: tau0 = " + fmt(le.classical) + ", total = " + fmt(le.total) +
                             ", averaged tau0 = " + fmt(avg));
                out.warn(reading, w);
            }
        out.results()["reference"] = {{"exact_abs", 3.918569}, {"semiclassical_re", 2.0}, {"semiclassical_im", -1.598972}};
        return;
    }
    if (target == "cs") {
        // 133Cs: 132.905451961 u
        const double mcs = 132.905451961 * 1.66053906660e-27;
        Csv csv = out.csv("cs.csv", {"reading", "q0 [m]", "v0 [m/s]", "sigma [m]", "mass [kg]", "hbar [J s]",
                                     "g [m/s^2]", "tau0 [s]", "alpha2_hbar2 [s]", "abs_alpha2_hbar2 [s]",
                                     "reference_abs [s]", "relative_deviation [1]"});
        for (double q0 : {-1.0, 1.0}) {
            PhysicalParams p{1.05e-34, 9.8, mcs, mcs};
            WavepacketSpec s{q0, 1e-3, 10.0};
            Warnings w;
            LeadingExpansion le = leading_expansion(s, p, c.numerics.branch, &w);
            const double a = std::abs(le.correction2), ref = 7.46e-17;
            const std::string reading = q0 < 0 ? "literal-q0" : "mirrored-q0";
            csv.row({reading, q0, 10.0, 1e-3, mcs, 1.05e-34, 9.8, le.classical.real(), le.correction2.real(), a, ref,
                     a / ref - 1.0});
            out.results()[reading] = {{"q0", q0}, {"abs_alpha2_hbar2", a}, {"relative_deviation", a / ref - 1.0}};
            out.note("  " + reading + " q0 = " + fmt(q0) + " m: |alpha2 hbar^2| = " + fmt(a, 6) + " s (reference " +
                     fmt(ref, 3) + " s)");
            out.warn(reading, w);
        }
        out.results()["cs_mass_kg"] = mcs;
        return;
    }
    if (target == "fig1") {
        cmd_spectrum(c, out);
        return;
    }
    if (target == "fig2" || target == "fig3") {
        std::vector<RunConfig> rows;
        const std::vector<double> v0s = linspace(10.0, 50.0, 41);
        if (target == "fig2") {
            for (double mu : {1.0, 2.0, 3.0})
                for (double v : v0s) {
                    RunConfig r = c;
                    r.params = PhysicalParams::natural(mu);
                    r.state.v0 = v;
                    rows.push_back(r);
                }
        } else {
            for (double ratio : {0.5, 0.8, 1.0, 1.25, 2.0})
                for (double v : v0s) {
                    RunConfig r = c;
                    r.params = PhysicalParams{1.0, 1.0, 1.0, 1.0 / ratio};
                    r.state.v0 = v;
                    rows.push_back(r);
                }
        }
        semiclassical_table(out, "alpha2.csv", rows);
        return;
    }
    if (target == "fig4") {
        std::vector<RunConfig> top, bottom;
        for (double q0 : linspace(5.0, 445.0, 89)) {
            RunConfig r = c;
            r.state.q0 = q0;
            top.push_back(r);
        }
        for (int k = 0; k <= 40; ++k) {
            RunConfig r = c;
            r.state = WavepacketSpec::from_sigma2(c.state.q0, std::pow(10.0, -2.0 + 0.05 * k), c.state.v0);
            bottom.push_back(r);
        }
        semiclassical_table(out, "alpha2_vs_q0.csv", top);
        semiclassical_table(out, "alpha2_vs_sigma2.csv", bottom);
        return;
    }
    if (target == "fig5") {
        cmd_distribution(c, out);
        return;
    }
    if (target == "fig6" || target == "fig7") {
        cmd_sweep(c, out);
        return;
    }
    if (target == "fig8") {
        RunConfig a = c, b = c, d = c;
        a.sweep = {};
        a.sweep.set = true;
        a.sweep.v0 = {20.0, 30.0, 40.0};
        b.sweep = {};
        b.sweep.set = true;
        b.sweep.sigma2 = {0.05, 0.1, 0.2};
        d.sweep = {};
        d.sweep.set = true;
        d.sweep.q0 = {-3.0, -5.0, -7.0};
        write_sweep(a, points_from(a), out, "sweep_v0");
        write_sweep(b, points_from(b), out, "sweep_sigma2");
        write_sweep(d, points_from(d), out, "sweep_q0");
        return;
    }
    throw ConfigError("unknown reproduce target '" + target + "'");
}

struct Failure {
    int code;
    const char* kind;
    std::string message;
};

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s = {"expectation", "semiclassical", "spectrum", "distribution",
                                               "evolve",      "sweep",         "reproduce"};
    return s;
}

const std::vector<std::string>& reproduce_targets() {
    static const std::vector<std::string> t = {"sec4-exact", "sec4-semiclassical", "sec4-tunnel", "cs",
                                               "fig1",       "fig2",               "fig3",        "fig4",
                                               "fig5",       "fig6",               "fig7",        "fig8"};
    return t;
}

RunConfig pinned_config(const std::string& target) {
    RunConfig c = base_config(target);
    if (target == "sec4-exact" || target == "sec4-semiclassical" || target == "fig2" || target == "fig3" ||
        target == "fig4") {
        // defaults
    } else if (target == "sec4-tunnel") {
        c.state.v0 = 2.0;
    } else if (target == "cs") {
        c.params = PhysicalParams{1.05e-34, 9.8, 1.0, 1.0};  // mass filled in by the target
        c.state = WavepacketSpec{-1.0, 1e-3, 10.0};
    } else if (target == "fig1") {
        c.numerics.box_lo = -1.0;
        c.numerics.box_hi = 1.0;
        c.numerics.grid_n = 1000;
        c.spectrum.eigenfunctions = {0.00509, 0.00518};
        c.spectrum.classify_count = 20;
    } else if (target == "fig5") {
        c.evolve.times = {0.05, 0.1};
    } else if (target == "fig6") {
        c.state.v0 = 20.0;
        c.sweep.set = true;
        c.sweep.mu = {1.0, 2.0, 3.0};
        c.tau_grid = {0.15, 0.35, 2001, true};
    } else if (target == "fig7") {
        c.state.v0 = 20.0;
        c.sweep.set = true;
        c.sweep.ratio = {0.5, 1.0, 2.0};
        c.tau_grid = {0.15, 0.35, 2001, true};
    } else if (target == "fig8") {
        c.state.v0 = 20.0;
        c.tau_grid = {0.05, 0.5, 4501, true};
    } else {
        throw ConfigError("unknown reproduce target '" + target + "'");
    }
    return c;
}

int run(const RunOptions& opt, std::ostream& log, std::ostream& err) {
    const fs::path dir = opt.out_dir;
    auto report = [&](const Failure& f) {
        json e = {{"status", "error"}, {"kind", f.kind}, {"exit_code", f.code}, {"message", f.message},
                  {"subcommand", opt.subcommand}};
        if (!opt.target.empty()) e["target"] = opt.target;
        err << e.dump() << std::endl;
        std::error_code ec;
        fs::create_directories(dir, ec);
        std::ofstream o(dir / "error.json");
        if (o) o << e.dump(2) << '\n';
        return f.code;
    };
    try {
        const auto& subs = subcommands();
        if (std::find(subs.begin(), subs.end(), opt.subcommand) == subs.end())
            throw ConfigError("unknown subcommand '" + opt.subcommand + "'");
        RunConfig cfg;
        if (opt.subcommand == "reproduce") {
            if (opt.target.empty()) throw ConfigError("reproduce needs a target");
            cfg = pinned_config(opt.target);
            if (opt.config_path) throw ConfigError("reproduce uses pinned configs; --config is not accepted");
        } else {
            if (!opt.config_path) throw ConfigError("--config is required for '" + opt.subcommand + "'");
            cfg = load_config(*opt.config_path);
        }
        if (opt.threads) cfg.threads = *opt.threads;
        if (opt.tolerance) cfg.numerics.tolerance = *opt.tolerance;
        validate(cfg);

        Output out(dir, opt.subcommand, opt.target, cfg);
        if (opt.subcommand == "expectation") cmd_expectation(cfg, out);
        else if (opt.subcommand == "semiclassical") cmd_semiclassical(cfg, out);
        else if (opt.subcommand == "spectrum") cmd_spectrum(cfg, out);
        else if (opt.subcommand == "distribution") cmd_distribution(cfg, out);
        else if (opt.subcommand == "evolve") cmd_evolve(cfg, out);
        else if (opt.subcommand == "sweep") cmd_sweep(cfg, out);
        else reproduce(opt.target, cfg, out);
        out.write();
        for (const auto& line : out.summary()) log << line << '\n';
        if (!out.failures().empty())
            return report({exit_numerical, "numerical", std::to_string(out.failures().size()) +
                                                            " sweep point(s) failed; first: " + out.failures().front()});
        return exit_ok;
    } catch (const ConfigError& e) {
        return report({exit_config, "config", e.what()});
    } catch (const InputError& e) {
        return report({exit_config, "config", e.what()});
    } catch (const NumericalError& e) {
        return report({exit_numerical, "numerical", e.what()});
    } catch (const IoError& e) {
        return report({exit_io, "io", e.what()});
    } catch (const std::exception& e) {
        return report({exit_numerical, "internal", e.what()});
    }
}

}  // namespace toalab
