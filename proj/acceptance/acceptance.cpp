// Acceptance checks: one PASS/FAIL line per criterion.
//   toalab_acceptance            all criteria
//   toalab_acceptance --only 5   a single criterion (exit 1 if it fails)
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "toalab/distribution.hpp"
#include "toalab/expectation.hpp"
#include "toalab/semiclassical.hpp"

using namespace toalab;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// accumulates sub-checks; the criterion passes only if all do
struct Checks {
    Outcome o;
    void operator()(bool ok, const std::string& what) {
        if (!ok) o.pass = false;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string num(double x, int p = 7) {
    std::ostringstream os;
    os.precision(p);
    os << x;
    return os.str();
}

int hw_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

const PhysicalParams unit = PhysicalParams::natural();
const WavepacketSpec sec4 = WavepacketSpec::from_sigma2(-5, 0.1, 30);

Spectrum spectrum_on(const PhysicalParams& p, Box box, double h) {
    const int N = int(std::lround(box.length() / h));
    return eigensystem(discretize({p, Frame::position}, box, N, 4, hw_threads()));
}

double exact_sec4(double* seconds = nullptr) {
    QuadControl q;
    q.threads = hw_threads();
    auto t0 = std::chrono::steady_clock::now();
    double v = expect_toa_exact(gaussian(sec4, unit), {unit, Frame::launch}, q).value;
    if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return v;
}

Outcome c1() {
    Checks c;
    double secs = 0;
    const double v = exact_sec4(&secs);
    c(std::abs(std::abs(v) - 0.166663) <= 1e-4, "|<T>| = " + num(std::abs(v), 10) + " (target 0.166663 +- 1e-4)");
    c(secs < 30, "runtime " + num(secs, 3) + " s");
    return c.o;
}

Outcome c2() {
    Checks c;
    LeadingExpansion le = leading_expansion(sec4, unit);
    const double t0 = std::abs(le.classical), a2 = std::abs(le.correction2), tot = std::abs(le.total);
    c(std::abs(t0 - 0.166206) <= 1e-6, "|tau0| = " + num(t0, 10));
    c(std::abs(a2 - 0.000455) <= 1e-6, "|alpha2 hbar^2| = " + num(a2, 8));
    const double ex = std::abs(exact_sec4());
    c(std::abs(tot - ex) <= 5e-6, "|total| = " + num(tot, 10) + " vs exact " + num(ex, 10));
    return c.o;
}

Outcome c3() {
    Checks c;
    // exact value at the literal launch-frame state
    auto lit = WavepacketSpec::from_sigma2(-5, 0.1, 2);
    QuadControl q;
    q.threads = hw_threads();
    const double ex = expect_toa_exact(gaussian(lit, unit), {unit, Frame::launch}, q).value;
    c(std::abs(std::abs(ex) - 3.918569) <= 1e-2, "|<T>| = " + num(std::abs(ex), 10));
    // semiclassical term: the packet starts beyond the turning point, lower side of the cut
    Warnings w;
    LeadingExpansion le = leading_expansion(WavepacketSpec::from_sigma2(5, 0.1, 2), unit, CutSide::below, &w);
    c(le.complex_regime && !w.empty(), "complex regime flagged");
    c(std::abs(le.total.real() - 2.0) <= 1e-6, "Re = " + num(le.total.real(), 10));
    c(std::abs(le.total.imag() + 1.598972) <= 1e-3, "Im = " + num(le.total.imag(), 10));
    const double gap = std::abs(std::abs(le.total) - std::abs(ex));
    c(gap > 0.1, "expansion vs exact | |total| - |<T>| | = " + num(gap, 5) + " > 0.1");
    return c.o;
}

Outcome c4() {
    Checks c;
    const double mcs = 132.905451961 * 1.66053906660e-27;
    const PhysicalParams p{1.05e-34, 9.8, mcs, mcs};
    const double ref = 7.46e-17;
    bool any = false;
    std::string d;
    for (double q0 : {-1.0, 1.0}) {
        const double a = std::abs(leading_expansion(WavepacketSpec{q0, 1e-3, 10.0}, p).correction2);
        any = any || std::abs(a / ref - 1) <= 0.01;
        d += (d.empty() ? "" : ", ") + std::string("q0 = ") + num(q0, 2) + " m: " + num(a, 6) + " s (" +
             num(100 * (a / ref - 1), 3) + "%)";
    }
    c(any, "|alpha2 hbar^2| " + d + " vs 7.46e-17 s +- 1%");
    return c.o;
}

Outcome c5() {
    Checks c;
    // properties at a resolved box with a smooth state
    {
        const Box box{-12, 1.5};
        const int N = 1350;
        DiscretizedTOA d = discretize({unit, Frame::position}, box, N, 4, hw_threads());
        c(d.hermiticity_residual() <= 1e-13, "hermiticity " + num(d.hermiticity_residual(), 3));
        Spectrum s = eigensystem(d);
        c(s.orthonormality_residual() <= 1e-10, "orthonormality " + num(s.orthonormality_residual(), 3));
        ComplexAmplitude phi = gaussian(sec4, unit);
        QuadControl q;
        q.threads = hw_threads();
        const double direct = expect_toa_exact(phi, {unit, Frame::position}, q).value;
        const double spec = spectral_moments(s, phi).mean;
        c(std::abs(spec / direct - 1) <= 1e-3, "spectral mean " + num(spec, 10) + " vs quadrature " + num(direct, 10));
    }
    // near-degenerate pair at small tau in the symmetric unit box
    const Box box = Box::symmetric(1.0);
    Spectrum s1000 = eigensystem(discretize({unit, Frame::position}, box, 1000, 4, hw_threads()));
    Spectrum s500 = eigensystem(discretize({unit, Frame::position}, box, 500, 4, hw_threads()));
    std::vector<std::size_t> idx;
    for (std::size_t n = 0; n < s1000.size(); ++n)
        if (s1000.eigenvalues[n] > 0.004 && s1000.eigenvalues[n] < 0.006) idx.push_back(n);
    for (std::size_t n : idx) s1000.tags[n] = classify(s1000, n, unit);
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
        const std::size_t a = idx[k], b = idx[k + 1];
        const Tag ta = s1000.tags[a], tb = s1000.tags[b];
        const bool mixed = (ta == Tag::nodal && tb == Tag::non_nodal) || (ta == Tag::non_nodal && tb == Tag::nodal);
        const double gap = (s1000.eigenvalues[b] - s1000.eigenvalues[a]) / s1000.eigenvalues[a];
        if (mixed && gap < 0.05) {
            const double dist = std::abs(s1000.eigenvalues[a] - 0.00508);
            if (dist < best_d) best_d = dist, best = a + 1;
        }
    }
    c(best > 0, "nodal/non-nodal pair within 5% in (0.004, 0.006)");
    if (best == 0) return c.o;
    for (std::size_t n : {best - 1, best}) {
        const double tau = s1000.eigenvalues[n];
        ArrivalMetrics am = unitary_arrival_metrics(s1000, n, unit, linspace(0.8 * tau, 1.2 * tau, 40));
        c(std::abs(am.argmin - tau) <= am.step * (1 + 1e-9),
          "tau " + num(tau, 8) + " (" + to_string(s1000.tags[n]) + "): arrival argmin " + num(am.argmin, 8) +
              ", step " + num(am.step, 3));
        const double coarse = s500.eigenvalues[s500.nearest(tau)];
        c(std::abs(coarse / tau - 1) <= 1e-3, "N 500 -> 1000 change " + num(std::abs(coarse / tau - 1), 3));
    }
    return c.o;
}

Outcome c6() {
    Checks c;
    Spectrum s = spectrum_on(unit, {-12, 1.5}, 0.005);
    for (double t : {0.05, 0.1}) {
        CovarianceResult r = covariance_check(sec4, unit, t, s);
        c(r.ks <= 1e-3 && !r.box_escape, "t = " + num(t, 2) + ": sup |F_t(tau - t) - F_0(tau)| = " + num(r.ks, 3) +
                                             " (density rel " + num(r.density_rel, 3) + ")");
    }
    return c.o;
}

Outcome c7() {
    Checks c;
    const auto grid = linspace(0.15, 0.35, 2001);
    std::vector<TOADistribution> d;
    std::vector<double> a2, floor;
    for (double mu : {1.0, 2.0, 3.0}) {
        const PhysicalParams p = PhysicalParams::natural(mu);
        const auto st = WavepacketSpec::from_sigma2(-5, 0.1, 20);
        Spectrum s = spectrum_on(p, {-12, 1.5}, 0.005);
        d.push_back(toa_distribution(gaussian(st, p), s, grid));
        floor.push_back(covariance_check(st, p, 0.05, s).density_l1);
        a2.push_back(std::abs(leading_expansion(st, p).correction2));
    }
    const double noise = *std::max_element(floor.begin(), floor.end());
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double l1 = l1_distance(grid, d[i].density, d[j].density);
            c(l1 > 10 * noise, "L1(mu" + std::to_string(i + 1) + ", mu" + std::to_string(j + 1) + ") = " + num(l1, 4) +
                                   " vs 10 x noise " + num(10 * noise, 3));
        }
    // the hbar^2 correction scales as 1/mu^2; the quantum delay and the peak follow its order
    const double tc = std::abs(leading_expansion(WavepacketSpec::from_sigma2(-5, 0.1, 20), unit).classical);
    c(std::abs(a2[1] * 4 / a2[0] - 1) < 1e-10 && std::abs(a2[2] * 9 / a2[0] - 1) < 1e-10, "|alpha2| ~ 1/mu^2");
    std::string shifts;
    for (const auto& x : d) shifts += (shifts.empty() ? "" : ", ") + num(x.mean - tc, 4);
    c(d[0].mean - tc > d[1].mean - tc && d[1].mean - tc > d[2].mean - tc && d[2].mean > tc,
      "<T> - tau0 decreasing in mu: " + shifts);
    c(d[0].peak < d[1].peak && d[1].peak < d[2].peak,
      "peaks " + num(d[0].peak, 4) + " < " + num(d[1].peak, 4) + " < " + num(d[2].peak, 4));
    return c.o;
}

double euler_2f1_half_one_two(double z) {
    // 2F1(1/2,1;2;z) = int_0^1 (1 - z t)^(-1/2) dt
    QuadratureRule r = composite_gauss_legendre(20, 0.0, 1.0, 64);
    double s = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] / std::sqrt(1 - z * r.nodes[i]);
    return s;
}

Outcome c8() {
    Checks c;
    {
        double res = 0;
        for (int i = 1; i <= 400; ++i) {
            const double x = 0.02 * i;  // up to 8: the plain series stays accurate
            res = std::max(res, std::abs(hyp0f1_series(2, -x * x / 4) - 2 * bessel_j1(x) / x));
        }
        for (int i = 1; i <= 400; ++i) {
            const double x = 0.1 * i;
            res = std::max(res, std::abs(hyp0f1(2, -x * x / 4) - 2 * std::cyl_bessel_j(1.0, x) / x));
        }
        c(res < 1e-12, "J1 / 0F1 residual " + num(res, 3));
    }
    {
        double res = 0;
        for (int i = 0; i <= 599; ++i) {
            const double z = -5 + 0.01 * i;  // [-5, 0.99]
            const double closed = 2 / (1 + std::sqrt(1 - z));
            res = std::max({res, std::abs(hyp2f1_row(0, z).real() - closed), std::abs(euler_2f1_half_one_two(z) - closed)});
        }
        c(res < 1e-10, "2F1(1/2,1;2;z) identity residual " + num(res, 3));
    }
    {
        bool zero = true;
        double gen = 0;
        for (int r : {1, 3, 5, 7})
            for (double v0 : {10.0, 30.0}) {
                auto st = WavepacketSpec::from_sigma2(-5, 0.1, v0);
                zero = zero && alpha_r_gaussian(r, st, unit) == cplx(0, 0);
                if (r <= 5) gen = std::max(gen, std::abs(alpha_r_general(gaussian_envelope(st), r, v0, unit)));
            }
        c(zero, "odd Gaussian corrections exactly zero (integral route max " + num(gen, 2) + ")");
    }
    {
        double res = 0;
        auto st = WavepacketSpec::from_sigma2(-1, 0.1, 6);
        for (Frame f : {Frame::launch, Frame::position})
            res = std::max(res, expect_toa_exact(gaussian(st, unit), {unit, f}).imag_residue);
        c(res < 1e-6, "relative imaginary residue " + num(res, 3));
    }
    {
        const auto fr = PhysicalParams::natural(1.0, 1e-12);
        QuadControl q;
        q.threads = hw_threads();
        const double v = std::abs(expect_toa_exact(gaussian(sec4, fr), {fr, Frame::launch}, q).value);
        c(std::abs(v / (5.0 / 30) - 1) < 0.01, "free limit " + num(v, 8) + " vs |q0|/v0 = " + num(5.0 / 30, 8));
    }
    {
        int bad = 0, cases = 0;
        for (double q0 : {-50.0, -10.0, -2.0, -0.5, 0.5, 2.0, 10.0, 50.0, 449.0, 451.0})
            for (double v0 : {1.0, 2.0, 5.0, 30.0}) {
                const double x = 2 * std::abs(q0) / (v0 * v0);
                Warnings w;
                toa_series_partial(unit, q0, v0, 5, &w);
                bad += (!w.empty()) != (x >= 1);
                for (double sigma : {1e-3, 0.5, 3.0}) {
                    Warnings ws;
                    spread_ok(WavepacketSpec{q0, sigma, v0}, unit, &ws);
                    bad += (!ws.empty()) != (sigma >= v0 * v0 - 2 * std::abs(q0));
                    ++cases;
                }
                ++cases;
            }
        c(bad == 0, "bound warnings match the margins in " + std::to_string(cases - bad) + "/" + std::to_string(cases) +
                        " cases (boundary 2g|q0|/v0^2 = 1 included)");
    }
    return c.o;
}

Outcome c9() {
    Checks c;
    auto a2 = [](double q0, double s2, double v0, PhysicalParams p = unit) {
        return std::abs(leading_expansion(WavepacketSpec::from_sigma2(q0, s2, v0), p).correction2);
    };
    c(a2(-5, 0.1, 10) > a2(-5, 0.1, 20) && a2(-5, 0.1, 20) > a2(-5, 0.1, 30), "|alpha2 hbar^2| decreasing in v0");
    c(a2(-5, 0.05, 30) > a2(-5, 0.1, 30) && a2(-5, 0.1, 30) > a2(-5, 0.5, 30), "decreasing in sigma");
    c(a2(100, 0.1, 30) < a2(300, 0.1, 30) && a2(300, 0.1, 30) < a2(440, 0.1, 30),
      "increasing toward the turning point (q0 = 100, 300, 440; v0^2/2g = 450)");
    // m_i fixed at 1, m_i/m_g in {0.5, 1, 2}
    auto split = [](double ratio) { return PhysicalParams{1, 1, 1.0, 1.0 / ratio}; };
    std::string d;
    bool corr = true;
    for (double v0 : {10.0, 20.0, 30.0}) {
        const double ref = a2(-5, 0.1, v0);
        const double lo = std::abs(a2(-5, 0.1, v0, split(0.5)) - ref), hi = std::abs(a2(-5, 0.1, v0, split(2)) - ref);
        corr = corr && lo > hi;
        if (v0 == 20.0) d = num(lo, 3) + " vs " + num(hi, 3);
    }
    c(corr, "correction shift ratio 0.5 > ratio 2 (v0 = 20: " + d + ")");
    const auto grid = linspace(0.15, 0.35, 2001);
    std::vector<TOADistribution> dist;
    for (double ratio : {0.5, 1.0, 2.0}) {
        const PhysicalParams p = split(ratio);
        Spectrum s = spectrum_on(p, {-12, 1.5}, 0.005);
        dist.push_back(toa_distribution(gaussian(WavepacketSpec::from_sigma2(-5, 0.1, 20), p), s, grid));
    }
    const double l_lo = l1_distance(grid, dist[0].density, dist[1].density);
    const double l_hi = l1_distance(grid, dist[2].density, dist[1].density);
    c(l_lo > l_hi, "distribution L1 from ratio 1: ratio 0.5 " + num(l_lo, 4) + " > ratio 2 " + num(l_hi, 4));
    return c.o;
}

const char* const kTitles[] = {"exact expectation",
                               "semiclassical pair",
                               "tunneling regime",
                               "Cs benchmark",
                               "spectral properties",
                               "covariance",
                               "WEP violation",
                               "property suites",
                               "trend suite"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toalab acceptance checks"};
    int only = 0;
    app.add_option("--only", only, "run a single criterion")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Outcome()>> all = {c1, c2, c3, c4, c5, c6, c7, c8, c9};
    int failed = 0;
    for (int k = 1; k <= 9; ++k) {
        if (only && k != only) continue;
        Outcome o;
        try {
            o = all[k - 1]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("criterion %d (%s): %s  %s\n", k, kTitles[k - 1], o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
