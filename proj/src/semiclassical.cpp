#include "toalab/semiclassical.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace toalab {

namespace {
constexpr double kPi = std::numbers::pi;

double choose(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}
}  // namespace

Envelope gaussian_envelope(const WavepacketSpec& s) {
    s.validate();
    const double sig = s.sigma, q0 = s.q0;
    const double norm = 1.0 / std::sqrt(sig * std::sqrt(2.0 * kPi));
    Envelope e;
    // d^n/dx^n e^{-u^2} = (-1)^n (2 sigma)^{-n} H_n(u) e^{-u^2}, u = (x-q0)/(2 sigma)
    e.deriv = [=](int n, double x) {
        double u = (x - q0) / (2.0 * sig);
        double v = norm * std::exp(-u * u) * hermite(n, u) * std::pow(-1.0 / (2.0 * sig), n);
        return cplx(v, 0.0);
    };
    e.max_order = 64;
    e.lo = q0 - kSupportSigmas * sig;
    e.hi = q0 + kSupportSigmas * sig;
    e.scale = sig;
    return e;
}

Envelope grid_envelope(const GridAmplitude& g) {
    if (g.q.size() < 9) throw InputError("grid_envelope: need at least 9 points");
    auto G = std::make_shared<GridAmplitude>(g);
    Envelope e;
    e.deriv = [G](int n, double x) -> cplx {
        const double h = G->h();
        auto at = [&](double y) -> cplx {
            double t = (y - G->q.front()) / h;
            if (t < 0 || t > double(G->q.size() - 1)) return 0.0;
            std::size_t i = std::min<std::size_t>(std::size_t(t), G->q.size() - 2);
            double f = t - double(i);
            return (1.0 - f) * G->v[i] + f * G->v[i + 1];
        };
        // central differences, O(h^2)
        switch (n) {
            case 0: return at(x);
            case 1: return (at(x + h) - at(x - h)) / (2 * h);
            case 2: return (at(x + h) - 2.0 * at(x) + at(x - h)) / (h * h);
            case 3: return (at(x + 2 * h) - 2.0 * at(x + h) + 2.0 * at(x - h) - at(x - 2 * h)) / (2 * h * h * h);
            case 4:
                return (at(x + 2 * h) - 4.0 * at(x + h) + 6.0 * at(x) - 4.0 * at(x - h) + at(x - 2 * h)) /
                       (h * h * h * h);
            default: throw InputError("grid envelopes support derivative order <= 4");
        }
    };
    e.max_order = 4;
    e.lo = g.q.front();
    e.hi = g.q.back();
    e.scale = 4.0 * g.h();
    return e;
}

cplx wr(const Envelope& env, int r, double x) {
    if (r < 0) throw InputError("wr: r must be >= 0");
    if (r > env.max_order) throw InputError("wr: order exceeds what the envelope supports");
    cplx s = 0.0;
    for (int q = 0; q <= r; ++q)
        s += choose(r, q) * (q % 2 ? -1.0 : 1.0) * std::conj(env.deriv(q, x)) * env.deriv(r - q, x);
    return s;
}

double wr_gaussian(const WavepacketSpec& s, int r, double x) {
    const double sig = s.sigma;
    const double u = (x - s.q0) / (2.0 * sig);
    const double dens = std::exp(-2.0 * u * u) / (sig * std::sqrt(2.0 * kPi));
    return (r % 2 ? -1.0 : 1.0) * std::pow(2.0, 0.5 * r) * hermite(r, 0.0) * std::pow(2.0 * sig, -r) * dens;
}

namespace {

// int_{lo}^{hi} f(x) dx, split at the branch point if inside; halving until stable
template <class F>
cplx integrate_split(F&& f, double lo, double hi, double width, double cut, const IntegralControl& ctrl) {
    auto once = [&](double w) {
        cplx s = 0.0;
        auto add = [&](double a, double b) {
            if (b <= a) return;
            QuadratureRule r = panel_rule(ctrl.order, a, b, w);
            s += r.integrate(f);
        };
        if (cut > lo && cut < hi) {
            add(lo, cut);
            add(cut, hi);
        } else {
            add(lo, hi);
        }
        return s;
    };
    cplx prev = once(width);
    for (int it = 0; it < ctrl.max_refine; ++it) {
        width *= 0.5;
        cplx cur = once(width);
        if (std::abs(cur - prev) <= ctrl.tol * std::max(std::abs(cur), 1e-300)) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace

cplx tau0(const WavepacketSpec& s, const PhysicalParams& p, CutSide side, Warnings* w) {
    s.validate();
    if (s.v0 == 0.0) throw InputError("tau0: v0 must be nonzero");
    const double g = p.g_eff(), v0 = s.v0;
    const double cut = v0 * v0 / (2.0 * g);
    Envelope env = gaussian_envelope(s);
    if (cut > env.lo && cut < env.hi) warn(w, "tau0: packet support crosses the branch point v0^2/2g");
    auto f = [&](double x) {
        double d = std::norm(env.deriv(0, x));
        return hyp2f1_row(0, 2.0 * g * x / (v0 * v0), side) * x * d;
    };
    return integrate_split(f, env.lo, env.hi, 0.5 * s.sigma, cut, IntegralControl{}) / v0;
}

cplx tau0_point(const WavepacketSpec& s, const PhysicalParams& p, CutSide side) {
    if (s.v0 == 0.0) throw InputError("tau0_point: v0 must be nonzero");
    // x * 2F1(1/2,1;2;2gx/v0^2) / v0 at x = q0
    return s.q0 * hyp2f1_row(0, 2.0 * p.g_eff() * s.q0 / (s.v0 * s.v0), side) / s.v0;
}

cplx alpha_r_general(const Envelope& env, int r, double v0, const PhysicalParams& p, CutSide side,
                     const IntegralControl& ctrl, Warnings* w) {
    if (r < 1) throw InputError("alpha_r_general: r must be >= 1");
    if (v0 == 0.0) throw InputError("alpha_r_general: v0 must be nonzero");
    const double g = p.g_eff(), mu = p.mu();
    const double cut = v0 * v0 / (2.0 * g);
    if (cut > env.lo && cut < env.hi) warn(w, "alpha_r_general: support crosses the branch point v0^2/2g");
    auto f = [&](double x) { return x * hyp2f1_row(r, 2.0 * g * x / (v0 * v0), side) * wr(env, r, x); };
    cplx integral = integrate_split(f, env.lo, env.hi, 0.5 * env.scale, cut, ctrl);
    cplx pre = std::pow(cplx(0.0, 1.0 / (mu * v0)), r) * std::tgamma((r + 1) / 2.0) * std::tgamma((r + 2) / 2.0) /
               (std::tgamma(r + 1.0) * std::sqrt(kPi) * v0);
    return pre * integral;
}

cplx alpha_r_gaussian(int r, const WavepacketSpec& s, const PhysicalParams& p, CutSide side, Warnings* w) {
    if (r < 1) throw InputError("alpha_r_gaussian: r must be >= 1");
    if (s.v0 == 0.0) throw InputError("alpha_r_gaussian: v0 must be nonzero");
    spread_ok(s, p, w);
    if (r % 2 == 1) return 0.0;  // Gamma((1-r)/2) has a pole
    const double mu = p.mu(), g = p.g_eff(), v0 = s.v0, sig = s.sigma;
    cplx base = -std::pow(2.0, 2.5) / (4.0 * cplx(0.0, 1.0) * sig * mu * v0);
    cplx pre = s.q0 / v0 * std::pow(base, r) * std::tgamma((r + 1) / 2.0) * std::tgamma((r + 2) / 2.0) /
               (std::tgamma((1.0 - r) / 2.0) * std::tgamma(r + 1.0));
    return pre * hyp2f1_row(r, 2.0 * g * s.q0 / (v0 * v0), side);
}

LeadingExpansion leading_expansion(const WavepacketSpec& s, const PhysicalParams& p, CutSide side, Warnings* w) {
    LeadingExpansion e;
    e.classical = tau0_point(s, p, side);
    e.correction2 = alpha_r_gaussian(2, s, p, side, w) * p.hbar * p.hbar;
    e.total = e.classical + e.correction2;
    e.complex_regime = 2.0 * p.g_eff() * s.q0 / (s.v0 * s.v0) > 1.0;
    if (e.complex_regime) warn(w, "leading_expansion: 2 g q0 / v0^2 > 1, result is complex (non-arrival)");
    return e;
}

std::vector<ExpansionTerm> expansion_terms(const WavepacketSpec& s, const PhysicalParams& p, int r_max,
                                           CutSide side, Warnings* w) {
    if (r_max < 0) throw InputError("expansion_terms: r_max must be >= 0");
    std::vector<ExpansionTerm> out;
    cplx t0 = tau0_point(s, p, side);
    out.push_back({0, t0, t0});
    for (int r = 1; r <= r_max; ++r) {
        cplx a = alpha_r_gaussian(r, s, p, side, r == 1 ? w : nullptr);
        out.push_back({r, a, a * std::pow(p.hbar, r)});
    }
    return out;
}

}  // namespace toalab
