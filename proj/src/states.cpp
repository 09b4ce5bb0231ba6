#include "toalab/states.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace toalab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx I(0.0, 1.0);

std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

ComplexAmplitude gaussian(const WavepacketSpec& s, const PhysicalParams& p) {
    s.validate();
    const double sig = s.sigma, q0 = s.q0;
    const double norm = 1.0 / std::sqrt(sig * std::sqrt(2.0 * kPi));
    ComplexAmplitude a;
    a.envelope = [=](double q) {
        double d = q - q0;
        return cplx(norm * std::exp(-d * d / (4.0 * sig * sig)), 0.0);
    };
    a.k = p.mu() * s.v0 / p.hbar;
    a.lo = q0 - kSupportSigmas * sig;
    a.hi = q0 + kSupportSigmas * sig;
    a.scale = sig;
    a.kind = AmplitudeKind::gaussian;
    a.spec = s;
    return a;
}

cplx evolved_gaussian_value(const WavepacketSpec& s, const PhysicalParams& p, double t, double q) {
    const double mu = p.mu(), g = p.g_eff(), hb = p.hbar;
    const double sig = s.sigma, q0 = s.q0, v0 = s.v0;
    const cplx st = sig * (1.0 + I * hb * t / (2.0 * mu * sig * sig));
    const double d = q - q0 - v0 * t + 0.5 * g * t * t;
    cplx val = 1.0 / std::sqrt(st * std::sqrt(2.0 * kPi)) * std::exp(-d * d / (4.0 * st * sig));
    double phase = mu * v0 * q0 / hb - mu * q0 * g * t / hb - mu * g * g * t * t * t / (6.0 * hb) +
                   mu / hb * (v0 - g * t) * (q - q0 - 0.5 * v0 * t);
    return val * std::polar(1.0, phase);
}

ComplexAmplitude evolved_gaussian(const WavepacketSpec& s, const PhysicalParams& p, double t) {
    s.validate();
    if (t < 0) throw InputError("evolved_gaussian: t must be >= 0");
    const double mu = p.mu(), g = p.g_eff(), hb = p.hbar, sig = s.sigma;
    const double spread = hb * t / (2.0 * mu * sig * sig);
    const double sig_t = sig * std::sqrt(1.0 + spread * spread);
    const double c = s.q0 + s.v0 * t - 0.5 * g * t * t;
    const double kt = mu * (s.v0 - g * t) / hb;
    ComplexAmplitude a;
    a.envelope = [=](double q) { return evolved_gaussian_value(s, p, t, q) * std::polar(1.0, -kt * q); };
    a.k = kt;
    a.lo = c - kSupportSigmas * sig_t;
    a.hi = c + kSupportSigmas * sig_t;
    // residual chirp from the complex width
    const cplx st = sig * (1.0 + I * spread);
    const double chirp = std::abs(std::imag(1.0 / (4.0 * st * sig))) * 2.0 * kSupportSigmas * sig_t;
    a.scale = std::min(sig_t, 1.0 / std::max(chirp, 1e-300));
    a.kind = AmplitudeKind::evolved_gaussian;
    a.spec = s;
    return a;
}

namespace {
cplx propagate_once(const ComplexAmplitude& phi0, double t, const PhysicalParams& p, double q,
                    int order, double width) {
    const double mu = p.mu(), g = p.g_eff(), hb = p.hbar;
    QuadratureRule r = panel_rule(order, phi0.lo, phi0.hi, width);
    cplx sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        double qp = r.nodes[i];
        double ph = mu * (q - qp) * (q - qp) / (2.0 * t * hb) - mu * g * (q + qp) * t / (2.0 * hb);
        sum += r.weights[i] * std::polar(1.0, ph) * phi0(qp);
    }
    // sqrt(mu / (2 pi i hbar t)) exp(-i mu g^2 t^3 / 24 hbar)
    cplx pre = std::sqrt(mu / (2.0 * kPi * hb * t)) * std::polar(1.0, -kPi / 4.0) *
               std::polar(1.0, -mu * g * g * t * t * t / (24.0 * hb));
    return pre * sum;
}
}  // namespace

cplx propagate_linear_value(const ComplexAmplitude& phi0, double t, const PhysicalParams& p, double q,
                            const PropagationControl& ctrl) {
    if (t < 0) throw InputError("propagate_linear: t must be >= 0");
    if (t == 0) return phi0(q);
    const double mu = p.mu(), g = p.g_eff(), hb = p.hbar;
    double dmax = std::max(std::abs(q - phi0.lo), std::abs(q - phi0.hi));
    double omega = mu * dmax / (hb * t) + mu * g * t / (2.0 * hb) + std::abs(phi0.k);
    double width = std::min(phi0.scale, 0.5 * kPi / omega);
    cplx prev = propagate_once(phi0, t, p, q, ctrl.order, width);
    for (int it = 0; it < ctrl.max_refine; ++it) {
        width *= 0.5;
        cplx cur = propagate_once(phi0, t, p, q, ctrl.order, width);
        if (std::abs(cur - prev) <= ctrl.tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    throw NumericalError("propagate_linear: quadrature did not converge");
}

ComplexAmplitude propagate_linear(const ComplexAmplitude& phi0, double t, const PhysicalParams& p,
                                  const PropagationControl& ctrl) {
    if (t == 0) return phi0;
    const double mu = p.mu(), g = p.g_eff(), hb = p.hbar;
    const double w0 = 0.5 * (phi0.hi - phi0.lo);
    const double s0 = w0 / kSupportSigmas;
    const double spread = hb * t / (2.0 * mu * s0 * s0);
    const double w = w0 * std::sqrt(1.0 + spread * spread);
    const double c = 0.5 * (phi0.lo + phi0.hi) + hb * phi0.k / mu * t - 0.5 * g * t * t;
    const double kt = phi0.k - mu * g * t / hb;
    ComplexAmplitude a;
    a.envelope = [=](double q) {
        return propagate_linear_value(phi0, t, p, q, ctrl) * std::polar(1.0, -kt * q);
    };
    a.k = kt;
    a.lo = c - w;
    a.hi = c + w;
    a.scale = phi0.scale / (1.0 + spread);
    a.kind = AmplitudeKind::propagated;
    return a;
}

double GridAmplitude::norm2() const {
    double s = 0.0;
    for (auto& x : v) s += std::norm(x);
    return s * h();
}

GridAmplitude sample(const ComplexAmplitude& a, double lo, double h, std::size_t n) {
    GridAmplitude g;
    g.q.resize(n);
    g.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.q[i] = lo + h * double(i);
        g.v[i] = a(g.q[i]);
    }
    return g;
}

ComplexAmplitude from_grid(const GridAmplitude& g) {
    if (g.q.size() < 2) throw InputError("from_grid: need at least two points");
    auto shared = std::make_shared<GridAmplitude>(g);
    ComplexAmplitude a;
    a.envelope = [shared](double q) -> cplx {
        const auto& G = *shared;
        double h = G.h();
        double x = (q - G.q.front()) / h;
        if (x < 0 || x > double(G.q.size() - 1)) return 0.0;
        std::size_t i = std::min<std::size_t>(std::size_t(x), G.q.size() - 2);
        double f = x - double(i);
        return (1.0 - f) * G.v[i] + f * G.v[i + 1];
    };
    a.k = 0.0;
    a.lo = g.q.front();
    a.hi = g.q.back();
    a.scale = g.h() * 4.0;
    a.kind = AmplitudeKind::numeric_grid;
    return a;
}

GridAmplitude evolve_fft(const GridAmplitude& psi, double t, const PhysicalParams& p, double pad) {
    const double h = psi.h();
    if (!(h > 0)) throw InputError("evolve_fft: grid needs spacing");
    const double mu = p.mu(), g = p.g_eff(), hb = p.hbar;
    const double lo = std::min(-pad, psi.q.front()), hi = std::max(pad, psi.q.back());
    const long off = long(std::ceil((psi.q.front() - lo) / h - 1e-9));
    const long need = long(std::ceil((hi - lo) / h)) + 2 + long(psi.q.size());
    std::size_t n = 1;
    while (long(n) < need) n <<= 1;

    std::vector<cplx> buf(n, 0.0);
    for (std::size_t i = 0; i < psi.v.size(); ++i) buf[off + i] = psi.v[i];
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lk(fftw_plan_mutex());
        fwd = fftw_plan_dft_1d(int(n), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(int(n), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    const double a = 0.5 * g * t * t;
    for (std::size_t j = 0; j < n; ++j) {
        double kk = 2.0 * kPi * (j < n / 2 ? double(j) : double(j) - double(n)) / (double(n) * h);
        buf[j] *= std::polar(1.0 / double(n), kk * a - hb * kk * kk * t / (2.0 * mu));
    }
    fftw_execute(bwd);
    {
        std::lock_guard<std::mutex> lk(fftw_plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    GridAmplitude out;
    out.q.resize(n);
    out.v.resize(n);
    const double x0 = psi.q.front() - double(off) * h;
    for (std::size_t j = 0; j < n; ++j) {
        double x = x0 + double(j) * h;
        out.q[j] = x;
        out.v[j] = buf[j] * std::polar(1.0, -(mu * g * t * x / hb + mu * g * g * t * t * t / (6.0 * hb)));
    }
    return out;
}

double grid_mean(const GridAmplitude& g) {
    double s = 0, m = 0;
    for (std::size_t i = 0; i < g.q.size(); ++i) {
        s += std::norm(g.v[i]);
        m += g.q[i] * std::norm(g.v[i]);
    }
    return m / s;
}

double grid_variance(const GridAmplitude& g) {
    double s = 0, m = 0, m2 = 0;
    for (std::size_t i = 0; i < g.q.size(); ++i) {
        double d = std::norm(g.v[i]);
        s += d;
        m += g.q[i] * d;
        m2 += g.q[i] * g.q[i] * d;
    }
    m /= s;
    return m2 / s - m * m;
}

}  // namespace toalab
