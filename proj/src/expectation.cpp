#include "toalab/expectation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace toalab {

namespace {

constexpr double kPi = std::numbers::pi;

double base_width(const ComplexAmplitude& phi, const KernelSpec& spec, const QuadControl& ctrl) {
    const double smax = 2.0 * std::max(std::abs(phi.lo), std::abs(phi.hi));
    const double omega =
        std::abs(phi.k) + spec.mu() * std::sqrt(spec.g() * smax) / spec.hbar() + 1e-300;
    return std::min(0.5 * phi.scale, ctrl.panel_fraction * 2.0 * kPi / omega);
}

void check_support(const ComplexAmplitude& phi, std::vector<std::string>& warnings) {
    double peak = 0.0;
    const int n = 2001;
    for (int i = 0; i < n; ++i) {
        double q = phi.lo + (phi.hi - phi.lo) * i / (n - 1.0);
        peak = std::max(peak, std::abs(phi.envelope(q)));
    }
    double edge = std::max(std::abs(phi.envelope(phi.lo)), std::abs(phi.envelope(phi.hi)));
    if (peak > 0 && edge > 1e-10 * peak) {
        std::ostringstream os;
        os << "support truncation: |phi| at boundary is " << edge / peak << " of peak";
        warnings.push_back(os.str());
    }
}

// Evaluate f(i) for i in [0,n) on `threads` workers, results in a vector (deterministic order).
template <class F>
std::vector<cplx> parallel_map(int n, int threads, F&& f) {
    std::vector<cplx> out(n);
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += threads) out[i] = f(i);
        });
    for (auto& th : pool) th.join();
    return out;
}

// Sum of a GL panel rule over [a,b] with panels no wider than width.
template <class F>
cplx panel_sum(const QuadratureRule& base, double a, double b, double width, F&& f) {
    if (!(b > a)) return 0.0;
    int panels = std::max(1, int(std::ceil((b - a) / width - 1e-12)));
    double h = (b - a) / panels;
    cplx s = 0.0;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * h;
        for (std::size_t i = 0; i < base.size(); ++i)
            s += 0.5 * h * base.weights[i] * f(lo + 0.5 * h * (base.nodes[i] + 1.0));
    }
    return s;
}

cplx direct_level(const ComplexAmplitude& phi, const KernelSpec& spec, const QuadControl& ctrl,
                  double width, int& panels_out) {
    const QuadratureRule base = gauss_legendre(ctrl.order, -1.0, 1.0);
    const QuadratureRule outer = panel_rule(ctrl.order, phi.lo, phi.hi, width);
    panels_out = int(outer.size()) / ctrl.order;
    auto per_node = [&](int i) -> cplx {
        const double q = outer.nodes[i];
        auto inner = [&](double qp) { return kernel_imag(q, qp, spec) * phi(qp); };
        cplx s = panel_sum(base, phi.lo, q, width, inner) + panel_sum(base, q, phi.hi, width, inner);
        // K = i * kernel_imag
        return outer.weights[i] * std::conj(phi(q)) * cplx(0.0, 1.0) * s;
    };
    auto parts = parallel_map(int(outer.size()), ctrl.threads, per_node);
    cplx total = 0.0;
    for (auto& p : parts) total += p;
    return total;
}

cplx centered_level(const ComplexAmplitude& phi, const KernelSpec& spec, const QuadControl& ctrl,
                    double width, int& panels_out) {
    const double mu = spec.mu(), g = spec.g(), hb = spec.hbar(), k = phi.k;
    const double fsign = spec.frame == Frame::launch ? -1.0 : 1.0;  // sign of the 0F1 argument
    const double ksign = spec.frame == Frame::launch ? 1.0 : -1.0;  // overall kernel sign
    const QuadratureRule outer = panel_rule(ctrl.order, phi.lo, phi.hi, width);
    const QuadratureRule inner = panel_rule(ctrl.order, 0.0, 0.5 * (phi.hi - phi.lo), width);
    panels_out = int(outer.size()) / ctrl.order;
    auto per_node = [&](int i) -> cplx {
        const double x = outer.nodes[i];
        cplx s = 0.0;
        for (std::size_t j = 0; j < inner.size(); ++j) {
            const double y = inner.nodes[j];
            const double F = hyp0f1(2.0, fsign * 2.0 * mu * mu * g * x * y * y / (hb * hb));
            const cplx a = std::conj(phi.envelope(x + y)) * phi.envelope(x - y);
            const cplx b = std::conj(phi.envelope(x - y)) * phi.envelope(x + y);
            s += inner.weights[j] * F * (std::polar(1.0, -2.0 * k * y) * a - std::polar(1.0, 2.0 * k * y) * b);
        }
        return outer.weights[i] * x * s;
    };
    auto parts = parallel_map(int(outer.size()), ctrl.threads, per_node);
    cplx total = 0.0;
    for (auto& p : parts) total += p;
    return ksign * cplx(0.0, mu / hb) * total;
}

template <class Level>
ExpectationResult converge(const ComplexAmplitude& phi, const KernelSpec& spec, const QuadControl& ctrl,
                           Level&& level, const char* name) {
    ExpectationResult r;
    r.tol = ctrl.tol;
    check_support(phi, r.warnings);
    double width = base_width(phi, spec, ctrl);
    int panels = 0;
    cplx prev = level(phi, spec, ctrl, width, panels);
    for (int it = 1; it <= ctrl.max_refine; ++it) {
        width *= 0.5;
        cplx cur = level(phi, spec, ctrl, width, panels);
        double ch = std::abs(cur.real() - prev.real()) / std::max(std::abs(cur.real()), 1e-300);
        prev = cur;
        r.change = ch;
        r.refinements = it;
        r.panels = panels;
        if (ch <= ctrl.tol) {
            r.value = cur.real();
            r.imag_residue = std::abs(cur.imag()) / std::max(std::abs(cur.real()), 1e-300);
            return r;
        }
    }
    std::ostringstream os;
    os << name << ": no convergence after " << ctrl.max_refine << " halvings (last change " << r.change << ")";
    throw NumericalError(os.str());
}

}  // namespace

ExpectationResult expect_toa_exact(const ComplexAmplitude& phi, const KernelSpec& spec, const QuadControl& ctrl) {
    return converge(phi, spec, ctrl, direct_level, "expect_toa_exact");
}

ExpectationResult expect_toa_centered(const ComplexAmplitude& phi, const KernelSpec& spec,
                                      const QuadControl& ctrl) {
    return converge(phi, spec, ctrl, centered_level, "expect_toa_centered");
}

}  // namespace toalab
