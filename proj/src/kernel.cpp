#include "toalab/kernel.hpp"

#include <cmath>

namespace toalab {

const char* to_string(Frame f) { return f == Frame::launch ? "launch" : "position"; }

Frame frame_from_string(const std::string& s) {
    if (s == "launch") return Frame::launch;
    if (s == "position") return Frame::position;
    throw InputError("frame must be 'launch' or 'position', got '" + s + "'");
}

namespace {
inline double sgn(double x) { return (x > 0) - (x < 0); }

double launch_imag(double q, double qp, double mu, double g, double hb) {
    const double s = q + qp, d = q - qp;
    if (d == 0.0) return 0.0;
    const double z = -mu * mu * g * s * d * d / (4.0 * hb * hb);
    return mu / hb * 0.5 * s * sgn(d) * 0.5 * hyp0f1(2.0, z);
}
}  // namespace

double kernel_imag(double q, double qp, const KernelSpec& spec) {
    const double mu = spec.mu(), g = spec.g(), hb = spec.hbar();
    if (spec.frame == Frame::launch) return launch_imag(q, qp, mu, g, hb);
    return -launch_imag(-q, -qp, mu, g, hb);
}

cplx kernel_value(double q, double qp, const KernelSpec& spec) { return {0.0, kernel_imag(q, qp, spec)}; }

cplx weyl_series_kernel(double q, double qp, const KernelSpec& spec, int n_max) {
    if (n_max < 0) throw InputError("weyl_series_kernel: n_max must be >= 0");
    double sign_frame = 1.0;
    if (spec.frame == Frame::position) {
        q = -q;
        qp = -qp;
        sign_frame = -1.0;
    }
    const double mu = spec.mu(), g = spec.g(), hb = spec.hbar();
    const double d = q - qp;
    if (d == 0.0) return 0.0;
    cplx sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        // sum_k C(n+1,k) q^k q'^{n+1-k}
        double poly = 0.0;
        for (int k = 0; k <= n + 1; ++k)
            poly += std::exp(std::lgamma(n + 2.0) - std::lgamma(k + 1.0) - std::lgamma(n + 2.0 - k)) *
                    std::pow(q, k) * std::pow(qp, n + 1 - k);
        // <q|p^{-(2n+1)}|q'> = (i/2) (-1)^n (q-q')^{2n} sgn(q-q') / (hbar^{2n+1} (2n)!)
        double pm = 0.5 * (n % 2 ? -1.0 : 1.0) * std::pow(d, 2 * n) * sgn(d) /
                    (std::pow(hb, 2 * n + 1) * std::tgamma(2.0 * n + 1.0));
        double coef = 2.0 * mu * binomial_half(n + 1) * std::pow(-2.0 * mu * mu * g, n) / std::pow(2.0, n + 1);
        sum += cplx(0.0, coef * poly * pm);
    }
    return sign_frame * sum;
}

}  // namespace toalab
