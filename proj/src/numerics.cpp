#include "toalab/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace toalab {

double bessel_j1(double x) {
    if (x == 0.0) return 0.0;
    if (x < 0.0) return -std::cyl_bessel_j(1.0, -x);
    return std::cyl_bessel_j(1.0, x);
}

double bessel_i1(double x) {
    if (x == 0.0) return 0.0;
    if (x < 0.0) return -std::cyl_bessel_i(1.0, -x);
    return std::cyl_bessel_i(1.0, x);
}

double hyp0f1_series(double b, double z) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 500; ++k) {
        term *= z / ((b + k) * (k + 1));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double hyp0f1(double b, double z) {
    if (!(b > 0.0)) throw InputError("hyp0f1: b must be positive");
    // series is cheap and accurate near the origin
    if (std::abs(z) < 1.0 || b != 2.0) {
        if (std::abs(z) > 50.0 && b != 2.0) {
            // general b through Bessel functions of order b-1
            double s = std::sqrt(std::abs(z));
            double pref = std::tgamma(b) * std::pow(s, 1.0 - b);
            return z < 0 ? pref * std::cyl_bessel_j(b - 1.0, 2.0 * s)
                         : pref * std::cyl_bessel_i(b - 1.0, 2.0 * s);
        }
        return hyp0f1_series(b, z);
    }
    double s = std::sqrt(std::abs(z));
    // 0F1(;2;-s^2) = J1(2s)/s ; 0F1(;2;s^2) = I1(2s)/s
    return z < 0 ? std::cyl_bessel_j(1.0, 2.0 * s) / s : std::cyl_bessel_i(1.0, 2.0 * s) / s;
}

const char* to_string(CutSide s) { return s == CutSide::below ? "below" : "above"; }

CutSide cut_side_from_string(const std::string& s) {
    if (s == "below") return CutSide::below;
    if (s == "above") return CutSide::above;
    throw InputError("branch must be 'below' or 'above', got '" + s + "'");
}

namespace {
double poch(double a, int k) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= a + i;
    return p;
}
}  // namespace

// Closed form in terms of s = sqrt(1-z), w = (1-s)/(1+s):
//   row(0,z) = 2/(1+s)
//   row(r,z) = (2/(1+s))^{r+1} (1-w)^{1-2r} sum_{k<r} (1-r)_k (2-r)_k / ((2)_k k!) w^k
// Quadratic transformation of 2F1(a, a+1/2; 2; z); terminates since 1-r is a nonpositive integer.
cplx hyp2f1_row(int r, double z, CutSide side) {
    if (r < 0) throw InputError("hyp2f1_row: r must be >= 0");
    if (z == 1.0) {
        if (r == 0) return {2.0, 0.0};
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    if (z < 1.0) {
        double s = std::sqrt(1.0 - z);
        double pre = 2.0 / (1.0 + s);
        if (r == 0) return {pre, 0.0};
        double w = (1.0 - s) / (1.0 + s);
        double sum = 0.0, wk = 1.0;
        for (int k = 0; k < r; ++k) {
            sum += poch(1.0 - r, k) * poch(2.0 - r, k) / (poch(2.0, k) * std::tgamma(k + 1.0)) * wk;
            wk *= w;
        }
        return {std::pow(pre, r + 1) * std::pow(1.0 - w, 1 - 2 * r) * sum, 0.0};
    }
    double im = std::sqrt(z - 1.0);
    cplx s(0.0, side == CutSide::below ? im : -im);
    cplx pre = 2.0 / (1.0 + s);
    if (r == 0) return pre;
    cplx w = (1.0 - s) / (1.0 + s);
    cplx sum = 0.0, wk = 1.0;
    for (int k = 0; k < r; ++k) {
        sum += poch(1.0 - r, k) * poch(2.0 - r, k) / (poch(2.0, k) * std::tgamma(k + 1.0)) * wk;
        wk *= w;
    }
    return std::pow(pre, r + 1) * std::pow(1.0 - w, 1 - 2 * r) * sum;
}

double hyp2f1_row_series(int r, double z) {
    if (std::abs(z) >= 1.0) throw InputError("hyp2f1_row_series: needs |z| < 1");
    double a = (r + 1) / 2.0, b = (r + 2) / 2.0, c = 2.0;
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 200000; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double hermite(int n, double z) {
    if (n < 0) throw InputError("hermite: n must be >= 0");
    if (n == 0) return 1.0;
    double h0 = 1.0, h1 = 2.0 * z;
    for (int k = 1; k < n; ++k) {
        double h2 = 2.0 * z * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n <= 0) throw InputError("gauss_legendre: n must be positive");
    if (!(a < b)) throw InputError("gauss_legendre: need a < b");
    QuadratureRule q;
    q.a = a;
    q.b = b;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    // Newton on P_n from the Tricomi initial guess; nodes come out descending
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                // one more derivative evaluation at the converged point
                p0 = 1.0;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                if (n == 1) p0 = 1.0;
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.nodes[i] = c - hw * x;
        q.nodes[n - 1 - i] = c + hw * x;
        q.weights[i] = q.weights[n - 1 - i] = hw * w;
    }
    if (n % 2 == 1) q.nodes[n / 2] = c;
    return q;
}

QuadratureRule composite_gauss_legendre(int n, double a, double b, int panels) {
    if (panels <= 0) throw InputError("composite_gauss_legendre: panels must be positive");
    QuadratureRule base = gauss_legendre(n, -1.0, 1.0);
    QuadratureRule q;
    q.a = a;
    q.b = b;
    q.nodes.reserve(std::size_t(n) * panels);
    q.weights.reserve(std::size_t(n) * panels);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * h;
        for (int i = 0; i < n; ++i) {
            q.nodes.push_back(lo + 0.5 * h * (base.nodes[i] + 1.0));
            q.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return q;
}

QuadratureRule panel_rule(int n, double a, double b, double max_width) {
    if (!(max_width > 0)) throw InputError("panel_rule: width must be positive");
    int panels = std::max(1, int(std::ceil((b - a) / max_width - 1e-12)));
    return composite_gauss_legendre(n, a, b, panels);
}

double binomial_half(int k) {
    // C(1/2,k) = Gamma(3/2) / (Gamma(k+1) Gamma(3/2-k)), via lgamma with sign
    if (k < 0) return 0.0;
    double lg = std::lgamma(1.5) - std::lgamma(k + 1.0) - std::lgamma(1.5 - k);
    // Gamma(3/2-k) < 0 when k-1 is odd (k >= 2)
    double sgn = (k >= 2 && (k - 1) % 2 == 1) ? -1.0 : 1.0;
    return sgn * std::exp(lg);
}

}  // namespace toalab
