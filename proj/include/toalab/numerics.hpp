#pragma once
// Special functions and quadrature rules.

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace toalab {

using cplx = std::complex<double>;

// Raised for numerical failures (non-convergence, eigensolver errors).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for invalid inputs / configurations.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Collects non-fatal diagnostics. Functions take an optional pointer.
struct Warnings {
    std::vector<std::string> items;
    void add(std::string s) { items.push_back(std::move(s)); }
    bool empty() const { return items.empty(); }
};
inline void warn(Warnings* w, std::string s) {
    if (w) w->add(std::move(s));
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = 0.0, b = 0.0;

    template <class F>
    auto integrate(F&& f) const -> decltype(f(0.0)) {
        decltype(f(0.0)) s{};
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
    std::size_t size() const { return nodes.size(); }
};

double bessel_j1(double x);
double bessel_i1(double x);

// 0F1(;b;z). b = 2 takes the Bessel route, other b > 0 use the series.
double hyp0f1(double b, double z);
// series only, used as an oracle
double hyp0f1_series(double b, double z);

// Side of the cut [1, inf) used for z > 1.
// below = limit from z - i0, above = z + i0.
enum class CutSide { below, above };
const char* to_string(CutSide s);
CutSide cut_side_from_string(const std::string& s);

// 2F1((r+1)/2, (r+2)/2; 2; z). Real (imag exactly 0) for z < 1.
// At z = 1: finite (=2) for r = 0, +inf real part for r >= 1.
cplx hyp2f1_row(int r, double z, CutSide side = CutSide::below);
// direct power series, |z| < 1 only (oracle)
double hyp2f1_row_series(int r, double z);

// physicists' Hermite polynomial
double hermite(int n, double z);

QuadratureRule gauss_legendre(int n, double a, double b);
// n-point rule on each of `panels` equal panels of [a,b]
QuadratureRule composite_gauss_legendre(int n, double a, double b, int panels);
// panels no wider than max_width
QuadratureRule panel_rule(int n, double a, double b, double max_width);

double binomial_half(int k);  // C(1/2, k)

}  // namespace toalab
