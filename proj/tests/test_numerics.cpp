#include <doctest.h>
#include <gsl/gsl_sf_hyperg.h>

#include <cmath>
#include <numbers>

#include "toalab/numerics.hpp"

using namespace toalab;

namespace {

// J1(x) = (1/2pi) int_0^{2pi} cos(t - x sin t) dt; trapezoid is spectrally accurate here
double j1_trapezoid(double x) {
    const int n = 1024;
    double s = 0;
    for (int k = 0; k < n; ++k) {
        double t = 2 * std::numbers::pi * k / n;
        s += std::cos(t - x * std::sin(t));
    }
    return s / n;
}

double j1_series(double x) {
    double term = x / 2, s = term;
    for (int k = 1; k < 60; ++k) {
        term *= -(x * x / 4) / (k * (k + 1.0));
        s += term;
    }
    return s;
}

double hermite_explicit(int n, double z) {
    double s = 0;
    for (int m = 0; 2 * m <= n; ++m)
        s += (m % 2 ? -1.0 : 1.0) * std::pow(2 * z, n - 2 * m) / (std::tgamma(m + 1.0) * std::tgamma(n - 2 * m + 1.0));
    return std::tgamma(n + 1.0) * s;
}

double gsl_row(int r, double z) { return gsl_sf_hyperg_2F1((r + 1) / 2.0, (r + 2) / 2.0, 2.0, z); }

}  // namespace

TEST_CASE("bessel_j1 values and parity") {
    CHECK(bessel_j1(0.0) == 0.0);
    CHECK(bessel_j1(1.0) == doctest::Approx(0.4400505857).epsilon(1e-10));
    CHECK(std::abs(bessel_j1(1.0) - j1_series(1.0)) < 1e-15);
    for (double x : {0.3, 1.7, 4.2, 9.9, 23.0, 37.5, 50.0}) {
        CHECK(bessel_j1(-x) == -bessel_j1(x));
        CHECK(std::abs(bessel_j1(x) - j1_trapezoid(x)) < 1e-13);
    }
    for (double x : {0.5, 2.0, 6.0})  // away from zeros: relative
        CHECK(std::abs(bessel_j1(x) / j1_series(x) - 1) < 1e-12);
}

TEST_CASE("hyp0f1 b=2") {
    CHECK(hyp0f1(2, 0) == 1.0);
    CHECK(hyp0f1(2, -1) == doctest::Approx(0.5767248078).epsilon(1e-10));
    CHECK(std::abs(hyp0f1(2, -1) - bessel_j1(2.0)) < 1e-15);
    double worst = 0;
    for (int k = 1; k <= 1000; ++k) {
        double z = 0.1 * k;
        worst = std::max(worst, std::abs(hyp0f1(2, -z / 4) - 2 * bessel_j1(std::sqrt(z)) / std::sqrt(z)));
    }
    CHECK(worst < 1e-12);
    // both routes against the series where it is well conditioned
    for (double z : {-3.0, -0.9, -0.2, 0.2, 0.9, 3.0, 8.0})
        CHECK(hyp0f1(2, z) == doctest::Approx(hyp0f1_series(2, z)).epsilon(1e-13));
}

TEST_CASE("hyp2f1_row below the cut") {
    CHECK(hyp2f1_row(0, 0.5).real() == doctest::Approx(1.1715729).epsilon(1e-7));
    for (int r = 0; r <= 8; ++r) CHECK(hyp2f1_row(r, 0.0) == cplx(1.0, 0.0));
    double worst = 0;
    for (int k = 0; k <= 599; ++k) {
        double z = -5.0 + k * (5.99 / 599);
        cplx v = hyp2f1_row(0, z);
        CHECK(v.imag() == 0.0);
        worst = std::max(worst, std::abs(v.real() - 2 / (1 + std::sqrt(1 - z))));
        for (int r = 1; r <= 6; ++r) {
            cplx w = hyp2f1_row(r, z);
            CHECK(w.imag() == 0.0);
            if (z > -1.0) CHECK(w.real() == doctest::Approx(gsl_row(r, z)).epsilon(1e-10));
        }
        if (z > -1.0) CHECK(v.real() == doctest::Approx(gsl_row(0, z)).epsilon(1e-12));
    }
    CHECK(worst < 1e-10);
    for (double z : {-0.7, -0.3, 0.1, 0.5, 0.7})
        for (int r = 0; r <= 8; ++r)
            CHECK(hyp2f1_row(r, z).real() == doctest::Approx(hyp2f1_row_series(r, z)).epsilon(1e-12));
}

TEST_CASE("hyp2f1_row on the cut: Euler integral") {
    // 2F1(1/2,1;2;z) = int_0^1 (1 - z t)^{-1/2} dt, with 1 - zt -> 1 - zt +- i0
    const double z = 2.5, t1 = 1 / z;
    // t < 1/z: u = sqrt(1 - z t); t > 1/z: u = sqrt(z t - 1); both integrands become constant
    QuadratureRule a = gauss_legendre(20, 0.0, 1.0), b = gauss_legendre(20, 0.0, std::sqrt(z - 1));
    double re = a.integrate([&](double) { return 2.0 / z; });
    double im = b.integrate([&](double) { return 2.0 / z; });
    (void)t1;
    // below (z - i0): 1 - zt + i0 -> sqrt = +i sqrt(zt-1) -> factor -i
    CHECK(hyp2f1_row(0, z, CutSide::below).real() == doctest::Approx(re).epsilon(1e-13));
    CHECK(hyp2f1_row(0, z, CutSide::below).imag() == doctest::Approx(-im).epsilon(1e-13));
    CHECK(hyp2f1_row(0, z, CutSide::above).imag() == doctest::Approx(im).epsilon(1e-13));
    for (int r = 0; r <= 4; ++r)
        for (double zz : {1.2, 2.5, 7.0}) CHECK(hyp2f1_row(r, zz, CutSide::above) == std::conj(hyp2f1_row(r, zz)));
}

TEST_CASE("hyp2f1_row near the branch point") {
    CHECK(hyp2f1_row(0, 1.0).real() == 2.0);
    CHECK(std::isinf(hyp2f1_row(2, 1.0).real()));
    // continuity from below the branch point for r = 0
    CHECK(std::abs(hyp2f1_row(0, 1 - 1e-12) - cplx(2, 0)) < 1e-5);
}

TEST_CASE("hermite") {
    CHECK(hermite(0, 0.7) == 1.0);
    CHECK(hermite(1, 3.0) == 6.0);
    for (int n = 0; n <= 6; ++n)
        for (double z : {-1.3, 0.0, 0.4, 2.2}) CHECK(hermite(n, z) == doctest::Approx(hermite_explicit(n, z)).epsilon(1e-13));
    // addition identity
    for (int r = 0; r <= 8; ++r)
        for (auto [x, y] : {std::pair{0.3, -1.1}, {1.7, 0.4}, {-0.6, -0.9}}) {
            double s = 0;
            for (int q = 0; q <= r; ++q)
                s += std::tgamma(r + 1.0) / (std::tgamma(q + 1.0) * std::tgamma(r - q + 1.0)) * hermite(q, x) *
                     hermite(r - q, y);
            double rhs = std::pow(2.0, r / 2.0) * hermite(r, (x + y) / std::sqrt(2.0));
            CHECK(s == doctest::Approx(rhs).epsilon(1e-11));
        }
}

TEST_CASE("gauss_legendre") {
    QuadratureRule one = gauss_legendre(1, -1, 1);
    CHECK(one.nodes[0] == doctest::Approx(0.0));
    CHECK(one.weights[0] == doctest::Approx(2.0));
    CHECK(gauss_legendre(2, -1, 1).integrate([](double x) { return x * x; }) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(std::abs(gauss_legendre(20, 0, 1).integrate([](double x) { return std::exp(x); }) - (std::exp(1.0) - 1)) < 1e-14);
    for (int n : {3, 7, 16, 40}) {
        QuadratureRule q = gauss_legendre(n, -0.5, 2.0);
        double sw = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            CHECK(q.weights[i] > 0);
            CHECK(q.nodes[i] > -0.5);
            CHECK(q.nodes[i] < 2.0);
            if (i) CHECK(q.nodes[i] > q.nodes[i - 1]);
            sw += q.weights[i];
        }
        CHECK(sw == doctest::Approx(2.5).epsilon(1e-14));
        // degree 2n-1 exactness: int x^{2n-1}
        int d = 2 * n - 1;
        double exact = (std::pow(2.0, d + 1) - std::pow(-0.5, d + 1)) / (d + 1);
        CHECK(q.integrate([&](double x) { return std::pow(x, d); }) == doctest::Approx(exact).epsilon(1e-12));
    }
    auto f = [](double x) { return std::exp(-x * x) * std::cos(3 * x); };
    CHECK(std::abs(gauss_legendre(30, -2, 2).integrate(f) - gauss_legendre(60, -2, 2).integrate(f)) < 1e-12);
    CHECK_THROWS_AS(gauss_legendre(0, 0, 1), InputError);
    CHECK_THROWS_AS(gauss_legendre(4, 1, 1), InputError);
}

TEST_CASE("panel rules") {
    QuadratureRule p = panel_rule(8, 0, 10, 0.3);
    CHECK(p.size() % 8 == 0);
    CHECK(p.size() / 8 >= 34);
    CHECK(p.integrate([](double x) { return std::sin(x); }) == doctest::Approx(1 - std::cos(10.0)).epsilon(1e-13));
    QuadratureRule c = composite_gauss_legendre(5, -1, 1, 4);
    CHECK(c.size() == 20);
}

TEST_CASE("binomial_half") {
    CHECK(binomial_half(0) == 1.0);
    CHECK(binomial_half(1) == doctest::Approx(0.5));
    CHECK(binomial_half(2) == doctest::Approx(-0.125));
    CHECK(binomial_half(3) == doctest::Approx(0.0625));
    CHECK(binomial_half(4) == doctest::Approx(-5.0 / 128));
    CHECK(std::isfinite(binomial_half(200)));
}

TEST_CASE("cut side strings") {
    CHECK(cut_side_from_string("above") == CutSide::above);
    CHECK(std::string(to_string(CutSide::below)) == "below");
    CHECK_THROWS_AS(cut_side_from_string("sideways"), InputError);
}
