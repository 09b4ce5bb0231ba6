#include <doctest.h>

#include <cmath>

#include "toalab/states.hpp"

using namespace toalab;

namespace {
double integrate(const ComplexAmplitude& a, const std::function<double(double, cplx)>& f) {
    QuadratureRule r = panel_rule(16, a.lo, a.hi, 0.05);
    return r.integrate([&](double q) { return f(q, a(q)); });
}
}  // namespace

TEST_CASE("gaussian moments") {
    auto p = PhysicalParams::natural(2.0);
    auto s = WavepacketSpec::from_sigma2(-5, 0.1, 30);
    ComplexAmplitude phi = gaussian(s, p);
    CHECK(phi.kind == AmplitudeKind::gaussian);
    CHECK(std::abs(integrate(phi, [](double, cplx v) { return std::norm(v); }) - 1) < 1e-12);
    CHECK(std::abs(integrate(phi, [](double q, cplx v) { return q * std::norm(v); }) + 5) < 1e-12);
    // <p> = int conj(phi) (-i hbar d/dq) phi with a central difference
    const double h = 2e-4;
    double pm = integrate(phi, [&](double q, cplx v) {
        cplx d = (8.0 * (phi(q + h) - phi(q - h)) - (phi(q + 2 * h) - phi(q - 2 * h))) / (12 * h);
        return (std::conj(v) * cplx(0, -1) * d).real();
    });
    CHECK(pm == doctest::Approx(2.0 * 30).epsilon(1e-8));
}

TEST_CASE("evolved_gaussian closed form") {
    auto p = PhysicalParams::natural();
    auto s = WavepacketSpec::from_sigma2(-5, 0.1, 30);
    ComplexAmplitude phi0 = gaussian(s, p), e0 = evolved_gaussian(s, p, 0.0);
    for (double q : {-5.4, -5.0, -4.7}) CHECK(std::abs(phi0(q) - e0(q)) < 1e-14);
    for (double t : {0.05, 0.1, 0.3}) {
        ComplexAmplitude e = evolved_gaussian(s, p, t);
        const double c = -5 + 30 * t - 0.5 * t * t;
        double n = integrate(e, [](double, cplx v) { return std::norm(v); });
        double m = integrate(e, [](double q, cplx v) { return q * std::norm(v); });
        double var = integrate(e, [&](double q, cplx v) { return (q - c) * (q - c) * std::norm(v); });
        CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m == doctest::Approx(c).epsilon(1e-12));
        const double sp = t / (2 * 0.1);
        CHECK(var == doctest::Approx(0.1 * (1 + sp * sp)).epsilon(1e-10));
        // the density peaks on the classical trajectory
        CHECK(std::norm(e(c)) > std::norm(e(c + 1e-3)));
        CHECK(std::norm(e(c)) > std::norm(e(c - 1e-3)));
    }
}

TEST_CASE("propagator quadrature matches the closed form") {
    auto p = PhysicalParams::natural();
    auto s = WavepacketSpec::from_sigma2(-1, 0.1, 3);
    ComplexAmplitude phi0 = gaussian(s, p);
    for (double t : {0.02, 0.1}) {
        double worst = 0;
        for (int k = 0; k <= 24; ++k) {
            double q = -1 + 3 * t - 0.5 * t * t - 1.2 + 0.1 * k;
            worst = std::max(worst, std::abs(propagate_linear_value(phi0, t, p, q) - evolved_gaussian_value(s, p, t, q)));
        }
        CHECK(worst < 1e-8);
    }
    // norm after t = 0.1
    ComplexAmplitude prop = propagate_linear(phi0, 0.1, p);
    QuadratureRule r = panel_rule(12, prop.lo, prop.hi, 0.1);
    CHECK(r.integrate([&](double q) { return std::norm(prop(q)); }) == doctest::Approx(1.0).epsilon(1e-8));
    // t = 0 is the identity
    CHECK(std::abs(propagate_linear_value(phi0, 0.0, p, -0.9) - phi0(-0.9)) < 1e-12);
}

TEST_CASE("FFT evolution matches the closed form") {
    auto p = PhysicalParams::natural(1.5, 2.0);
    auto s = WavepacketSpec::from_sigma2(-2, 0.2, 4);
    GridAmplitude g = sample(gaussian(s, p), -8, 0.01, 1201);
    CHECK(g.norm2() == doctest::Approx(1.0).epsilon(1e-12));
    for (double t : {0.1, 0.5}) {
        GridAmplitude out = evolve_fft(g, t, p, 10);
        double worst = 0;
        for (std::size_t i = 0; i < out.q.size(); i += 7)
            worst = std::max(worst, std::abs(out.v[i] - evolved_gaussian_value(s, p, t, out.q[i])));
        CHECK(worst < 1e-9);
        CHECK(grid_mean(out) == doctest::Approx(-2 + 4 * t - t * t).epsilon(1e-10));
    }
    ComplexAmplitude back = from_grid(g);
    CHECK(std::abs(back(-2.005) - gaussian(s, p)(-2.005)) < 1e-3);
}
