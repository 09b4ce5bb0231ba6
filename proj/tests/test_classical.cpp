#include <doctest.h>

#include <cmath>

#include "toalab/classical.hpp"

using namespace toalab;

namespace {
// smaller positive root of (g/2) t^2 - v0 t + q0 = 0, cancellation-free form
double quadratic_root(double g, double q0, double v0) {
    double disc = v0 * v0 - 2 * g * q0;
    return 2 * q0 / (v0 + std::sqrt(disc));
}
}  // namespace

TEST_CASE("classical_toa") {
    auto p = PhysicalParams::natural();
    CHECK(classical_toa(p, 0.0, 7.0) == cplx(0, 0));
    CHECK(classical_toa(p, 5, 30).real() == doctest::Approx(0.1671332).epsilon(1e-6));
    CHECK(classical_toa(p, 5, 30).real() == doctest::Approx(quadratic_root(1, 5, 30)).epsilon(1e-13));
    CHECK(classical_toa(p, -5, 30).real() == doctest::Approx(-0.1662057).epsilon(1e-6));
    CHECK(classical_toa(p, -5, 30).imag() == 0.0);
    CHECK_THROWS_AS(classical_toa(p, 1, 0), InputError);

    // both roots real and ordered below the turning point
    for (double q0 : {0.5, 5.0, 100.0, 440.0}) {
        cplx a = classical_toa(p, q0, 30), b = classical_toa(p, q0, 30, ArrivalBranch::second);
        CHECK(a.imag() == 0.0);
        CHECK(a.real() > 0);
        CHECK(a.real() < b.real());
    }
    // non-arrival: complex
    CHECK(classical_toa(p, 5, 2).imag() != 0.0);
    CHECK(classical_toa(p, 5, 2).real() == doctest::Approx(2.0));
}

TEST_CASE("toa_series_partial") {
    auto p = PhysicalParams::natural();
    const double exact = classical_toa(p, 5, 30).real();
    CHECK(std::abs(toa_series_partial(p, 5, 30, 40) - exact) < 1e-10);
    CHECK(toa_series_partial(p, 5, 30, 0) == doctest::Approx(5.0 / 30));
    auto free = PhysicalParams::natural(2.0, 0.0);
    for (int n : {1, 3, 10}) CHECK(toa_series_partial(free, 3, 12, n) == doctest::Approx(2.0 * 3 / 12));
    // errors shrink with N inside the convergence region
    double prev = 1;
    for (int n = 4; n <= 24; n += 4) {
        double e = std::abs(toa_series_partial(p, 5, 30, n) - exact);
        CHECK(e <= prev);
        prev = e;
    }
    Warnings w;
    toa_series_partial(p, 5, 2, 5, &w);
    CHECK(!w.empty());
    Warnings ok;
    toa_series_partial(p, 5, 30, 5, &ok);
    CHECK(ok.empty());
}

TEST_CASE("turning point and spread bound") {
    CHECK(turning_point(30, 1) == doctest::Approx(450.0));
    auto p = PhysicalParams::natural();
    SpreadCheck a = spread_ok(WavepacketSpec::from_sigma2(5, 0.1, 30), p);
    CHECK(a.ok);
    CHECK(a.bound == doctest::Approx(890.0));
    CHECK(a.margin == doctest::Approx(889.68).epsilon(1e-5));
    Warnings w;
    SpreadCheck b = spread_ok(WavepacketSpec::from_sigma2(5, 0.1, 2), p, &w);
    CHECK(!b.ok);
    CHECK(b.bound == doctest::Approx(-6.0));
    CHECK(w.items.size() == 1);
    // tiny spread: ok exactly when v0^2/g > 2 q0
    CHECK(spread_ok(WavepacketSpec::from_sigma2(449, 1e-12, 30), p).ok);
    CHECK(!spread_ok(WavepacketSpec::from_sigma2(451, 1e-12, 30), p).ok);
}

TEST_CASE("params") {
    auto p = with_mass_split(PhysicalParams::natural(), 2.0, 1.0);
    CHECK(p.mu() == 2.0);
    CHECK(p.g_eff() == doctest::Approx(0.5));
    auto id = with_mass_split(PhysicalParams::natural(), 3.0, 3.0);
    CHECK(id.g_eff() == 1.0);
    CHECK_THROWS_AS((PhysicalParams{0.0, 1, 1, 1}.validate()), InputError);
    CHECK_THROWS_AS((PhysicalParams{1, 1, -1, 1}.validate()), InputError);
    CHECK_NOTHROW(WavepacketSpec::from_sigma2(0, 0.1, 1).validate());
    CHECK_THROWS_AS((WavepacketSpec{0, 0, 1}.validate()), InputError);
}
