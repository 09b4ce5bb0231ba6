#include <doctest.h>

#include <cmath>

#include "toalab/semiclassical.hpp"

using namespace toalab;

namespace {
const PhysicalParams unit = PhysicalParams::natural();
const WavepacketSpec sec4 = WavepacketSpec::from_sigma2(-5, 0.1, 30);

double a2(double mi, double mg, double v0) {
    return std::abs(alpha_r_gaussian(2, WavepacketSpec::from_sigma2(-5, 0.1, v0), PhysicalParams{1, 1, mi, mg}));
}
}  // namespace

TEST_CASE("W_r") {
    Envelope env = gaussian_envelope(sec4);
    for (double x : {-5.3, -5.0, -4.6}) {
        const double d = std::norm(env.deriv(0, x));
        CHECK(wr(env, 0, x) == cplx(d, 0));
        CHECK(std::abs(wr(env, 1, x)) < 1e-15 * (1 + d));
        // hand-differentiated: W_2 = 2 phi phi'' - 2 phi'^2 = -phi^2 / sigma^2
        CHECK(wr(env, 2, x).real() == doctest::Approx(-d / 0.1).epsilon(1e-12));
        for (int r = 0; r <= 6; ++r) CHECK(wr(env, r, x).real() == doctest::Approx(wr_gaussian(sec4, r, x)).epsilon(1e-10));
    }
    // grid envelopes: finite differences, order <= 4
    GridAmplitude g;
    for (int i = 0; i <= 400; ++i) {
        double x = -6 + 0.005 * i;
        g.q.push_back(x);
        g.v.push_back(env.deriv(0, x));
    }
    Envelope ge = grid_envelope(g);
    CHECK(wr(ge, 2, -5.1).real() == doctest::Approx(wr_gaussian(sec4, 2, -5.1)).epsilon(1e-4));
    CHECK_THROWS_AS(wr(ge, 5, -5.0), InputError);
}

TEST_CASE("tau0") {
    auto narrow = WavepacketSpec::from_sigma2(-5, 1e-8, 30);
    CHECK(std::abs(tau0(narrow, unit)) == doctest::Approx(0.166206).epsilon(3e-6));
    CHECK(std::abs(tau0_point(sec4, unit) - cplx(-0.166206258, 0)) < 1e-9);
    CHECK(std::abs(tau0(WavepacketSpec::from_sigma2(0, 1e-10, 30), unit)) < 1e-6);
    Warnings w;
    cplx t = tau0(WavepacketSpec::from_sigma2(5, 0.1, 2), unit, CutSide::below, &w);
    CHECK(t.real() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(t.imag() != 0.0);
    CHECK(!w.empty());
}

TEST_CASE("alpha_r: closed form and integral route") {
    for (int r : {1, 3, 5}) {
        CHECK(alpha_r_gaussian(r, sec4, unit) == cplx(0, 0));
        CHECK(std::abs(alpha_r_general(gaussian_envelope(sec4), r, 30, unit)) < 1e-12);
    }
    CHECK(std::abs(alpha_r_gaussian(2, sec4, unit)) == doctest::Approx(0.000455).epsilon(1e-6 / 0.000455));
    // narrow packet: the two routes agree
    auto narrow = WavepacketSpec::from_sigma2(-5, 1e-4, 30);
    for (int r : {2, 4}) {
        cplx a = alpha_r_general(gaussian_envelope(narrow), r, 30, unit), b = alpha_r_gaussian(r, narrow, unit);
        CHECK(std::abs(a - b) / std::abs(b) < 1e-6);
    }
    // finite width at the reference state: agreement to the dropped O(sigma^2) terms
    cplx g2 = alpha_r_general(gaussian_envelope(sec4), 2, 30, unit);
    CHECK(std::abs(g2 - alpha_r_gaussian(2, sec4, unit)) < 1e-7);
    // 1/mu^2
    const double base = std::abs(alpha_r_general(gaussian_envelope(sec4), 2, 30, unit));
    for (double mu : {2.0, 4.0})
        CHECK(std::abs(alpha_r_general(gaussian_envelope(sec4), 2, 30, PhysicalParams::natural(mu))) * mu * mu ==
              doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("leading expansion") {
    LeadingExpansion le = leading_expansion(sec4, unit);
    CHECK(std::abs(le.classical) == doctest::Approx(0.166206).epsilon(1e-6 / 0.166206));
    CHECK(std::abs(le.correction2) == doctest::Approx(0.000455).epsilon(1e-6 / 0.000455));
    CHECK(std::abs(le.classical) + std::abs(le.correction2) == doctest::Approx(0.166662).epsilon(2e-6 / 0.166662));
    CHECK(std::abs(le.total) > std::abs(le.classical));
    CHECK(!le.complex_regime);
    CHECK(std::abs(le.correction2 - alpha_r_gaussian(2, sec4, unit)) < 1e-18);
    // q0 > 0 reading: positive correction
    CHECK(leading_expansion(WavepacketSpec::from_sigma2(5, 0.1, 30), unit).correction2.real() > 0);
    // tunneling regime
    Warnings w;
    LeadingExpansion t = leading_expansion(WavepacketSpec::from_sigma2(5, 0.1, 2), unit, CutSide::below, &w);
    CHECK(t.complex_regime);
    CHECK(t.total.real() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(t.total.imag() == doctest::Approx(-1.598972).epsilon(1e-3 / 1.598972));
    CHECK(leading_expansion(WavepacketSpec::from_sigma2(5, 0.1, 2), unit, CutSide::above).total.imag() > 0);
    CHECK(!w.empty());
    // expansion terms: r = 0 is tau0, odd orders vanish
    auto terms = expansion_terms(sec4, unit, 4);
    REQUIRE(terms.size() == 5);
    CHECK(terms[0].contribution == le.classical);
    CHECK(terms[1].alpha == cplx(0, 0));
    CHECK(terms[3].alpha == cplx(0, 0));
    CHECK(terms[2].contribution == le.correction2);
}

TEST_CASE("trends") {
    auto corr = [](double q0, double s2, double v0) {
        return std::abs(leading_expansion(WavepacketSpec::from_sigma2(q0, s2, v0), unit).correction2);
    };
    CHECK(corr(-5, 0.1, 10) > corr(-5, 0.1, 30));
    CHECK(corr(-5, 0.1, 30) > corr(-5, 0.1, 50));
    CHECK(corr(-5, 0.05, 30) > corr(-5, 0.1, 30));
    CHECK(corr(-5, 0.1, 30) > corr(-5, 1.0, 30));
    CHECK(corr(-5, 1e6, 30) < 1e-9);
    CHECK(corr(100, 0.1, 30) < corr(300, 0.1, 30));
    CHECK(corr(300, 0.1, 30) < corr(440, 0.1, 30));
}

TEST_CASE("mass split") {
    CHECK(a2(3, 3, 30) == std::abs(alpha_r_gaussian(2, WavepacketSpec::from_sigma2(-5, 0.1, 30), PhysicalParams::natural(3))));
    PhysicalParams split{1, 1, 2.0, 0.7};
    PhysicalParams direct = PhysicalParams::natural(2.0, 0.7 / 2.0);
    CHECK(alpha_r_gaussian(2, sec4, split) == alpha_r_gaussian(2, sec4, direct));
    // m_i fixed at 1: ratio 0.5 (m_g = 2) vs ratio 2 (m_g = 0.5)
    for (double v0 : {10.0, 20.0, 30.0}) {
        const double ref = a2(1, 1, v0);
        CHECK(std::abs(a2(1, 2, v0) - ref) > std::abs(a2(1, 0.5, v0) - ref));
    }
}
