#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "toalab/expectation.hpp"
#include "toalab/spectral.hpp"

using namespace toalab;

namespace {
KernelSpec pos(double mu = 1, double g = 1) { return {PhysicalParams::natural(mu, g), Frame::position}; }

std::vector<double> bump(int n, double c, double w) {
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = std::exp(-(i - c) * (i - c) / (2 * w * w));
    return d;
}
}  // namespace

TEST_CASE("gregory band") {
    CHECK(gregory_band(0).size() == 1);
    auto b = gregory_band(4);
    REQUIRE(b.size() == 5);
    CHECK(b[1] == doctest::Approx(1.3208333).epsilon(1e-7));
    CHECK(b[2] == doctest::Approx(0.7666667).epsilon(1e-7));
    CHECK(b[3] == doctest::Approx(1.1013889).epsilon(1e-7));
    CHECK(b[4] == doctest::Approx(0.98125).epsilon(1e-7));
    CHECK_THROWS_AS(gregory_band(6), InputError);
}

TEST_CASE("discretization and eigensystem") {
    DiscretizedTOA d = discretize(pos(), Box::symmetric(10), 256);
    CHECK(d.hermiticity_residual() < 1e-13);
    CHECK(!d.warnings.empty());  // h = 0.078 is coarse against the oscillation scale at l = 10
    Spectrum s = eigensystem(d);
    CHECK(s.orthonormality_residual() <= 1e-10);
    CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    auto order = s.order_by_magnitude();
    for (std::size_t i = 1; i < order.size(); ++i)
        CHECK(std::abs(s.eigenvalues[order[i]]) >= std::abs(s.eigenvalues[order[i - 1]]));
    CHECK_THROWS_AS(discretize(pos(), Box::symmetric(1), 32), InputError);

    auto top = [](const Spectrum& sp) { return std::max(std::abs(sp.eigenvalues.front()), std::abs(sp.eigenvalues.back())); };
    // largest |tau| under N doubling: resolved box
    const double a = top(eigensystem(discretize(pos(), Box::symmetric(2), 256)));
    const double b = top(eigensystem(discretize(pos(), Box::symmetric(2), 512)));
    CHECK(std::abs(b / a - 1) < 1e-3);
    // l = 10 is under-resolved at N = 256 (warned above); the change shrinks with N
    const double c = top(eigensystem(discretize(pos(), Box::symmetric(10), 512)));
    const double e = top(eigensystem(discretize(pos(), Box::symmetric(10), 1024)));
    CHECK(std::abs(e / c - 1) < 0.5 * std::abs(c / top(s) - 1));
}

TEST_CASE("free kernel: limit and tau <-> -tau pairing") {
    DiscretizedTOA d = discretize(pos(1, 1e-14), Box::symmetric(2), 200);
    // matrix entries equal the discretized free kernel
    auto band = gregory_band(4);
    for (int i : {3, 50, 120})
        for (int j : {10, 77, 190}) {
            if (i == j) continue;
            const double qi = d.rule.nodes[i], qj = d.rule.nodes[j];
            // position frame, g -> 0: -i (q+q')/4 sgn(q-q')
            double free = -0.25 * (qi + qj) * (qi > qj ? 1 : -1);
            int off = std::abs(i - j);
            double corr = off <= 4 ? band[off] : 1.0;
            CHECK(d.matrix(i, j).imag() == doctest::Approx(free * d.h * corr).epsilon(1e-10));
        }
    Spectrum s = eigensystem(d);
    const std::size_t n = s.size();
    double worst = 0;
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(s.eigenvalues[k] + s.eigenvalues[n - 1 - k]));
    CHECK(worst < 1e-10);
}

TEST_CASE("completeness and spectral expectation") {
    auto p = PhysicalParams::natural();
    auto st = WavepacketSpec::from_sigma2(-1, 0.1, 6);
    ComplexAmplitude phi = gaussian(st, p);
    Spectrum s = eigensystem(discretize(pos(), Box{-5, 1.5}, 650));
    SpectralMoments m = spectral_moments(s, phi);
    CHECK(std::abs(m.weight - 1) < 1e-8);
    double exact = expect_toa_exact(phi, pos()).value;
    CHECK(std::abs(m.mean / exact - 1) < 1e-3);
}

TEST_CASE("classification of synthetic profiles") {
    CHECK(classify_profile(bump(101, 50, 6), 50) == Tag::non_nodal);
    auto two = bump(101, 40, 4), b = bump(101, 60, 4);
    for (int i = 0; i < 101; ++i) two[i] += b[i];
    CHECK(classify_profile(two, 50) == Tag::nodal);
    std::vector<double> flat(101, 0.0);
    CHECK(classify_profile(flat, 50) == Tag::indeterminate);
    CHECK(classify_profile(bump(101, 20, 3), 50) == Tag::indeterminate);
}

TEST_CASE("near-degenerate nodal / non-nodal pair with unitary arrival") {
    auto p = PhysicalParams::natural();
    Spectrum s = eigensystem(discretize(pos(), Box::symmetric(1), 500));
    const std::size_t a = s.nearest(0.00509), b = s.nearest(0.00518);
    REQUIRE(a != b);
    CHECK(std::abs(s.eigenvalues[b] - s.eigenvalues[a]) < 2e-4);
    Tag ta = classify(s, a, p), tb = classify(s, b, p);
    CHECK(((ta == Tag::nodal && tb == Tag::non_nodal) || (ta == Tag::non_nodal && tb == Tag::nodal)));
    for (std::size_t n : {a, b}) {
        const double tau = s.eigenvalues[n];
        ArrivalMetrics m = unitary_arrival_metrics(s, n, p, [&] {
            std::vector<double> t;
            for (int k = 0; k < 40; ++k) t.push_back(0.8 * tau + k * (0.4 * tau / 39));
            return t;
        }());
        CHECK(std::abs(m.argmin - tau) <= m.step);
    }
}
