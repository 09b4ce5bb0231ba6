#pragma once
// hbar-expansion of the expected arrival time: tau = tau0 + sum_r alpha_r hbar^r.

#include <functional>
#include <vector>

#include "toalab/classical.hpp"
#include "toalab/states.hpp"

namespace toalab {

struct ExpansionTerm {
    int r = 0;
    cplx alpha;         // coefficient of hbar^r
    cplx contribution;  // alpha * hbar^r
};

// Envelope with derivatives: deriv(n, x) = d^n/dx^n envelope(x).
struct Envelope {
    std::function<cplx(int, double)> deriv;
    int max_order = 0;
    double lo = 0.0, hi = 0.0;
    double scale = 1.0;
};

// exact derivatives through Hermite polynomials
Envelope gaussian_envelope(const WavepacketSpec& s);
// central finite differences on a uniform grid (orders <= 4)
Envelope grid_envelope(const GridAmplitude& g);

// W_r(x) = sum_q C(r,q) (-1)^q conj(phi^(q)) phi^(r-q)
cplx wr(const Envelope& env, int r, double x);
// Gaussian closed form (-1)^r 2^{r/2} H_r(0) (2 sigma)^{-r} |phi(x)|^2
double wr_gaussian(const WavepacketSpec& s, int r, double x);

// (1/v0) int 2F1(1/2,1;2;2gx/v0^2) x |phi(x)|^2 dx
cplx tau0(const WavepacketSpec& s, const PhysicalParams& p, CutSide side = CutSide::below,
          Warnings* w = nullptr);
// narrow-packet limit (v0/g)(1 - sqrt(1 - 2 g q0/v0^2)) on the chosen side
cplx tau0_point(const WavepacketSpec& s, const PhysicalParams& p, CutSide side = CutSide::below);

struct IntegralControl {
    int order = 16;
    double tol = 1e-12;
    int max_refine = 6;
};

// (1/(sqrt(pi) v0)) (i/(mu v0))^r G((r+1)/2) G((r+2)/2)/r! int x 2F1(..;2gx/v0^2) W_r(x) dx
cplx alpha_r_general(const Envelope& env, int r, double v0, const PhysicalParams& p,
                     CutSide side = CutSide::below, const IntegralControl& ctrl = {},
                     Warnings* w = nullptr);

// point-evaluated closed form for gaussians; exactly zero for odd r
cplx alpha_r_gaussian(int r, const WavepacketSpec& s, const PhysicalParams& p,
                      CutSide side = CutSide::below, Warnings* w = nullptr);

struct LeadingExpansion {
    cplx classical;
    cplx correction2;  // alpha_2 hbar^2
    cplx total;
    bool complex_regime = false;  // 2 g q0 / v0^2 > 1
};
LeadingExpansion leading_expansion(const WavepacketSpec& s, const PhysicalParams& p,
                                   CutSide side = CutSide::below, Warnings* w = nullptr);

// r = 0..r_max using the closed forms (r = 0 is tau0_point)
std::vector<ExpansionTerm> expansion_terms(const WavepacketSpec& s, const PhysicalParams& p, int r_max,
                                           CutSide side = CutSide::below, Warnings* w = nullptr);

}  // namespace toalab
