#pragma once
// Classical arrival times, the binomial series behind the quantization, spread bound.

#include "toalab/numerics.hpp"

namespace toalab {

struct PhysicalParams {
    double hbar = 1.0;
    double g = 1.0;
    double m_inertial = 1.0;
    double m_grav = 1.0;

    static PhysicalParams natural(double mu = 1.0, double g = 1.0, double hbar = 1.0) {
        return {hbar, g, mu, mu};
    }
    // after mu -> m_i, g -> m_g g / m_i
    double mu() const { return m_inertial; }
    double g_eff() const { return g * m_grav / m_inertial; }
    void validate() const;
};

// Returns params with the given inertial / gravitational masses.
PhysicalParams with_mass_split(PhysicalParams p, double mi, double mg);

struct WavepacketSpec {
    double q0 = 0.0;     // centre
    double sigma = 1.0;  // sqrt of the variance parameter sigma^2
    double v0 = 0.0;     // boost velocity
    static WavepacketSpec from_sigma2(double q0, double sigma2, double v0);
    double sigma2() const { return sigma * sigma; }
    void validate() const;
};

enum class ArrivalBranch { first, second };

// T = (v0/g)(1 -+ sqrt(1 - 2 g q0 / v0^2)); minus sign for `first`.
cplx classical_toa(const PhysicalParams& p, double q0, double v0,
                   ArrivalBranch branch = ArrivalBranch::first);

// 2 mu sum_{n=0}^{N} C(1/2,n+1) (-2 mu^2 g)^n q0^{n+1} / p0^{2n+1}
double toa_series_partial(const PhysicalParams& p, double q0, double p0, int N,
                          Warnings* w = nullptr);

double turning_point(double v0, double g);

struct SpreadCheck {
    bool ok = false;
    double bound = 0.0;   // v0^2/g - 2|q0|
    double margin = 0.0;  // bound - sigma
};
// sigma < v0^2/g - 2|q0|; warns when violated
SpreadCheck spread_ok(const WavepacketSpec& s, const PhysicalParams& p, Warnings* w = nullptr);

}  // namespace toalab
