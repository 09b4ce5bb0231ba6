#include "toalab/classical.hpp"

#include <cmath>
#include <sstream>

namespace toalab {

void PhysicalParams::validate() const {
    if (!(hbar > 0)) throw InputError("hbar must be > 0");
    if (!(g > 0)) throw InputError("g must be > 0");
    if (!(m_inertial > 0)) throw InputError("inertial mass must be > 0");
    if (!(m_grav > 0)) throw InputError("gravitational mass must be > 0");
}

PhysicalParams with_mass_split(PhysicalParams p, double mi, double mg) {
    if (!(mi > 0) || !(mg > 0)) throw InputError("masses must be > 0");
    p.m_inertial = mi;
    p.m_grav = mg;
    return p;
}

WavepacketSpec WavepacketSpec::from_sigma2(double q0, double sigma2, double v0) {
    if (!(sigma2 > 0)) throw InputError("sigma2 must be > 0");
    return {q0, std::sqrt(sigma2), v0};
}

void WavepacketSpec::validate() const {
    if (!(sigma > 0)) throw InputError("sigma must be > 0");
    if (!std::isfinite(q0) || !std::isfinite(v0)) throw InputError("q0, v0 must be finite");
}

cplx classical_toa(const PhysicalParams& p, double q0, double v0, ArrivalBranch branch) {
    if (v0 == 0.0) throw InputError("classical_toa: v0 must be nonzero");
    const double g = p.g_eff();
    const double disc = 1.0 - 2.0 * g * q0 / (v0 * v0);
    cplx root = disc >= 0 ? cplx(std::sqrt(disc), 0.0) : cplx(0.0, std::sqrt(-disc));
    double sgn = branch == ArrivalBranch::first ? -1.0 : 1.0;
    return (v0 / g) * (1.0 + sgn * root);
}

double toa_series_partial(const PhysicalParams& p, double q0, double p0, int N, Warnings* w) {
    if (N < 0) throw InputError("toa_series_partial: N must be >= 0");
    if (p0 == 0.0) throw InputError("toa_series_partial: p0 must be nonzero");
    const double mu = p.mu(), g = p.g_eff();
    const double x = -2.0 * mu * mu * g * q0 / (p0 * p0);
    // |x| = 2 g |q0| / v0^2
    if (!(std::abs(x) < 1.0)) warn(w, "toa_series_partial: 2 g |q0| / v0^2 >= 1, series does not converge");
    double sum = 0.0;
    double pw = q0 / p0;  // q0^{n+1}/p0^{2n+1} * (-2 mu^2 g)^n
    for (int n = 0; n <= N; ++n) {
        sum += binomial_half(n + 1) * pw;
        pw *= x;
    }
    return 2.0 * mu * sum;
}

double turning_point(double v0, double g) {
    if (!(g > 0)) throw InputError("turning_point: g must be > 0");
    return v0 * v0 / (2.0 * g);
}

SpreadCheck spread_ok(const WavepacketSpec& s, const PhysicalParams& p, Warnings* w) {
    SpreadCheck c;
    c.bound = s.v0 * s.v0 / p.g_eff() - 2.0 * std::abs(s.q0);
    c.margin = c.bound - s.sigma;
    c.ok = c.margin > 0;
    if (!c.ok) {
        std::ostringstream os;
        os << "spread bound violated: sigma = " << s.sigma << " >= v0^2/g - 2|q0| = " << c.bound;
        warn(w, os.str());
    }
    return c;
}

}  // namespace toalab
