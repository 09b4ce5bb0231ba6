#pragma once
// Arrival-time distributions from the confined spectrum, covariance, parameter sweeps.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "toalab/semiclassical.hpp"
#include "toalab/spectral.hpp"

namespace toalab {

// Per-eigenvalue weights |<psi_n|phi>|^2 (ascending tau).
struct SpectralWeights {
    std::vector<double> tau;
    std::vector<double> weight;
    double total = 0.0, mean = 0.0, variance = 0.0;
};
SpectralWeights spectral_weights(const ComplexAmplitude& phi, const Spectrum& s);

// sum_{tau_n <= tau} w_n
double arrival_probability_before(const ComplexAmplitude& phi, const Spectrum& s, double tau);
double arrival_probability_before(const SpectralWeights& w, double tau);

// Smooth cumulative law: monotone (Steffen) interpolant of the staircase sampled at
// gap midpoints. density() is its derivative, so it is nonnegative.
class CumulativeLaw {
public:
    explicit CumulativeLaw(const SpectralWeights& w);
    ~CumulativeLaw();
    CumulativeLaw(const CumulativeLaw&) = delete;
    CumulativeLaw& operator=(const CumulativeLaw&) = delete;
    CumulativeLaw(CumulativeLaw&&) noexcept;
    double cdf(double tau) const;
    double density(double tau) const;
    double lo() const;
    double hi() const;

private:
    struct Impl;
    Impl* impl_;
};

struct Provenance {
    std::optional<WavepacketSpec> state;
    PhysicalParams params;
    Box box;
    int N = 0;
    double h = 0.0;
    int gregory_order = 0;
};

struct TOADistribution {
    std::vector<double> tau;      // evaluation grid
    std::vector<double> density;  // derivative of the cumulative law
    std::vector<double> cdf;
    // per-eigenvalue view
    std::vector<double> eig_tau, weight, raw_density;  // raw = w_n / ((tau_{n+1}-tau_{n-1})/2)
    double total_weight = 0.0, mean = 0.0, stddev = 0.0;
    double mode = 0.0, peak = 0.0;
    Provenance provenance;
    std::vector<std::string> warnings;
};

TOADistribution toa_distribution(const ComplexAmplitude& phi, const Spectrum& s, const std::vector<double>& tau_grid);

struct CovarianceResult {
    double t = 0.0;
    double ks = 0.0;            // sup |F_t(tau - t) - F_0(tau)|
    double density_sup = 0.0;   // sup |Pi_t(tau - t) - Pi_0(tau)|
    double density_rel = 0.0;   // density_sup / max Pi_0
    double density_l1 = 0.0;    // int |Pi_t(tau - t) - Pi_0(tau)|
    double mean_shift = 0.0;    // (<T>_t + t) - <T>_0
    bool box_escape = false;
    std::vector<std::string> warnings;
};

// Gaussian initial state evolved in closed form to time t.
CovarianceResult covariance_check(const WavepacketSpec& s0, const PhysicalParams& p, double t, const Spectrum& s,
                                  int grid_points = 2001);

std::vector<double> linspace(double a, double b, int n);

// L1 distance between two densities sampled on the same grid
double l1_distance(const std::vector<double>& grid, const std::vector<double>& a, const std::vector<double>& b);

struct SweepPoint {
    PhysicalParams params;
    WavepacketSpec state;
};

struct SweepSpec {
    std::vector<SweepPoint> points;
    bool distributions = true;
    Box box{-12.0, 1.5};
    double h = 0.005;
    int gregory_order = 4;
    std::vector<double> tau_grid;
    CutSide side = CutSide::below;
};

struct SweepRecord {
    std::size_t index = 0;
    SweepPoint point;
    bool ok = true;
    std::string error;
    cplx tau0, alpha2_hbar2;
    std::optional<TOADistribution> dist;
};

// Cartesian product helper: mu, mi/mg ratio (m_inertial fixed at mu), v0, sigma2, q0.
std::vector<SweepPoint> sweep_grid(const std::vector<double>& mu, const std::vector<double>& ratio,
                                   const std::vector<double>& v0, const std::vector<double>& sigma2,
                                   const std::vector<double>& q0, double g = 1.0, double hbar = 1.0);

// One record per point in input order; failures are recorded, not thrown.
std::vector<SweepRecord> sweep(const SweepSpec& spec, int threads = 1);

}  // namespace toalab
