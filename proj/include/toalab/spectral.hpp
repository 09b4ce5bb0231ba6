#pragma once
// Box-confined arrival-time operator: Nystrom discretization, eigensystem, unitary arrival.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "toalab/kernel.hpp"
#include "toalab/states.hpp"

namespace toalab {

struct Box {
    double lo = -1.0, hi = 1.0;
    static Box symmetric(double l) { return {-l, l}; }
    double length() const { return hi - lo; }
    double reach() const { return std::max(std::abs(lo), std::abs(hi)); }
};

// Multipliers (1 + c_j) for the first `order` off-diagonals: endpoint corrections of the
// midpoint/trapezoid rule at the diagonal jump of the kernel. order 0 = plain rule.
std::vector<double> gregory_band(int order);

struct DiscretizedTOA {
    KernelSpec spec;
    Box box;
    int N = 0;
    double h = 0.0;
    int gregory_order = 0;
    QuadratureRule rule;      // midpoint nodes, weights h
    Eigen::MatrixXcd matrix;  // sqrt(w_i) K(q_i,q_j) sqrt(w_j) with band corrections
    std::vector<std::string> warnings;
    double hermiticity_residual() const;
};

// Kernel should be in Frame::position for dynamics (arrival at q = 0, gravity along -q).
DiscretizedTOA discretize(const KernelSpec& spec, Box box, int N, int gregory_order = 4, int threads = 1);

enum class Tag { unclassified, nodal, non_nodal, indeterminate };
const char* to_string(Tag t);

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    Eigen::MatrixXcd vectors;         // columns orthonormal in C^N
    std::vector<double> q;
    double h = 0.0;
    std::vector<Tag> tags;
    Box box;

    std::size_t size() const { return eigenvalues.size(); }
    GridAmplitude eigenfunction(std::size_t n) const;  // psi(q_i) = v_i / sqrt(h)
    // indices sorted by |tau|, ties nodal first
    std::vector<std::size_t> order_by_magnitude() const;
    double orthonormality_residual() const;
    // <psi_n|phi> for every n under the quadrature inner product
    Eigen::VectorXcd overlaps(const ComplexAmplitude& phi) const;
    std::size_t nearest(double tau) const;
};

Spectrum eigensystem(const DiscretizedTOA& d);

// Spectral expectation sum tau_n |<psi_n|phi>|^2 and total weight
struct SpectralMoments {
    double weight = 0.0, mean = 0.0, variance = 0.0;
};
SpectralMoments spectral_moments(const Spectrum& s, const ComplexAmplitude& phi);

// Profile rule: smooth |psi|^2 over 3 points; inspect +-window points around the arrival index.
Tag classify_profile(const std::vector<double>& density, std::size_t center, int window = 5);

struct ClassifyControl {
    double pad = 8.0;  // evolution grid half-width
    int window = 5;
};
// Evolves eigenfunction n to its eigenvalue and applies classify_profile.
Tag classify(const Spectrum& s, std::size_t n, const PhysicalParams& p, const ClassifyControl& c = {});

struct ArrivalMetrics {
    std::vector<double> t;
    std::vector<double> metric;  // rms radius of |psi|^2 in |q| <= window
    double argmin = 0.0;
    double tau = 0.0;
    double step = 0.0;
    Tag tag = Tag::unclassified;
};
ArrivalMetrics unitary_arrival_metrics(const Spectrum& s, std::size_t n, const PhysicalParams& p,
                                       const std::vector<double>& times, double window = 0.05,
                                       double pad = 8.0);

}  // namespace toalab
