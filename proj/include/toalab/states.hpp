#pragma once
// Wavepackets and their evolution under V(q) = mu g q.

#include <functional>
#include <optional>
#include <vector>

#include "toalab/classical.hpp"

namespace toalab {

enum class AmplitudeKind { gaussian, evolved_gaussian, numeric_grid, propagated };

// phi(q) = exp(i k q) * envelope(q), effectively supported on [lo, hi].
struct ComplexAmplitude {
    std::function<cplx(double)> envelope;
    double k = 0.0;  // boost wavenumber
    double lo = 0.0, hi = 0.0;
    double scale = 1.0;  // smallest length over which the envelope varies
    AmplitudeKind kind = AmplitudeKind::numeric_grid;
    std::optional<WavepacketSpec> spec;  // set for gaussians

    cplx operator()(double q) const { return std::polar(1.0, k * q) * envelope(q); }
};

// Support half-width in units of sigma.
inline constexpr double kSupportSigmas = 10.0;

// e^{i mu v0 q/hbar} (sigma sqrt(2pi))^{-1/2} e^{-(q-q0)^2/4 sigma^2}
ComplexAmplitude gaussian(const WavepacketSpec& s, const PhysicalParams& p);

// Closed-form evolved gaussian (free fall), t >= 0.
cplx evolved_gaussian_value(const WavepacketSpec& s, const PhysicalParams& p, double t, double q);
ComplexAmplitude evolved_gaussian(const WavepacketSpec& s, const PhysicalParams& p, double t);

struct PropagationControl {
    int order = 16;
    double tol = 1e-10;
    int max_refine = 4;
};

// phi(q,t) = int K(q,t;q',0) phi0(q') dq' by panel quadrature; checks convergence by halving.
cplx propagate_linear_value(const ComplexAmplitude& phi0, double t, const PhysicalParams& p,
                            double q, const PropagationControl& ctrl = {});
ComplexAmplitude propagate_linear(const ComplexAmplitude& phi0, double t, const PhysicalParams& p,
                                  const PropagationControl& ctrl = {});

// Amplitude sampled on a uniform grid.
struct GridAmplitude {
    std::vector<double> q;
    std::vector<cplx> v;
    double h() const { return q.size() > 1 ? q[1] - q[0] : 0.0; }
    double norm2() const;
};

GridAmplitude sample(const ComplexAmplitude& a, double lo, double h, std::size_t n);

// Linear interpolation of a grid amplitude, zero outside.
ComplexAmplitude from_grid(const GridAmplitude& g);

// Exact free-fall evolution of a grid amplitude by FFT on a zero-padded grid of
// the same spacing covering [-pad, pad] (and at least the input support).
GridAmplitude evolve_fft(const GridAmplitude& psi, double t, const PhysicalParams& p, double pad);

// <q> and <q^2> - <q>^2 on a grid
double grid_mean(const GridAmplitude& g);
double grid_variance(const GridAmplitude& g);

}  // namespace toalab
