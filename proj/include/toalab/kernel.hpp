#pragma once
// Coordinate kernel <q|T|q'> of the Weyl-quantized arrival-time operator.

#include "toalab/classical.hpp"

namespace toalab {

// launch: q is the distance below the arrival point (formula as printed),
//   K = (mu i/hbar) ((q+q')/2) sgn(q-q') 1/2 0F1(;2; -mu^2 g (q+q')(q-q')^2 / 4 hbar^2)
// position: ordinary coordinate with H = p^2/2mu + mu g q, arrival at q = 0,
//   K_pos(q,q') = -K_launch(-q,-q').
enum class Frame { launch, position };
const char* to_string(Frame f);
Frame frame_from_string(const std::string& s);

struct KernelSpec {
    PhysicalParams params;
    Frame frame = Frame::launch;
    double mu() const { return params.mu(); }
    double g() const { return params.g_eff(); }
    double hbar() const { return params.hbar; }
};

cplx kernel_value(double q, double qp, const KernelSpec& spec);
// imaginary part only (the real part is identically zero)
double kernel_imag(double q, double qp, const KernelSpec& spec);

// Truncated Weyl sum over n <= n_max of the ordered-monomial expansion.
cplx weyl_series_kernel(double q, double qp, const KernelSpec& spec, int n_max);

}  // namespace toalab
