#pragma once
// Expected arrival time as a double integral of the kernel against the state.

#include <string>
#include <vector>

#include "toalab/kernel.hpp"
#include "toalab/states.hpp"

namespace toalab {

struct QuadControl {
    int order = 10;                // Gauss-Legendre points per panel
    double tol = 1e-9;             // relative change allowed between halvings
    int max_refine = 4;            // number of halvings before giving up
    double panel_fraction = 0.25;  // panel width as a fraction of the fastest period
    int threads = 1;
};

struct ExpectationResult {
    double value = 0.0;         // real part
    double imag_residue = 0.0;  // |Im| / |Re| of the raw integral
    double change = 0.0;        // last relative change under halving
    int panels = 0;             // outer panel count at the accepted level
    int refinements = 0;
    double tol = 0.0;
    std::vector<std::string> warnings;
};

// Direct form: int dq int dq' conj(phi(q)) K(q,q') phi(q'), inner split on the diagonal.
ExpectationResult expect_toa_exact(const ComplexAmplitude& phi, const KernelSpec& spec,
                                   const QuadControl& ctrl = {});

// Rotated variables x = (q+q')/2, y = (q-q')/2 with the boost phase exp(-2iky) explicit.
ExpectationResult expect_toa_centered(const ComplexAmplitude& phi, const KernelSpec& spec,
                                      const QuadControl& ctrl = {});

}  // namespace toalab
