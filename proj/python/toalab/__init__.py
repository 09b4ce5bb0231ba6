"""Quantum time-of-arrival toolkit (Python bindings)."""

from ._toalab import (  # noqa: F401
    ConfigError,
    CutSide,
    Frame,
    InputError,
    NumericalError,
    PhysicalParams,
    Spectrum,
    WavepacketSpec,
    __version__,
    alpha_r,
    bessel_j1,
    classical_toa,
    covariance_check,
    expect_toa,
    hyp0f1,
    hyp2f1_row,
    kernel_value,
    leading_expansion,
    run,
    spectrum,
    toa_distribution,
)
