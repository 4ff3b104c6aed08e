"""Recover the damping of a 1-D damped wave equation from its eigenvalues."""

from ._core import (
    FourierDamping,
    GNConfig,
    InversionRun,
    Spectrum,
    StepControl,
    add_noise,
    constant_damping_spectrum,
    estimate_alpha0,
    example_damping,
    example_spectrum,
    forward_spectrum,
    gauss_newton,
    l2_error,
    make_spectrum,
    mn_traces,
    multistep_schedule,
    raw_power_traces,
    spectral_traces,
    tn_matrix_traces,
    tn_scalar,
    trace_jacobian,
)

__all__ = [
    "FourierDamping",
    "GNConfig",
    "InversionRun",
    "Spectrum",
    "StepControl",
    "add_noise",
    "constant_damping_spectrum",
    "estimate_alpha0",
    "example_damping",
    "example_spectrum",
    "forward_spectrum",
    "gauss_newton",
    "l2_error",
    "make_spectrum",
    "mn_traces",
    "multistep_schedule",
    "raw_power_traces",
    "spectral_traces",
    "tn_matrix_traces",
    "tn_scalar",
    "trace_jacobian",
]
