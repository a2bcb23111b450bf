"""Photon field with the F box F correction: dispersion, box quantization,
Green's-function checks, truncated Fock space and spectral packet evolution."""

from .units import (
    CutoffError,
    PhysicalParams,
    UnitSystem,
    cutoff_wavenumber,
    dispersion,
    group_velocity,
    minimal_length,
    omega,
    phase_velocity,
)

__version__ = "0.1.0"

__all__ = [
    "CutoffError",
    "PhysicalParams",
    "UnitSystem",
    "cutoff_wavenumber",
    "dispersion",
    "group_velocity",
    "minimal_length",
    "omega",
    "phase_velocity",
]
