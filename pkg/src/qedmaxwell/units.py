"""Physical constants, unit systems and the corrected photon dispersion.

The correction term ``alpha/(60 pi m^2) F box F`` shifts the free photon
dispersion to

    omega(k) = c * sqrt(k^2 - k0^2),    k0 = sqrt(15 pi / alpha) * (m c / hbar)

Everything here works with the electron mass stored as the reduced Compton
wavenumber ``m c / hbar`` so the radicand is a difference of two squared
wavenumbers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.constants as const

__all__ = [
    "CutoffError",
    "DispersionValue",
    "PhysicalParams",
    "UnitScales",
    "UnitSystem",
    "cutoff_wavenumber",
    "dispersion",
    "from_natural",
    "group_velocity",
    "minimal_length",
    "omega",
    "phase_velocity",
    "standard_omega",
    "to_natural",
]


class CutoffError(ValueError):
    """Raised when a quantity is requested at or below the cutoff wavenumber."""


class UnitSystem(str, enum.Enum):
    SI = "si"
    NATURAL = "natural"


CODATA_ALPHA = const.fine_structure
CODATA_ELECTRON_WAVENUMBER = const.m_e * const.c / const.hbar


@dataclass(frozen=True)
class PhysicalParams:
    """Immutable bundle of the constants every formula needs.

    In natural units the length unit is the minimal length ``1/k0`` and
    ``c = hbar = 1``; ``electron_wavenumber`` is then ``sqrt(alpha/15pi)``.
    """

    alpha: float
    electron_wavenumber: float
    c: float
    hbar: float
    unit_system: UnitSystem = UnitSystem.SI

    def __post_init__(self):
        for name in ("alpha", "electron_wavenumber", "c", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        object.__setattr__(self, "unit_system", UnitSystem(self.unit_system))

    @classmethod
    def si(cls, alpha: float = CODATA_ALPHA,
           electron_wavenumber: float = CODATA_ELECTRON_WAVENUMBER) -> "PhysicalParams":
        return cls(alpha, electron_wavenumber, const.c, const.hbar, UnitSystem.SI)

    @classmethod
    def natural(cls, alpha: float = CODATA_ALPHA) -> "PhysicalParams":
        return cls(alpha, math.sqrt(alpha / (15.0 * math.pi)), 1.0, 1.0, UnitSystem.NATURAL)

    @property
    def k0(self) -> float:
        return cutoff_wavenumber(self)


@dataclass(frozen=True)
class UnitScales:
    """SI magnitudes of the natural length, time and action units."""

    length: float
    time: float
    action: float


@dataclass(frozen=True)
class DispersionValue:
    omega: complex
    is_propagating: bool

    @property
    def real(self) -> float:
        return self.omega.real


def cutoff_wavenumber(params: PhysicalParams) -> float:
    if params.unit_system is UnitSystem.NATURAL:
        return 1.0
    return math.sqrt(15.0 * math.pi / params.alpha) * params.electron_wavenumber


def minimal_length(params: PhysicalParams) -> float:
    return 1.0 / cutoff_wavenumber(params)


def _check_k(k: float) -> float:
    k = float(k)
    if not k >= 0:
        raise ValueError(f"wavenumber must be non-negative, got {k!r}")
    return k


def omega(k: float, params: PhysicalParams) -> DispersionValue:
    """Corrected angular frequency on the principal branch.

    Below the cutoff the radicand is negative and the result is ``i*c*sqrt(k0^2-k^2)``
    (positive imaginary part), flagged as evanescent.
    """
    k = _check_k(k)
    k0 = cutoff_wavenumber(params)
    # (k - k0)(k + k0) keeps the radicand accurate near the cutoff
    radicand = (k - k0) * (k + k0)
    if radicand >= 0:
        return DispersionValue(complex(params.c * math.sqrt(radicand), 0.0), True)
    return DispersionValue(complex(0.0, params.c * math.sqrt(-radicand)), False)


def dispersion(k, params: PhysicalParams) -> np.ndarray:
    """Vectorised ``omega`` for an array of wavenumber magnitudes (complex result)."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise ValueError("wavenumbers must be non-negative")
    k0 = cutoff_wavenumber(params)
    radicand = (k - k0) * (k + k0)
    return params.c * np.sqrt(radicand.astype(complex))


def group_velocity(k: float, params: PhysicalParams) -> float:
    k = _check_k(k)
    k0 = cutoff_wavenumber(params)
    if k <= k0:
        raise CutoffError(f"group velocity undefined at k={k!r} <= k0={k0!r}")
    return params.c * k / math.sqrt((k - k0) * (k + k0))


def phase_velocity(k: float, params: PhysicalParams) -> float:
    k = _check_k(k)
    if k == 0:
        raise ValueError("phase velocity undefined at k = 0")
    w = omega(k, params)
    if not w.is_propagating:
        raise CutoffError(f"phase velocity undefined below cutoff (k={k!r})")
    return w.omega.real / k


def standard_omega(k: float, params: PhysicalParams) -> float:
    return params.c * _check_k(k)


def to_natural(params: PhysicalParams) -> tuple[PhysicalParams, UnitScales]:
    """Rescale to ``k0 = c = hbar = 1``, returning the scales needed to go back."""
    k0 = cutoff_wavenumber(params)
    scales = UnitScales(length=1.0 / k0, time=1.0 / (params.c * k0), action=params.hbar)
    natural = PhysicalParams(
        params.alpha,
        params.electron_wavenumber * scales.length,
        params.c * scales.time / scales.length,
        params.hbar / scales.action,
        UnitSystem.NATURAL,
    )
    return natural, scales


def from_natural(params: PhysicalParams, scales: UnitScales) -> PhysicalParams:
    if params.unit_system is not UnitSystem.NATURAL:
        raise ValueError("from_natural expects natural-unit parameters")
    return PhysicalParams(
        params.alpha,
        params.electron_wavenumber / scales.length,
        params.c * scales.length / scales.time,
        params.hbar * scales.action,
        UnitSystem.SI,
    )

