"""Single-mode truncated Fock space: ladder operators, quadratures, states.

Quadrature conventions (printed in report headers):

* dimensionless: ``X = (b + b^dag)/sqrt(2)``, ``P = i (b^dag - b)/sqrt(2)``,
  so ``[X, P] = i`` and the vacuum has ``Var X = Var P = 1/2``;
* dimensional: ``X = sqrt(hbar / 2w) (b + b^dag)``,
  ``P = i sqrt(hbar w / 2) (b^dag - b)`` with ``w`` the corrected frequency
  ``omega(k, alpha)`` of the mode, so ``[X, P] = i hbar``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .expm import expm
from .modes import ModeIndex
from .units import CutoffError, PhysicalParams, omega

DEFAULT_DIMENSION = 64
LEAKAGE_BOUND = 1e-8

CONVENTIONS = {
    "dimensionless": "X = (b + b^dag)/sqrt(2); P = i(b^dag - b)/sqrt(2); [X,P] = i",
    "dimensional": "X = sqrt(hbar/(2 w)) (b + b^dag); P = i sqrt(hbar w/2) (b^dag - b); "
                   "w = c sqrt(k^2 - k0^2); [X,P] = i hbar",
}


class TruncationError(ValueError):
    """State does not fit in the truncated Fock space."""


class Convention(str, enum.Enum):
    DIMENSIONLESS = "dimensionless"
    DIMENSIONAL = "dimensional"


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        e = np.asarray(self.entries)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 2:
            raise ValueError(f"operator must be a square matrix of size >= 2, got {e.shape}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, f"{self.label}^dag")

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries @ other.entries, f"{self.label} {other.label}")

    def is_hermitian(self, atol: float = 1e-14) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, rtol=0, atol=atol))


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(a.entries @ b.entries - b.entries @ a.entries, f"[{a.label}, {b.label}]")


def truncated_ladder(dim: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    if dim < 2:
        raise ValueError(f"Fock dimension must be >= 2, got {dim}")
    b = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return OperatorMatrix(b, "b"), OperatorMatrix(b.conj().T.copy(), "b^dag")


def number_operator(dim: int) -> OperatorMatrix:
    return OperatorMatrix(np.diag(np.arange(dim, dtype=float)).astype(complex), "n")


def identity(dim: int) -> OperatorMatrix:
    return OperatorMatrix(np.eye(dim, dtype=complex), "1")


def quadratures(mode: ModeIndex | None, dim: int, params: PhysicalParams | None = None,
                convention: Convention | str = Convention.DIMENSIONLESS,
                frequency: float | None = None) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Quadrature pair for a mode; the dimensional scale uses the corrected frequency.

    ``frequency`` replaces the corrected frequency (e.g. ``c|k|`` for the
    uncorrected comparison).
    """
    convention = Convention(convention)
    b, bd = truncated_ladder(dim)
    x = (b.entries + bd.entries) / math.sqrt(2.0)
    p = 1j * (bd.entries - b.entries) / math.sqrt(2.0)
    if convention is Convention.DIMENSIONLESS:
        return OperatorMatrix(x, "X"), OperatorMatrix(p, "P")
    if params is None:
        raise ValueError("dimensional quadratures need physical parameters")
    if frequency is None:
        if mode is None:
            raise ValueError("dimensional quadratures need a mode or a frequency")
        w = omega(mode.kmag, params)
        if not (w.is_propagating and w.omega.real > 0):
            raise CutoffError(f"mode {mode.n} has no positive real frequency")
        frequency = w.omega.real
    if not frequency > 0:
        raise ValueError("frequency must be positive")
    sx = math.sqrt(params.hbar / frequency)
    sp = math.sqrt(params.hbar * frequency)
    return OperatorMatrix(sx * x, "X"), OperatorMatrix(sp * p, "P")


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    mode: ModeIndex | None = None

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 1 or a.size < 2:
            raise ValueError("state must be a vector of length >= 2")
        norm = np.linalg.norm(a)
        if not norm > 0:
            raise ValueError("state has zero norm")
        object.__setattr__(self, "amplitudes", a / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def leakage(self) -> float:
        # last two levels: squeezed states populate only one parity
        return float(np.max(np.abs(self.amplitudes[-2:]) ** 2))


def _accept(state: StateVector, what: str) -> StateVector:
    if state.leakage >= LEAKAGE_BOUND:
        raise TruncationError(f"{what}: edge population {state.leakage:.3e} >= {LEAKAGE_BOUND:.0e}")
    return state


def fock_state(n: int, dim: int, mode: ModeIndex | None = None) -> StateVector:
    a = np.zeros(dim, dtype=complex)
    a[n] = 1.0
    return StateVector(a, mode)


def vacuum(dim: int, mode: ModeIndex | None = None) -> StateVector:
    return fock_state(0, dim, mode)


def coherent_state(alpha_c: complex, mode: ModeIndex | None = None, dim: int = DEFAULT_DIMENSION) -> StateVector:
    """Normalized ``sum alpha^n / sqrt(n!) |n>``, built in log space."""
    if abs(alpha_c) ** 2 > dim / 4:
        raise TruncationError(f"|alpha|^2 = {abs(alpha_c) ** 2:.3g} exceeds dim/4 = {dim / 4:g}")
    n = np.arange(dim)
    if alpha_c == 0:
        return vacuum(dim, mode)
    logmag = n * math.log(abs(alpha_c)) - 0.5 * gammaln(n + 1)
    amps = np.exp(logmag - logmag.max()) * np.exp(1j * n * np.angle(alpha_c))
    return _accept(StateVector(amps, mode), "coherent state")


def displacement(alpha_c: complex, dim: int) -> OperatorMatrix:
    b, bd = truncated_ladder(dim)
    return OperatorMatrix(expm(alpha_c * bd.entries - np.conj(alpha_c) * b.entries), "D")


def squeeze_operator(r: float, phi: float, dim: int) -> OperatorMatrix:
    """``exp(1/2 (zeta^* b^2 - zeta b^dag^2))`` with ``zeta = r e^{i phi}``."""
    b, bd = truncated_ladder(dim)
    zeta = r * np.exp(1j * phi)
    gen = 0.5 * (np.conj(zeta) * (b.entries @ b.entries) - zeta * (bd.entries @ bd.entries))
    return OperatorMatrix(expm(gen), "S")


def squeezed_state(r: float, phi: float = 0.0, mode: ModeIndex | None = None,
                   dim: int = DEFAULT_DIMENSION) -> StateVector:
    if math.exp(2 * r) > dim / 8:
        raise TruncationError(f"e^(2r) = {math.exp(2 * r):.3g} exceeds dim/8 = {dim / 8:g}")
    state = squeeze_operator(r, phi, dim).entries @ vacuum(dim).amplitudes
    return _accept(StateVector(state, mode), "squeezed state")


def apply(op: OperatorMatrix, psi: StateVector) -> StateVector:
    if op.dim != psi.dim:
        raise ValueError(f"dimension mismatch: operator {op.dim}, state {psi.dim}")
    return StateVector(op.entries @ psi.amplitudes, psi.mode)


def expectation(op: OperatorMatrix, psi: StateVector) -> complex:
    if op.dim != psi.dim:
        raise ValueError(f"dimension mismatch: operator {op.dim}, state {psi.dim}")
    return complex(np.vdot(psi.amplitudes, op.entries @ psi.amplitudes))


def variance(op: OperatorMatrix, psi: StateVector) -> float:
    mean = expectation(op, psi)
    second = expectation(op @ op, psi)
    return float((second - mean * mean).real)


def moments(psi: StateVector, params: PhysicalParams | None = None,
            convention: Convention | str = Convention.DIMENSIONLESS) -> dict:
    """Means and variances of the quadratures plus the photon number."""
    x, p = quadratures(psi.mode, psi.dim, params, convention)
    return {
        "convention": Convention(convention).value,
        "mean_n": expectation(number_operator(psi.dim), psi).real,
        "mean_x": expectation(x, psi).real,
        "mean_p": expectation(p, psi).real,
        "var_x": variance(x, psi),
        "var_p": variance(p, psi),
        "leakage": psi.leakage,
    }
