"""Exact spectral evolution of the xi field on a periodic 1D grid.

The field is stored by its two frequency branches,

    xi_hat(k, t) = plus[k] exp(-i w t) + minus[k] exp(+i w t)

so that ``minus[-k] = conj(plus[k])`` keeps ``xi`` real. Each mode only picks
up a phase, so stepping is exact up to rounding.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .modes import FieldConfiguration, GridSpec, Target, build_mode_set, make_mode, mode_amplitude
from .units import PhysicalParams, cutoff_wavenumber, dispersion


class Model(str, enum.Enum):
    CORRECTED = "corrected"
    STANDARD = "standard"


class PacketSupportError(ValueError):
    pass


class WrapAroundError(RuntimeError):
    pass


@dataclass(frozen=True)
class PacketSpec:
    """Gaussian packet: ``amplitude * exp(-(x-x0)^2 / 2 width^2) * exp(i k_center (x - x0))``."""

    k_center: float
    width: float
    x0: float
    amplitude: float = 1.0

    def check_support(self, params: PhysicalParams) -> None:
        k0 = cutoff_wavenumber(params)
        if not self.width > 0:
            raise PacketSupportError(f"packet width must be positive, got {self.width!r}")
        if not self.k_center - 3.0 / self.width > k0:
            raise PacketSupportError(
                f"packet support k_center - 3/width = {self.k_center - 3.0 / self.width:.6g} "
                f"must exceed k0 = {k0:.6g}")


@dataclass(frozen=True)
class EvolutionState:
    plus: np.ndarray
    minus: np.ndarray
    time: float
    grid: GridSpec
    model: Model = Model.CORRECTED
    target: Target = Target.XI

    def scaled(self, factor: complex, target: Target | None = None) -> "EvolutionState":
        return replace(self, plus=self.plus * factor, minus=self.minus * factor,
                       target=self.target if target is None else target)


def _require_1d(grid: GridSpec) -> None:
    if grid.dimensions != 1:
        raise ValueError("spectral evolution runs on 1D grids")


def wavenumbers(grid: GridSpec) -> np.ndarray:
    return grid.wavevectors()[0]


def frequencies(grid: GridSpec, params: PhysicalParams, model: Model) -> np.ndarray:
    """Per-lattice-point frequency; corrected sub-cutoff points get 0 and carry no amplitude."""
    k = np.abs(wavenumbers(grid))
    if Model(model) is Model.STANDARD:
        return params.c * k
    w = dispersion(k, params)
    return np.where(w.imag == 0, w.real, 0.0)


def allowed_mask(grid: GridSpec, params: PhysicalParams, model: Model) -> np.ndarray:
    n = grid.points_per_axis
    mask = np.ones(n, dtype=bool)
    mask[n // 2] = False  # Nyquist point has no partner
    if Model(model) is Model.CORRECTED:
        mask &= np.abs(wavenumbers(grid)) > cutoff_wavenumber(params)
    return mask


def _mirror(a: np.ndarray) -> np.ndarray:
    """``a[-k]`` in FFT ordering."""
    return a[(-np.arange(a.size)) % a.size]


def init_packet(spec: PacketSpec, grid: GridSpec, params: PhysicalParams,
                model: Model = Model.CORRECTED) -> EvolutionState:
    """Right-moving positive-frequency Gaussian packet."""
    _require_1d(grid)
    spec.check_support(params)
    k = wavenumbers(grid)
    weight = spec.amplitude * spec.width * math.sqrt(2.0 * math.pi) / grid.box_length
    plus = weight * np.exp(-0.5 * ((k - spec.k_center) * spec.width) ** 2 - 1j * k * spec.x0)
    plus = np.where((k > 0) & allowed_mask(grid, params, model), plus, 0.0)
    return EvolutionState(plus, np.conj(_mirror(plus)), 0.0, grid, Model(model))


def single_mode_state(n: int, grid: GridSpec, params: PhysicalParams, amplitude: complex = 1.0,
                      model: Model = Model.CORRECTED) -> EvolutionState:
    _require_1d(grid)
    plus = np.zeros(grid.points_per_axis, dtype=complex)
    idx = n % grid.points_per_axis
    if not allowed_mask(grid, params, model)[idx]:
        raise PacketSupportError(f"lattice mode n={n} is excluded for the {Model(model).value} model")
    plus[idx] = amplitude
    return EvolutionState(plus, np.conj(_mirror(plus)), 0.0, grid, Model(model))


def step(state: EvolutionState, dt: float, params: PhysicalParams) -> EvolutionState:
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return state
    w = frequencies(state.grid, params, state.model)
    phase = np.exp(-1j * w * dt)
    return replace(state, plus=state.plus * phase, minus=state.minus * np.conj(phase),
                   time=state.time + dt)


def trajectory(initial: EvolutionState, times: Sequence[float], params: PhysicalParams) -> list[EvolutionState]:
    """Snapshots at the given absolute times, each propagated directly from ``initial``."""
    return [step(initial, t - initial.time, params) for t in times]


def position_field(state: EvolutionState) -> np.ndarray:
    """Complex position-space samples; the imaginary part is rounding residue."""
    return np.fft.ifft(state.plus + state.minus) * state.grid.points_per_axis


def imaginary_residue(state: EvolutionState) -> float:
    f = position_field(state)
    norm = np.linalg.norm(f)
    return float(np.abs(f.imag).max() / norm) if norm > 0 else 0.0


def l2_norm(state: EvolutionState) -> float:
    f = position_field(state).real
    return float(math.sqrt(np.sum(f * f) * state.grid.box_length / state.grid.points_per_axis))


def spectral_energy(state: EvolutionState, params: PhysicalParams) -> float:
    """``sum_k w_k (|plus_k|^2 + |minus_k|^2)``."""
    w = frequencies(state.grid, params, state.model)
    return float(np.sum(w * (np.abs(state.plus) ** 2 + np.abs(state.minus) ** 2)))


def energy_density(state: EvolutionState, params: PhysicalParams) -> np.ndarray:
    """``|sum_k sqrt(w_k) plus_k e^{ikx}|^2``; integrates to the positive-branch energy."""
    w = frequencies(state.grid, params, state.model)
    amp = np.fft.ifft(np.sqrt(w) * state.plus) * state.grid.points_per_axis
    return np.abs(amp) ** 2


def centroid(state: EvolutionState, params: PhysicalParams, edge_fraction: float = 0.05,
             edge_tolerance: float = 1e-6) -> float:
    u = energy_density(state, params)
    total = u.sum()
    if not total > 0:
        raise ValueError("packet has no energy; centroid undefined")
    n = u.size
    band = max(1, int(edge_fraction * n))
    edge = (u[:band].sum() + u[-band:].sum()) / total
    if edge > edge_tolerance:
        raise WrapAroundError(f"packet reaches the periodic boundary (edge energy fraction {edge:.2e})")
    return float(np.sum(state.grid.axis() * u) / total)


def measure_group_velocity(states: Sequence[EvolutionState], params: PhysicalParams) -> float:
    """Least-squares slope of the energy centroid against time."""
    if len(states) < 5:
        raise ValueError("need at least 5 snapshots")
    t = np.array([s.time for s in states])
    x = np.array([centroid(s, params) for s in states])
    half = states[0].grid.box_length / 2
    if np.any(np.abs(np.diff(x)) > half) or abs(x[-1] - x[0]) >= half:
        raise WrapAroundError("centroid jumped by more than half the box")
    slope, _ = np.polyfit(t, x, 1)
    return float(slope)


def evolve_sourced_A(xi_states: Sequence[EvolutionState], grid: GridSpec,
                     params: PhysicalParams) -> list[EvolutionState]:
    """Per-mode ``A = -xi / k0^2`` at every snapshot (``box A = -xi`` on shell)."""
    from .greens import ResonanceError

    out = []
    k0 = cutoff_wavenumber(params)
    for s in xi_states:
        if s.grid != grid:
            raise ValueError("snapshot grid does not match")
        if s.target is not Target.XI:
            raise ValueError("sourced evolution needs xi snapshots")
        if s.model is not Model.CORRECTED:
            # w = c|k| makes the wave symbol vanish on every mode
            raise ResonanceError("standard-model xi is resonant with the massless wave operator")
        out.append(s.scaled(-1.0 / (k0 * k0), Target.A))
    return out


def to_field_configuration(state: EvolutionState, params: PhysicalParams) -> FieldConfiguration:
    """Express a corrected 1D state as box-mode coefficients (polarization 1) at ``t = 0``."""
    if state.model is not Model.CORRECTED:
        raise ValueError("only corrected states map onto the box-mode expansion")
    grid = state.grid
    k = wavenumbers(grid)
    active = np.flatnonzero(state.plus)
    if active.size == 0:
        raise ValueError("state carries no modes")
    mode_set = build_mode_set(grid, float(np.abs(k[active]).max()), params)
    w = frequencies(grid, params, state.model)
    coeffs = {}
    n_axis = np.fft.fftfreq(grid.points_per_axis, d=1.0 / grid.points_per_axis).astype(int)
    for idx in active:
        mode = make_mode((int(n_axis[idx]),), 1, grid)
        # undo the phase accumulated since t = 0 and the expansion prefactor
        coeffs[mode] = state.plus[idx] * np.exp(1j * w[idx] * state.time) / mode_amplitude(mode, params)
    return FieldConfiguration(mode_set, coeffs, state.time, state.target)


def write_trajectory_csv(path, states: Sequence[EvolutionState], params: PhysicalParams) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "centroid", "energy", "peak_abs_field"])
        for s in states:
            writer.writerow([
                f"{s.time:.17g}",
                f"{centroid(s, params):.17g}",
                f"{spectral_energy(s, params):.17g}",
                f"{np.abs(position_field(s).real).max():.17g}",
            ])
