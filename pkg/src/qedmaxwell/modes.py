"""Box-mode quantization of the corrected vector potential.

Conventions
-----------
* Fields live on a periodic cubic box of side ``L`` sampled at
  ``points_per_axis`` nodes per axis; lattice wavevectors are ``2 pi n / L``.
* A 1D grid carries wavevectors along x; fields are still 3-vectors so
  polarizations and curls keep their usual meaning.
* Mode weight ``N(k) = (2pi)^{3/2} / (pi k0^2) * sqrt(hbar omega) / k``. The
  field expansion uses ``N(k)`` as prefactor and the mode functions
  ``g = N^{-1/2} exp(-i(omega t - k.x))``, so a coefficient ``b`` contributes
  ``N^{3/2} b eps g`` and the projection divides that back out.
* Gaussian units for observables: ``E = -(1/c) dA/dt``, ``B = curl A``, with
  the scalar potential set to zero for transverse content.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .units import CutoffError, PhysicalParams, cutoff_wavenumber, omega

# Boundary tolerance for lattice points that land on k0 or k_max up to rounding.
_EDGE_RTOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    box_length: float
    points_per_axis: int
    dimensions: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.box_length) and self.box_length > 0):
            raise ValueError(f"box_length must be positive, got {self.box_length!r}")
        n = int(self.points_per_axis)
        if n < 4 or n & (n - 1):
            raise ValueError(f"points_per_axis must be a power of two >= 4, got {n}")
        if self.dimensions not in (1, 3):
            raise ValueError(f"dimensions must be 1 or 3, got {self.dimensions}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dimensions

    @property
    def volume(self) -> float:
        return self.box_length ** self.dimensions

    @property
    def cell_volume(self) -> float:
        return (self.box_length / self.points_per_axis) ** self.dimensions

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.box_length

    def axis(self) -> np.ndarray:
        return np.arange(self.points_per_axis) * (self.box_length / self.points_per_axis)

    def coordinates(self) -> np.ndarray:
        """Position 3-vectors on the grid, shape ``(3, *shape)``."""
        x = self.axis()
        out = np.zeros((3,) + self.shape)
        if self.dimensions == 1:
            out[0] = x
        else:
            out[:] = np.meshgrid(x, x, x, indexing="ij")
        return out

    def wavevectors(self) -> np.ndarray:
        """FFT-ordered wavevector 3-vectors, shape ``(3, *shape)``."""
        kx = 2.0 * math.pi * np.fft.fftfreq(self.points_per_axis, d=self.box_length / self.points_per_axis)
        out = np.zeros((3,) + self.shape)
        if self.dimensions == 1:
            out[0] = kx
        else:
            out[:] = np.meshgrid(kx, kx, kx, indexing="ij")
        return out


@dataclass(frozen=True)
class ModeIndex:
    """A lattice mode ``(n, s)``; equality and hashing use only ``(n, s)``."""

    n: tuple[int, ...]
    s: int
    k: tuple[float, float, float] = field(compare=False)
    epsilon: tuple[complex, complex, complex] = field(compare=False)

    @property
    def kvec(self) -> np.ndarray:
        return np.array(self.k)

    @property
    def kmag(self) -> float:
        return float(np.linalg.norm(self.k))

    @property
    def polarization(self) -> np.ndarray:
        return np.array(self.epsilon, dtype=complex)


def polarization_basis(k) -> tuple[np.ndarray, np.ndarray]:
    """Two real unit vectors transverse to ``k`` and to each other.

    The first is the coordinate axis least aligned with ``k`` (ties go to
    x before y before z) with its component along ``k`` removed; the second
    is ``khat x eps1``. This gives ``z -> (x, y)`` and ``x -> (y, z)``.
    """
    k = np.asarray(k, dtype=float)
    if k.shape != (3,):
        raise ValueError("wavevector must be a 3-vector")
    norm = np.linalg.norm(k)
    if norm == 0:
        raise ValueError("polarization basis undefined for a zero wavevector")
    khat = k / norm
    axis = int(np.argmin(np.abs(khat)))
    e = np.zeros(3)
    e[axis] = 1.0
    eps1 = e - khat * khat[axis]
    eps1 /= np.linalg.norm(eps1)
    eps2 = np.cross(khat, eps1)
    return eps1, eps2


def make_mode(n: Sequence[int], s: int, grid: GridSpec) -> ModeIndex:
    n = tuple(int(v) for v in n)
    if len(n) != grid.dimensions:
        raise ValueError(f"mode index {n} does not match a {grid.dimensions}D grid")
    if s not in (1, 2):
        raise ValueError(f"polarization label must be 1 or 2, got {s}")
    k = np.zeros(3)
    k[: grid.dimensions] = grid.dk * np.array(n, dtype=float)
    eps = polarization_basis(k)[s - 1]
    return ModeIndex(n, s, tuple(float(v) for v in k), tuple(complex(v) for v in eps))


def mode_omega(mode: ModeIndex, params: PhysicalParams) -> float:
    w = omega(mode.kmag, params)
    if not w.is_propagating:
        raise CutoffError(f"mode {mode.n} lies below the cutoff")
    return w.omega.real


def mode_amplitude(mode: ModeIndex, params: PhysicalParams) -> float:
    """Prefactor ``(2pi)^{3/2}/(pi k0^2) * sqrt(hbar omega)/|k|`` of the box expansion."""
    k = mode.kmag
    if k == 0:
        raise CutoffError("zero wavevector has no amplitude")
    w = mode_omega(mode, params)
    k0 = cutoff_wavenumber(params)
    return (2.0 * math.pi) ** 1.5 / (math.pi * k0 * k0) * math.sqrt(params.hbar * w) / k


def normalization_constant(mode: ModeIndex, grid: GridSpec, params: PhysicalParams) -> float:
    """Klein-Gordon norm ``(g, g) = 2 omega V / N(k)`` of a box mode function."""
    return 2.0 * mode_omega(mode, params) * grid.volume / mode_amplitude(mode, params)


@dataclass(frozen=True)
class ModeSet:
    modes: tuple[ModeIndex, ...]
    normalization_constant: tuple[float, ...]
    amplitude: tuple[float, ...]
    grid: GridSpec

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __contains__(self, mode):
        return mode in self._lookup

    def index(self, mode: ModeIndex) -> int:
        return self._lookup[mode]

    @property
    def _lookup(self) -> dict:
        try:
            return self.__dict__["_lookup_cache"]
        except KeyError:
            table = {m: i for i, m in enumerate(self.modes)}
            object.__setattr__(self, "_lookup_cache", table)
            return table


def build_mode_set(grid: GridSpec, k_max: float, params: PhysicalParams) -> ModeSet:
    """All lattice modes with ``k0 < |k| <= k_max``, two polarizations each.

    The edge ``|k| = k0`` is dropped because the mode function normalization
    diverges there. Ordering is lexicographic in ``(n, s)``.
    """
    k0 = cutoff_wavenumber(params)
    if not k_max > k0:
        raise ValueError(f"k_max={k_max!r} must exceed the cutoff k0={k0!r}")
    n_max = int(math.floor(k_max / grid.dk * (1 + _EDGE_RTOL)))
    lo, hi = k0 * (1 + _EDGE_RTOL), k_max * (1 + _EDGE_RTOL)
    modes = []
    for n in itertools.product(range(-n_max, n_max + 1), repeat=grid.dimensions):
        kmag = grid.dk * math.sqrt(sum(v * v for v in n))
        if lo < kmag <= hi:
            modes.extend(make_mode(n, s, grid) for s in (1, 2))
    if not modes:
        raise ValueError(
            f"no lattice mode with k0 < |k| <= k_max for box_length={grid.box_length!r}, k_max={k_max!r}"
        )
    modes.sort(key=lambda m: (m.n, m.s))
    return ModeSet(
        tuple(modes),
        tuple(normalization_constant(m, grid, params) for m in modes),
        tuple(mode_amplitude(m, params) for m in modes),
        grid,
    )


@dataclass
class GridField:
    """Field samples plus their time derivative at one instant.

    ``values`` has shape ``(components, *grid.shape)``.
    """

    values: np.ndarray
    time_derivative: np.ndarray
    grid: GridSpec
    time: float = 0.0

    def conj(self) -> "GridField":
        return GridField(np.conj(self.values), np.conj(self.time_derivative), self.grid, self.time)

    def __add__(self, other: "GridField") -> "GridField":
        _check_compatible(self, other)
        return GridField(self.values + other.values, self.time_derivative + other.time_derivative,
                         self.grid, self.time)

    def __mul__(self, scalar) -> "GridField":
        return GridField(self.values * scalar, self.time_derivative * scalar, self.grid, self.time)

    __rmul__ = __mul__


def _check_compatible(f: GridField, g: GridField) -> None:
    if f.grid != g.grid:
        raise ValueError("fields are sampled on different grids")
    if f.values.shape != g.values.shape:
        raise ValueError(f"field shapes differ: {f.values.shape} vs {g.values.shape}")
    if f.time != g.time:
        raise ValueError(f"fields are sampled at different times: {f.time} vs {g.time}")


def kg_inner_product(f: GridField, g: GridField, grid: GridSpec | None = None) -> complex:
    """Discrete ``i * sum (f* . dg/dt - g . df*/dt) dV`` over the grid."""
    _check_compatible(f, g)
    if grid is not None and grid != f.grid:
        raise ValueError("grid does not match the fields' grid")
    integrand = np.conj(f.values) * g.time_derivative - g.values * np.conj(f.time_derivative)
    return complex(1j * integrand.sum() * f.grid.cell_volume)


def mode_function(mode: ModeIndex, x, t: float, params: PhysicalParams) -> complex | np.ndarray:
    """Scalar positive-frequency mode function ``N^{-1/2} exp(-i(omega t - k.x))``.

    ``x`` is a 3-vector or an array of 3-vectors along the leading axis.
    """
    w = mode_omega(mode, params)
    norm = mode_amplitude(mode, params) ** -0.5
    x = np.asarray(x, dtype=float)
    kx = np.tensordot(mode.kvec, x, axes=(0, 0))
    return norm * np.exp(-1j * (w * t - kx))


def mode_field(mode: ModeIndex, grid: GridSpec, params: PhysicalParams, t: float = 0.0,
               conjugate: bool = False) -> GridField:
    """Vector mode function ``eps * g`` (or its conjugate) sampled on ``grid``."""
    g = mode_function(mode, grid.coordinates(), t, params)
    w = mode_omega(mode, params)
    eps = mode.polarization.reshape((3,) + (1,) * grid.dimensions)
    values = eps * g
    dt = -1j * w * values
    if conjugate:
        values, dt = np.conj(values), np.conj(dt)
    return GridField(values, dt, grid, t)


class Target(str, enum.Enum):
    XI = "xi"
    A = "A"


@dataclass(frozen=True)
class FieldConfiguration:
    """Mode coefficients ``b_ks`` at ``t = 0``, evaluated at ``time``."""

    mode_set: ModeSet
    coefficients: Mapping[ModeIndex, complex]
    time: float = 0.0
    target: Target = Target.A

    def scaled(self, factor: complex) -> "FieldConfiguration":
        return FieldConfiguration(self.mode_set, {m: factor * b for m, b in self.coefficients.items()},
                                  self.time, self.target)

    def combine(self, other: "FieldConfiguration", a: complex = 1.0, b: complex = 1.0) -> "FieldConfiguration":
        """``a * self + b * other`` on a shared mode set."""
        if other.mode_set is not self.mode_set and other.mode_set != self.mode_set:
            raise ValueError("configurations use different mode sets")
        out = {m: a * c for m, c in self.coefficients.items()}
        for m, c in other.coefficients.items():
            out[m] = out.get(m, 0.0) + b * c
        return FieldConfiguration(self.mode_set, out, self.time, self.target)

    def at_time(self, t: float) -> "FieldConfiguration":
        return FieldConfiguration(self.mode_set, self.coefficients, t, self.target)


def random_configuration(mode_set: ModeSet, rng: np.random.Generator, time: float = 0.0,
                         target: Target = Target.A) -> FieldConfiguration:
    z = rng.standard_normal(len(mode_set)) + 1j * rng.standard_normal(len(mode_set))
    return FieldConfiguration(mode_set, dict(zip(mode_set.modes, z)), time, target)


def _spectra(cfg: FieldConfiguration, grid: GridSpec, params: PhysicalParams):
    """Positive-frequency spectral arrays of the field and of its time derivative."""
    if grid != cfg.mode_set.grid:
        raise ValueError("grid does not match the configuration's mode set")
    half = grid.points_per_axis // 2
    spec = np.zeros((3,) + grid.shape, dtype=complex)
    spec_t = np.zeros_like(spec)
    for mode, b in cfg.coefficients.items():
        if mode not in cfg.mode_set:
            raise KeyError(f"mode {mode.n}, s={mode.s} is not in the configuration's mode set")
        if any(abs(v) >= half for v in mode.n):
            raise ValueError(f"mode {mode.n} is not resolved by {grid.points_per_axis} points per axis")
        w = mode_omega(mode, params)
        c = mode_amplitude(mode, params) * complex(b) * np.exp(-1j * w * cfg.time)
        idx = (slice(None),) + tuple(v % grid.points_per_axis for v in mode.n)
        spec[idx] += c * mode.polarization
        spec_t[idx] += -1j * w * c * mode.polarization
    return spec, spec_t


def _to_position(spec: np.ndarray, grid: GridSpec) -> np.ndarray:
    axes = tuple(range(1, grid.dimensions + 1))
    return np.fft.ifftn(spec, axes=axes) * grid.points_per_axis ** grid.dimensions


def _to_spectrum(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    axes = tuple(range(1, grid.dimensions + 1))
    return np.fft.fftn(values, axes=axes) / grid.points_per_axis ** grid.dimensions


def synthesize_field(cfg: FieldConfiguration, grid: GridSpec, params: PhysicalParams,
                     include_conjugate: bool = True) -> GridField:
    """Sum of ``N(k) (eps b e^{-i(wt - k.x)} + c.c.)`` over the configured modes.

    With ``include_conjugate=False`` only the complex positive-frequency part
    is returned.
    """
    spec, spec_t = _spectra(cfg, grid, params)
    pos, pos_t = _to_position(spec, grid), _to_position(spec_t, grid)
    if not include_conjugate:
        return GridField(pos, pos_t, grid, cfg.time)
    full, full_t = pos + np.conj(pos), pos_t + np.conj(pos_t)
    scale = max(np.linalg.norm(full), np.finfo(float).tiny)
    if np.abs(full.imag).max(initial=0.0) > 1e-10 * scale:
        raise ArithmeticError("synthesized field has a non-negligible imaginary part")
    return GridField(full.real, full_t.real, grid, cfg.time)


def curl(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    kv = grid.wavevectors()
    spec = _to_spectrum(values, grid)
    out = _to_position(1j * np.cross(kv, spec, axis=0), grid)
    return out.real if np.isrealobj(values) else out


def divergence(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    kv = grid.wavevectors()
    spec = _to_spectrum(values, grid)
    out = np.fft.ifftn(1j * (kv * spec).sum(axis=0)) * grid.points_per_axis ** grid.dimensions
    return out.real if np.isrealobj(values) else out


def laplacian(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    kv = grid.wavevectors()
    spec = _to_spectrum(values, grid)
    out = _to_position(-(kv * kv).sum(axis=0) * spec, grid)
    return out.real if np.isrealobj(values) else out


def electric_magnetic(cfg: FieldConfiguration, grid: GridSpec, params: PhysicalParams):
    """``(E, B)`` on the grid with ``E = -(1/c) dA/dt`` and ``B = curl A`` (spectral)."""
    a = synthesize_field(cfg, grid, params)
    return -a.time_derivative / params.c, curl(a.values, grid)


def project_coefficient(fld: GridField, mode: ModeIndex, grid: GridSpec, params: PhysicalParams) -> complex:
    """Recover ``b`` for ``mode`` from a synthesized field via ``(eps g, A) / (C_k N^{3/2})``.

    ``fld`` must be sampled at the time its coefficients refer to, with the
    mode phase at ``t = 0`` as reference.
    """
    if fld.grid != grid:
        raise ValueError("field grid does not match")
    probe = mode_field(mode, grid, params, fld.time)
    overlap = kg_inner_product(probe, fld)
    c_k = normalization_constant(mode, grid, params)
    return overlap / (c_k * mode_amplitude(mode, params) ** 1.5)


def project_configuration(fld: GridField, mode_set: ModeSet, params: PhysicalParams,
                          target: Target = Target.A) -> FieldConfiguration:
    coeffs = {m: project_coefficient(fld, m, mode_set.grid, params) for m in mode_set}
    return FieldConfiguration(mode_set, coeffs, fld.time, target)


# ----------------------------------------------------------------------------
# wave packets


class PacketBasisError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PacketWindow:
    """Gaussian window in k, ``width`` in lattice spacings.

    Modes of one polarization (and, in 1D, one propagation direction) are cut
    into consecutive bins of ``bin_size``; a bin yields ``bin_size`` packets,
    each the Gaussian-weighted superposition centred on the bin and shifted
    to one of ``bin_size`` evenly staggered positions. ``width = 0`` is the
    identity window.
    """

    width: float = 2.0
    bin_size: int = 4
    max_condition: float = 1e12

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("window width must be non-negative")
        if self.bin_size < 1:
            raise ValueError("bin_size must be positive")


@dataclass(frozen=True)
class WavepacketBasis:
    """Packets ``f_j = sum_m U[j, m] eps_m g_m / sqrt(C_m)`` over ``mode_set``."""

    mode_set: ModeSet
    transform: np.ndarray
    seed_condition: float

    def __len__(self):
        return self.transform.shape[0]

    def packet_field(self, j: int, params: PhysicalParams, t: float = 0.0) -> GridField:
        grid = self.mode_set.grid
        out = None
        for m, (mode, c_k) in enumerate(zip(self.mode_set.modes, self.mode_set.normalization_constant)):
            w = self.transform[j, m]
            if w == 0:
                continue
            term = mode_field(mode, grid, params, t) * (w / math.sqrt(c_k))
            out = term if out is None else out + term
        return out

    def packet_coefficients(self, mode_coefficients: np.ndarray) -> np.ndarray:
        """Map KG-normalized mode amplitudes to packet amplitudes."""
        return self.transform.conj() @ mode_coefficients


def _mode_groups(mode_set: ModeSet) -> list[list[int]]:
    groups: dict[tuple, list[int]] = {}
    for i, m in enumerate(mode_set.modes):
        key = (m.s, int(np.sign(m.n[0]))) if mode_set.grid.dimensions == 1 else (m.s,)
        groups.setdefault(key, []).append(i)
    return [groups[k] for k in sorted(groups)]


def _gram_schmidt(seeds: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one reorthogonalization pass, row-wise."""
    q = np.array(seeds, dtype=complex)
    for j in range(q.shape[0]):
        v = q[j]
        for _ in range(2):
            for i in range(j):
                v = v - np.vdot(q[i], v) * q[i]
        q[j] = v / np.linalg.norm(v)
    return q


def build_wavepacket_basis(mode_set: ModeSet, window: PacketWindow = PacketWindow()) -> WavepacketBasis:
    n = len(mode_set)
    if n < 2:
        raise ValueError("a packet basis needs at least two modes")
    if window.width == 0:
        return WavepacketBasis(mode_set, np.eye(n, dtype=complex), 1.0)
    kvecs = np.array([m.k for m in mode_set.modes])
    sigma = window.width * mode_set.grid.dk
    seeds = np.zeros((n, n), dtype=complex)
    row = 0
    for members in _mode_groups(mode_set):
        rank = np.arange(len(members))
        for start in range(0, len(members), window.bin_size):
            bin_members = members[start:start + window.bin_size]
            centre = kvecs[bin_members].mean(axis=0)
            dist2 = ((kvecs[members] - centre) ** 2).sum(axis=1)
            envelope = np.exp(-dist2 / (2.0 * sigma * sigma))
            size = len(bin_members)
            for p in range(size):
                seeds[row, members] = envelope * np.exp(-2j * math.pi * p * rank / size)
                row += 1
    # mode functions are KG-orthonormal after dividing by sqrt(C_k), so the
    # packet Gram matrix is the coefficient Gram matrix
    gram = seeds @ seeds.conj().T
    cond = float(np.linalg.cond(gram))
    if not cond <= window.max_condition:
        raise PacketBasisError(f"packet seeds are numerically dependent (Gram condition {cond:.3e})")
    return WavepacketBasis(mode_set, _gram_schmidt(seeds), cond)
