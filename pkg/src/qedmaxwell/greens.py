"""Retarded Green's function, the I-alpha integral and the sourced wave equation.

Convention: ``box = (1/c^2) d_t^2 - laplacian``, so a plane wave
``exp(-i(w t - k.x))`` has symbol ``k^2 - w^2/c^2``, which equals ``k0^2`` on
the corrected mass shell. ``box A = S`` is solved by
``A = c^2 * int G S`` with ``G = delta(t - t' - r/c) / (4 pi c^2 r)``.

The I-alpha integral is conditionally convergent. It is regularized with a
factor ``exp(-eps r)`` and the ``eps -> 0`` limit is taken by Richardson
extrapolation on the ladder ``eps, eps/2, ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .modes import FieldConfiguration, GridSpec, ModeIndex, Target, _spectra, _to_position, laplacian
from .units import CutoffError, PhysicalParams, cutoff_wavenumber, omega

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


class ExtrapolationError(ArithmeticError):
    """The eps -> 0 ladder did not settle; ``diagnostics`` holds the ladder."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class ResonanceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class RadialQuadratureSpec:
    """Damped radial quadrature settings.

    ``r_max`` belongs to the first (largest) ``regularization_epsilon``; each
    halving of eps doubles the radius, so ``r_max * eps`` is the same on
    every level. ``nodes`` is the Gauss-Legendre order per panel; a panel
    spans one period of the fastest oscillation.
    """

    regularization_epsilon: float
    r_max: float
    nodes: int = 16
    extrapolation_levels: int = 5
    convergence_rtol: float = 1e-4

    def __post_init__(self):
        if not self.regularization_epsilon > 0:
            raise ValueError("regularization_epsilon must be positive")
        if self.r_max * self.regularization_epsilon < 20 * (1 - 1e-12):
            raise ValueError("r_max * epsilon must be >= 20 to suppress the tail below 1e-8")
        if self.nodes < 1:
            raise ValueError("nodes must be positive")
        if self.extrapolation_levels < 2:
            raise ValueError("extrapolation needs at least two levels")

    @classmethod
    def for_wavenumber(cls, k: float, params: PhysicalParams, fraction: float = 0.2,
                       levels: int = 5, **kw) -> "RadialQuadratureSpec":
        """Ladder sized to the analytic radius of the damped integral in eps.

        The damped integral has poles at ``eps = i (q +- k)``; the nearest is
        at distance ``k0^2 / (k + |q|)``. The ladder starts at ``fraction`` of it.
        """
        k0 = cutoff_wavenumber(params)
        q = abs(omega(k, params).omega) / params.c
        radius = k0 * k0 / (k + q) if k + q > 0 else k0
        eps = fraction * radius
        return cls(eps, 20.0 / eps, extrapolation_levels=levels, **kw)

    def halved(self) -> "RadialQuadratureSpec":
        return RadialQuadratureSpec(self.regularization_epsilon / 2, self.r_max * 2, self.nodes,
                                    self.extrapolation_levels, self.convergence_rtol)

    def ladder(self) -> list[tuple[float, float]]:
        return [(self.regularization_epsilon / 2 ** j, self.r_max * 2 ** j)
                for j in range(self.extrapolation_levels)]


@dataclass(frozen=True)
class ExtrapolatedValue:
    value: complex
    epsilons: tuple[float, ...]
    samples: tuple[complex, ...]
    diagonal: tuple[complex, ...] = field(repr=False)

    @property
    def last_change(self) -> float:
        return abs(self.diagonal[-1] - self.diagonal[-2]) / max(abs(self.diagonal[-1]), 1e-300)


def richardson_to_zero(epsilons, samples, rtol: float = 1e-4) -> ExtrapolatedValue:
    """Polynomial extrapolation to ``eps = 0`` for a ladder with ratio 2."""
    epsilons = tuple(float(e) for e in epsilons)
    for a, b in zip(epsilons, epsilons[1:]):
        if not math.isclose(a, 2 * b, rel_tol=1e-12):
            raise ValueError("Richardson ladder must halve eps at each level")
    table = [complex(s) for s in samples]
    diagonal = [table[0]]
    for m in range(1, len(table)):
        f = 2.0 ** m
        table = [(f * table[i + 1] - table[i]) / (f - 1.0) for i in range(len(table) - 1)]
        diagonal.append(table[-1])
    out = ExtrapolatedValue(table[0], epsilons, tuple(complex(s) for s in samples), tuple(diagonal))
    if out.last_change > rtol:
        raise ExtrapolationError(
            f"extrapolation did not converge: last change {out.last_change:.3e} > {rtol:.1e}", out)
    return out


def _panels(r_max: float, rate: float, order: int, chunk: int = 65536):
    """Yield (r, w) chunks of a composite Gauss-Legendre rule on [0, r_max]."""
    h = 2.0 * math.pi / max(rate, 1e-300)
    n_panels = max(1, math.ceil(r_max / h))
    h = r_max / n_panels
    x, w = _gauss_legendre(order)
    per = max(1, chunk // order)
    for start in range(0, n_panels, per):
        a = (np.arange(start, min(start + per, n_panels)) * h)[:, None]
        yield (a + (x + 1.0) * (h / 2)).ravel(), np.broadcast_to(w * (h / 2), (a.shape[0], order)).ravel()


def damped_sine_transform(k: float, q: complex, eps: float, r_max: float, order: int = 16) -> complex:
    """``int_0^r_max sin(k r) exp((i q - eps) r) dr`` by composite Gauss-Legendre."""
    rate = k + abs(q)
    total = 0.0 + 0.0j
    for r, w in _panels(r_max, rate, order):
        total += np.sum(w * np.sin(k * r) * np.exp((1j * q - eps) * r))
    return complex(total)


def i_alpha_estimate(k: float, params: PhysicalParams, quad: RadialQuadratureSpec | None = None) -> ExtrapolatedValue:
    """Extrapolated ``I(k) = int d^3r exp(-i k.r + i w r / c) / r``.

    The solid angle is done in closed form, ``4 pi sin(kr)/(kr)``, leaving
    ``(4 pi / k) int_0^inf sin(k r) exp(i q r) dr`` with ``q = w(k)/c`` on the
    principal branch.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    quad = quad or RadialQuadratureSpec.for_wavenumber(k, params)
    q = omega(k, params).omega / params.c
    samples, eps = [], []
    for e, r_max in quad.ladder():
        samples.append(4.0 * math.pi / k * damped_sine_transform(k, q, e, r_max, quad.nodes))
        eps.append(e)
    return richardson_to_zero(eps, samples, quad.convergence_rtol)


def i_alpha_numeric(k: float, params: PhysicalParams, quad: RadialQuadratureSpec | None = None) -> complex:
    return i_alpha_estimate(k, params, quad).value


def i_alpha_closed(k: float, params: PhysicalParams) -> float:
    """Closed-form magnitude ``4 pi w / (k c k0^2)``; exceeds the eps -> 0 limit by ``c k / w``."""
    k0 = cutoff_wavenumber(params)
    if not k > k0:
        raise CutoffError(f"closed form needs k > k0 (got k={k!r}, k0={k0!r})")
    w = omega(k, params).omega.real
    return 4.0 * math.pi * w / (k * params.c * k0 * k0)


def i_alpha_limit(k: float, params: PhysicalParams) -> complex:
    """Exact ``eps -> 0`` limit of the damped integral: ``4 pi / (k^2 - q^2) = 4 pi / k0^2``.

    From ``int_0^inf sin(kr) e^{-s r} dr = k / (s^2 + k^2)`` with ``s = eps - i q``.
    """
    k0 = cutoff_wavenumber(params)
    return complex(4.0 * math.pi / (k0 * k0))


def damped_i_alpha(k: float, params: PhysicalParams, eps: float) -> complex:
    """Closed form of the damped integral at finite ``eps`` (infinite radius)."""
    q = omega(k, params).omega / params.c
    s = eps - 1j * q
    return 4.0 * math.pi / (s * s + k * k)


# ----------------------------------------------------------------------------
# retarded kernel


def retarded_time(x, t: float, xp, c: float):
    r = np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(xp, dtype=float), axis=0)
    return t - r / c


def greens_kernel(x, t, xp, tp, params: PhysicalParams, atol: float = 1e-12):
    """Weight ``1/(4 pi c^2 r)`` of the retarded kernel, zero off the light cone.

    The delta function is never sampled as a spike: callers integrate it out by
    evaluating the source at the retarded time and use this weight. ``x`` and
    ``xp`` may be arrays of 3-vectors along axis 0.
    """
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    r = np.linalg.norm(x - xp, axis=0)
    if np.any(r == 0):
        raise ValueError("greens_kernel is singular at coincident points")
    lag = np.asarray(t, dtype=float) - np.asarray(tp, dtype=float) - r / params.c
    scale = np.maximum(1.0, np.abs(np.asarray(t, dtype=float) - np.asarray(tp, dtype=float)))
    on_cone = np.abs(lag) <= atol * scale
    weight = np.where(on_cone, 1.0 / (4.0 * math.pi * params.c ** 2 * r), 0.0)
    return float(weight) if weight.ndim == 0 else weight


SourceFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def retarded_convolution(source: SourceFn, x, t: float, params: PhysicalParams,
                         quad: RadialQuadratureSpec, bandwidth: float,
                         azimuthal_nodes: int = 2) -> ExtrapolatedValue:
    """``A(x, t) = -c^2 int d^3x' dt' G xi`` evaluated in spherical shells around ``x``.

    ``source(points, times)`` takes points of shape ``(3, M)`` and times of
    shape ``(M,)``. ``bandwidth`` bounds the source's phase rate along a ray
    (spatial wavenumber plus temporal frequency over c) and sets the
    quadrature density. Polar angles use Gauss-Legendre in ``cos(theta)``,
    azimuth the periodic trapezoid rule.
    """
    x = np.asarray(x, dtype=float).reshape(3, 1)
    phi = 2.0 * math.pi * np.arange(azimuthal_nodes) / azimuthal_nodes
    samples, eps_used = [], []
    for eps, r_max in quad.ladder():
        total = 0.0 + 0.0j
        for r, w in _panels(r_max, bandwidth, quad.nodes, chunk=4096):
            order = int(0.55 * bandwidth * r.max()) + 24
            mu, wmu = _gauss_legendre(order)
            sin_t = np.sqrt(1.0 - mu * mu)
            dirs = np.stack([
                np.outer(sin_t, np.cos(phi)).ravel(),
                np.outer(sin_t, np.sin(phi)).ravel(),
                np.repeat(mu, azimuthal_nodes),
            ])
            wang = np.repeat(wmu, azimuthal_nodes) * (2.0 * math.pi / azimuthal_nodes)
            pts = x[:, :, None] + dirs[:, :, None] * r[None, None, :]
            pts = pts.reshape(3, -1)
            rr = np.broadcast_to(r[None, :], (dirs.shape[1], r.size)).ravel()
            t_ret = t - rr / params.c
            # the kernel is isotropic: one ray gives the weight of every shell
            ray = x + np.array([[0.0], [0.0], [1.0]]) * r[None, :]
            weight = greens_kernel(x, t, ray, t - r / params.c, params)
            vals = np.asarray(source(pts, t_ret)).reshape(dirs.shape[1], r.size)
            total += np.einsum("a,ar,r->", wang, vals, w * r * r * weight * np.exp(-eps * r))
        samples.append(-params.c ** 2 * total)
        eps_used.append(eps)
    return richardson_to_zero(eps_used, samples, quad.convergence_rtol)


# ----------------------------------------------------------------------------
# spectral solution of box A = -xi


def wave_symbol(mode: ModeIndex, frequency: float, params: PhysicalParams) -> float:
    """Fourier symbol ``k^2 - w^2/c^2`` of the wave operator."""
    return mode.kmag ** 2 - (frequency / params.c) ** 2


def solve_wave_with_source(xi: FieldConfiguration, grid: GridSpec, params: PhysicalParams,
                           frequencies: dict[ModeIndex, float] | None = None) -> FieldConfiguration:
    """Mode-by-mode inversion of ``box A = -xi``.

    On the corrected shell the symbol is exactly ``k0^2``, so ``A = -xi / k0^2``.
    ``frequencies`` overrides the shell frequency per mode (off-shell sources);
    a vanishing symbol there is a resonance and is rejected.
    """
    if grid != xi.mode_set.grid:
        raise ValueError("grid does not match the source's mode set")
    if xi.target is not Target.XI:
        raise ValueError("source configuration must target xi")
    k0 = cutoff_wavenumber(params)
    on_shell = -1.0 / (k0 * k0)
    out = {}
    for mode, b in xi.coefficients.items():
        if frequencies is None or mode not in frequencies:
            if not omega(mode.kmag, params).is_propagating:
                raise CutoffError(f"source mode {mode.n} lies below the cutoff")
            out[mode] = on_shell * b
            continue
        symbol = wave_symbol(mode, frequencies[mode], params)
        if abs(symbol) < 1e-12 * k0 * k0:
            raise ResonanceError(
                f"mode {mode.n}, s={mode.s} is resonant: |k^2 - w^2/c^2| = {abs(symbol):.3e} "
                f"with w = {frequencies[mode]!r} off the corrected shell")
        out[mode] = -b / symbol
    return FieldConfiguration(xi.mode_set, out, xi.time, Target.A)


def apply_wave_operator(cfg: FieldConfiguration, grid: GridSpec, params: PhysicalParams) -> np.ndarray:
    """``(1/c^2) d_t^2 A - laplacian A`` on the grid.

    The time derivative uses each mode's own frequency; the Laplacian is taken
    by FFT of the synthesized position-space field.
    """
    spec, spec_t = _spectra(cfg, grid, params)
    pos = _to_position(spec, grid)
    # d_t^2 of a mode is -w^2; recover it from d_t = -i w
    spec_tt = np.zeros_like(spec)
    nz = spec != 0
    spec_tt[nz] = spec_t[nz] ** 2 / spec[nz]
    pos_tt = _to_position(spec_tt, grid)
    field = pos + np.conj(pos)
    field_tt = pos_tt + np.conj(pos_tt)
    return (field_tt / params.c ** 2 - laplacian(field, grid)).real
