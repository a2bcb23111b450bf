"""Run configuration: an INI file with one section per concern.

Lengths are in units of the minimal length ``1/k0``, wavenumbers in units of
``k0`` and times in units of ``1/(c k0)``, so one file drives both unit
systems.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field, fields
from pathlib import Path

from .units import CODATA_ALPHA, PhysicalParams, UnitSystem


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class UnitsSection:
    system: str = "natural"
    alpha: float = CODATA_ALPHA


@dataclass(frozen=True)
class ModesSection:
    box_length: float = 50.26548245743669  # 16 pi: lattice spacing k0/8
    points: int = 64
    k_max: float = 2.0
    transverse_box_length: float = 25.132741228718345  # 3D transversality grid, 8 pi
    transverse_points: int = 16
    transverse_k_max: float = 1.3


@dataclass(frozen=True)
class GreensSection:
    k_min: float = 1.1
    k_max: float = 10.0
    points: int = 8
    convolution_k: float = 1.05


@dataclass(frozen=True)
class FockSection:
    dimension: int = 64
    coherent_alpha: float = 2.0
    squeeze_r: float = 0.5
    squeeze_phi: float = 0.0


@dataclass(frozen=True)
class PacketSection:
    k_center: float = 2.0
    width: float = 10.0
    x0: float = 500.0
    amplitude: float = 1.0
    model: str = "corrected"


@dataclass(frozen=True)
class EvolveSection:
    box_length: float = 2000.0
    points: int = 8192
    t_final: float = 600.0
    snapshots: int = 13


@dataclass(frozen=True)
class VerifySection:
    tolerance_scale: float = 1.0


@dataclass(frozen=True)
class OutputSection:
    directory: str = "out"
    format: str = "csv"


@dataclass(frozen=True)
class RunSection:
    seed: int = 20240611


@dataclass(frozen=True)
class RunConfig:
    units: UnitsSection = field(default_factory=UnitsSection)
    modes: ModesSection = field(default_factory=ModesSection)
    greens: GreensSection = field(default_factory=GreensSection)
    fock: FockSection = field(default_factory=FockSection)
    packet: PacketSection = field(default_factory=PacketSection)
    evolve: EvolveSection = field(default_factory=EvolveSection)
    verify: VerifySection = field(default_factory=VerifySection)
    output: OutputSection = field(default_factory=OutputSection)
    run: RunSection = field(default_factory=RunSection)

    def params(self) -> PhysicalParams:
        if self.units.system == UnitSystem.NATURAL.value:
            return PhysicalParams.natural(self.units.alpha)
        return PhysicalParams.si(alpha=self.units.alpha)

    def with_overrides(self, **sections) -> "RunConfig":
        """``cfg.with_overrides(units={"system": "si"})``."""
        updated = {}
        for name, values in sections.items():
            if values:
                updated[name] = dataclasses.replace(getattr(self, name), **values)
        cfg = dataclasses.replace(self, **updated)
        validate(cfg)
        return cfg


def _convert(raw: str, typ: str, where: str):
    try:
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {typ}") from exc


def validate(cfg: RunConfig) -> None:
    if cfg.units.system not in ("si", "natural"):
        raise ConfigError(f"units.system must be 'si' or 'natural', got {cfg.units.system!r}")
    if not cfg.units.alpha > 0:
        raise ConfigError("units.alpha must be positive")
    if cfg.output.format not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {cfg.output.format!r}")
    if cfg.packet.model not in ("corrected", "standard"):
        raise ConfigError(f"packet.model must be 'corrected' or 'standard', got {cfg.packet.model!r}")
    if cfg.packet.amplitude == 0:
        raise ConfigError("packet.amplitude is zero: the trajectory would be empty")
    if cfg.packet.width <= 0:
        raise ConfigError("packet.width must be positive")
    for name, n in (("modes.points", cfg.modes.points), ("modes.transverse_points", cfg.modes.transverse_points),
                    ("evolve.points", cfg.evolve.points)):
        if n < 4 or n & (n - 1):
            raise ConfigError(f"{name} must be a power of two >= 4, got {n}")
    if cfg.evolve.snapshots < 5:
        raise ConfigError("evolve.snapshots must be at least 5")
    if cfg.evolve.t_final <= 0:
        raise ConfigError("evolve.t_final must be positive")
    if cfg.fock.dimension < 2:
        raise ConfigError("fock.dimension must be at least 2")
    if cfg.greens.points < 1 or not 1.0 < cfg.greens.k_min < cfg.greens.k_max:
        raise ConfigError("greens needs points >= 1 and 1 < k_min < k_max")
    if cfg.verify.tolerance_scale < 0:
        raise ConfigError("verify.tolerance_scale must be non-negative")


def loads(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    defaults = RunConfig()
    sections = {f.name: f for f in fields(RunConfig)}
    updated = {}
    for name in parser.sections():
        if name not in sections:
            raise ConfigError(f"unknown section [{name}]")
        current = getattr(defaults, name)
        known = {f.name: f for f in fields(current)}
        values = {}
        for key, raw in parser.items(name):
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            values[key] = _convert(raw, known[key].type, f"[{name}] {key}")
        updated[name] = dataclasses.replace(current, **values)
    cfg = dataclasses.replace(defaults, **updated)
    validate(cfg)
    return cfg


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text)


def dumps(cfg: RunConfig) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    for section in fields(RunConfig):
        values = getattr(cfg, section.name)
        parser[section.name] = {f.name: repr(v) if isinstance(v, float) else str(v)
                                for f in fields(values) for v in [getattr(values, f.name)]}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()
