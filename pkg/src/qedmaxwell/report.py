"""Verification records: computed vs expected with a tolerance, serialized deterministically."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field


def fmt(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    if isinstance(x, bool) or x is None:
        return str(x)
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    computed: float
    expected: float
    error: float
    tolerance: float
    passed: bool
    note: str = ""


@dataclass
class VerificationReport:
    header: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    tolerance_scale: float = 1.0

    def add(self, suite: str, name: str, computed, expected, tolerance: float,
            relative: bool = False, note: str = "") -> Check:
        """Record ``|computed - expected|`` (optionally relative) against ``tolerance``."""
        computed_f, expected_f = complex(computed), complex(expected)
        diff = abs(computed_f - expected_f)
        if relative:
            scale = abs(expected_f)
            diff = diff / scale if scale > 0 else math.inf
        tol = tolerance * self.tolerance_scale
        passed = bool(diff <= tol)
        check = Check(suite, name, _real(computed_f), _real(expected_f), diff, tol, passed, note)
        self.checks.append(check)
        return check

    def add_bound(self, suite: str, name: str, value: float, bound: float, note: str = "") -> Check:
        """Record a one-sided ``value <= bound`` check (``value`` is already an error measure)."""
        tol = bound * self.tolerance_scale
        check = Check(suite, name, float(value), 0.0, float(value), tol, bool(value <= tol), note)
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def summary_line(self) -> str:
        n_fail = len(self.failures())
        return f"{len(self.checks) - n_fail}/{len(self.checks)} checks passed"

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.header.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["suite", "check", "computed", "expected", "error", "tolerance", "status", "note"])
        for c in self.checks:
            writer.writerow([c.suite, c.name, fmt(c.computed), fmt(c.expected), fmt(c.error),
                             fmt(c.tolerance), "PASS" if c.passed else "FAIL", c.note])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "header": self.header,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }
        return json.dumps(payload, indent=2, sort_keys=True, default=_json_default, allow_nan=True) + "\n"


def _real(z: complex) -> float:
    # complex quantities are reported by magnitude unless purely real
    return z.real if z.imag == 0 else abs(z)


def _json_default(obj):
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
