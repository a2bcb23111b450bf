"""File formats: mode tables, flat binary grid fields with JSON sidecars, state dumps."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .fock import StateVector
from .modes import ModeSet, mode_amplitude
from .report import fmt
from .units import PhysicalParams, omega


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_mode_table(path, mode_set: ModeSet, params: PhysicalParams) -> None:
    dims = mode_set.grid.dimensions
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"n{i}" for i in range(dims)] + ["s", "k_abs", "omega_re", "omega_im", "amplitude", "C_k"])
        for mode, c_k in zip(mode_set.modes, mode_set.normalization_constant):
            w = omega(mode.kmag, params).omega
            writer.writerow([*mode.n, mode.s, fmt(mode.kmag), fmt(w.real), fmt(w.imag),
                             fmt(mode_amplitude(mode, params)), fmt(c_k)])


def write_grid_field(stem, array: np.ndarray, **metadata) -> tuple[Path, Path]:
    """Write ``<stem>.bin`` (float64, little-endian, C order) and ``<stem>.json``.

    Complex arrays are stored as a leading axis of size 2 holding the real and
    imaginary parts; the sidecar records this with ``"complex": true``.
    """
    stem = Path(stem)
    array = np.asarray(array)
    is_complex = np.iscomplexobj(array)
    data = np.stack([array.real, array.imag]) if is_complex else array
    data = np.ascontiguousarray(data, dtype="<f8")
    bin_path, meta_path = stem.with_suffix(".bin"), stem.with_suffix(".json")
    bin_path.write_bytes(data.tobytes(order="C"))
    sidecar = {
        "shape": list(data.shape),
        "dtype": "float64",
        "byte_order": "little",
        "order": "C",
        "complex": bool(is_complex),
        "metadata": metadata,
    }
    write_json(meta_path, sidecar)
    return bin_path, meta_path


def read_grid_field(stem) -> np.ndarray:
    stem = Path(stem)
    sidecar = json.loads(stem.with_suffix(".json").read_text())
    if sidecar.get("dtype") != "float64" or sidecar.get("byte_order") != "little":
        raise ValueError("unsupported grid field encoding")
    data = np.frombuffer(stem.with_suffix(".bin").read_bytes(), dtype="<f8").reshape(sidecar["shape"])
    if sidecar.get("complex"):
        return data[0] + 1j * data[1]
    return data.copy()


def write_state_csv(path, state: StateVector) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "re", "im"])
        for n, a in enumerate(state.amplitudes):
            writer.writerow([n, fmt(a.real), fmt(a.imag)])
