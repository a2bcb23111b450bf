"""``qedmaxwell`` command line: dispersion tables, verification, evolution, Fock demos.

Exit codes: 0 success, 1 a verification check failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import evolve as ev
from . import fock
from .config import ConfigError, RunConfig, dumps, load
from .export import write_grid_field, write_json, write_mode_table, write_state_csv
from .modes import GridSpec, make_mode
from .report import fmt
from .suites import SUITES, Scales, report_header, run_suites
from .units import cutoff_wavenumber, dispersion, group_velocity

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="INI run configuration")
    parser.add_argument("--out", metavar="DIR", help="output directory (overrides [output] directory)")
    parser.add_argument("--units", choices=("si", "natural"), help="unit system (overrides [units] system)")
    parser.add_argument("--format", choices=("csv", "json"), help="report format (overrides [output] format)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qedmaxwell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("dispersion", "tabulate w(k), v_g and w/(ck) on a log grid"),
                       ("fock-demo", "coherent and squeezed states with their moments"),
                       ("print-defaults", "print the effective configuration")):
        _common(sub.add_parser(name, help=text))
    p = sub.add_parser("verify", help="run verification suites")
    _common(p)
    p.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    p = sub.add_parser("evolve", help="evolve a Gaussian packet and measure its group velocity")
    _common(p)
    p.add_argument("--model", choices=("corrected", "standard"), help="overrides [packet] model")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load(args.config) if args.config else RunConfig()
    return cfg.with_overrides(
        units={"system": args.units} if args.units else None,
        output={k: v for k, v in (("directory", args.out), ("format", args.format)) if v},
        packet={"model": args.model} if getattr(args, "model", None) else None,
    )


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _header_lines(header: dict) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in header.items())


def cmd_dispersion(cfg: RunConfig) -> int:
    params = cfg.params()
    k0 = cutoff_wavenumber(params)
    ratios = np.append(np.geomspace(1.0, 100.0, 100), math.sqrt(2.0))
    rows, worst = [], 0.0
    for r in ratios:
        k = r * k0
        w = dispersion(np.array([k]), params)[0].real
        identity = abs(w * w + (params.c * k0) ** 2 - (params.c * k) ** 2) / (params.c * k) ** 2
        worst = max(worst, identity)
        vg = group_velocity(k, params) if k > k0 else math.nan
        rows.append({
            "k_over_k0": r, "k": k, "omega": w, "v_group": vg, "v_group_over_c": vg / params.c,
            "omega_over_ck": w / (params.c * k), "identity_residual": identity,
        })
    header = {
        "units": params.unit_system.value,
        "k0": fmt(k0),
        "c": fmt(params.c),
        "alpha": fmt(params.alpha),
        "grid": "100 log-spaced k/k0 in [1, 100], then the anchor k/k0 = sqrt(2) where omega = c k0",
        "note": "v_group exceeds c for every k > k0 and is undefined (nan) at k0",
    }
    out = _out_dir(cfg)
    if cfg.output.format == "json":
        clean = [{k: None if math.isnan(v) else v for k, v in row.items()} for row in rows]
        write_json(out / "dispersion.json", {"header": header, "rows": clean})
    else:
        buf = io.StringIO()
        buf.write(_header_lines(header))
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow([fmt(v) for v in row.values()])
        (out / "dispersion.csv").write_text(buf.getvalue())
    ok = worst <= 1e-12
    print(f"dispersion: {len(rows)} rows, max identity residual {worst:.3e} ({'PASS' if ok else 'FAIL'})")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    names = SUITES if suite == "all" else (suite,)
    params = cfg.params()
    report, tables = run_suites(cfg, names, params)
    out = _out_dir(cfg)
    if cfg.output.format == "json":
        (out / "report.json").write_text(report.to_json())
    else:
        (out / "report.csv").write_text(report.to_csv())
    if "modes" in tables:
        write_mode_table(out / "modes.csv", tables["modes"]["mode_set"], params)
    if "greens" in tables:
        rows = tables["greens"]["greens_rows"]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row.values()])
        (out / "greens.csv").write_text(buf.getvalue())
    for c in report.failures():
        print(f"FAIL {c.suite} {c.name}: error {fmt(c.error)} > tolerance {fmt(c.tolerance)}")
    print(f"verify {suite}: {report.summary_line()}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_evolve(cfg: RunConfig) -> int:
    params = cfg.params()
    sc = Scales(params)
    pc, ec = cfg.packet, cfg.evolve
    grid = GridSpec(ec.box_length * sc.length, ec.points, 1)
    spec = ev.PacketSpec(pc.k_center * sc.k, pc.width * sc.length, pc.x0 * sc.length, pc.amplitude)
    model = ev.Model(pc.model)
    initial = ev.init_packet(spec, grid, params, model)
    times = np.linspace(0.0, ec.t_final, ec.snapshots) * sc.time
    states = ev.trajectory(initial, times, params)
    measured = ev.measure_group_velocity(states, params)
    analytic = params.c if model is ev.Model.STANDARD else group_velocity(spec.k_center, params)
    ratio = measured / analytic
    out = _out_dir(cfg)
    ev.write_trajectory_csv(out / "trajectory.csv", states, params)
    final = states[-1]
    meta = {"units": params.unit_system.value, "model": model.value, "time": fmt(final.time),
            "box_length": fmt(grid.box_length), "points": grid.points_per_axis, "ordering": "fft"}
    write_grid_field(out / "spectrum_final", final.plus, **meta, branch="plus")
    write_grid_field(out / "field_final", ev.position_field(final).real, **meta)
    e0, e1 = ev.spectral_energy(initial, params), ev.spectral_energy(final, params)
    passed = abs(ratio - 1.0) <= 0.01
    summary = {
        "units": params.unit_system.value,
        "model": model.value,
        "k_center": spec.k_center,
        "k_center_over_k0": pc.k_center,
        "width": spec.width,
        "v_group_measured": measured,
        "v_group_analytic": analytic,
        "ratio": ratio,
        "ratio_within_1_percent": passed,
        "energy_relative_drift": abs(e1 - e0) / e0,
        "max_imaginary_residue": max(ev.imaginary_residue(s) for s in states),
        "snapshots": len(states),
    }
    write_json(out / "summary.json", summary)
    print(f"evolve {model.value}: v_measured/v_analytic = {ratio:.8f} ({'PASS' if passed else 'FAIL'})")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_fock_demo(cfg: RunConfig) -> int:
    params = cfg.params()
    fc = cfg.fock
    sc = Scales(params)
    probe = make_mode((1,), 1, GridSpec(2 * math.pi / (math.sqrt(2) * sc.k), 4, 1))
    coh = fock.coherent_state(fc.coherent_alpha, probe, fc.dimension)
    sq = fock.squeezed_state(fc.squeeze_r, fc.squeeze_phi, probe, fc.dimension)
    out = _out_dir(cfg)
    write_state_csv(out / "coherent.csv", coh)
    write_state_csv(out / "squeezed.csv", sq)
    payload = {"header": report_header(cfg, params), "mode_k_over_k0": math.sqrt(2.0)}
    for name, psi in (("coherent", coh), ("squeezed", sq)):
        payload[name] = {
            "dimensionless": fock.moments(psi),
            "dimensional": fock.moments(psi, params, "dimensional"),
        }
    write_json(out / "moments.json", payload)
    print(f"fock-demo: dimension {fc.dimension}, leakage coherent {coh.leakage:.2e}, squeezed {sq.leakage:.2e}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "print-defaults":
            sys.stdout.write(dumps(cfg))
            return EXIT_OK
        if args.command == "dispersion":
            return cmd_dispersion(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite)
        if args.command == "evolve":
            return cmd_evolve(cfg)
        return cmd_fock_demo(cfg)
    except (ConfigError, ev.PacketSupportError, fock.TruncationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
