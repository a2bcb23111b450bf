import json
import subprocess
import sys

import pytest

from qedmaxwell.cli import main


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_print_defaults_is_loadable(tmp_path, capsys):
    assert main(["print-defaults"]) == 0
    text = capsys.readouterr().out
    path = tmp_path / "d.ini"
    path.write_text(text)
    assert main(["print-defaults", "--config", str(path)]) == 0
    assert capsys.readouterr().out == text


def test_dispersion_si_header_and_anchor(tmp_path):
    assert run(tmp_path, "dispersion", "--units", "si") == 0
    lines = (tmp_path / "dispersion.csv").read_text().splitlines()
    header = {l[2:].split(": ")[0]: l.split(": ", 1)[1] for l in lines if l.startswith("# ")}
    assert float(header["k0"]) == pytest.approx(2.081e14, rel=1e-3)
    rows = [l.split(",") for l in lines if not l.startswith("#")]
    cols = rows[0]
    data = [dict(zip(cols, r)) for r in rows[1:]]
    assert len(data) == 101
    assert data[0]["v_group"] == "nan"
    anchor = data[-1]
    c = float(header["c"])
    assert float(anchor["omega"]) == pytest.approx(c * float(header["k0"]), rel=1e-15)
    ratios = [float(d["omega_over_ck"]) for d in data[:-1]]
    assert all(a < b for a, b in zip(ratios, ratios[1:])) and ratios[-1] < 1


def test_dispersion_json(tmp_path):
    assert run(tmp_path, "dispersion", "--format", "json") == 0
    payload = json.loads((tmp_path / "dispersion.json").read_text())
    assert payload["rows"][0]["v_group"] is None


def test_verify_modes_passes(tmp_path, capsys):
    assert run(tmp_path, "verify", "--suite", "modes") == 0
    assert "48/48" in capsys.readouterr().out
    report = (tmp_path / "report.csv").read_text()
    assert "orthogonality_max_offdiag_over_C_k" in report and "FAIL" not in report
    assert (tmp_path / "modes.csv").exists()


def test_verify_fock_json(tmp_path):
    assert run(tmp_path, "verify", "--suite", "fock", "--format", "json") == 0
    payload = json.loads((tmp_path / "report.json").read_text())
    assert payload["passed"] and payload["header"]["units"] == "natural"


def test_verify_greens_lists_closed_form_rows(tmp_path, capsys):
    code = run(tmp_path, "verify", "--suite", "greens")
    out = capsys.readouterr().out
    assert code == 1
    failing = [l for l in out.splitlines() if l.startswith("FAIL")]
    assert failing and all("I_abs_vs_closed_form" in l for l in failing)
    assert (tmp_path / "greens.csv").read_text().count("\n") == 9


def test_zero_tolerance_forces_failure(tmp_path, capsys):
    cfg = tmp_path / "z.ini"
    cfg.write_text("[verify]\ntolerance_scale = 0\n")
    assert run(tmp_path, "verify", "--suite", "fock", "--config", str(cfg)) == 1
    assert "FAIL fock" in capsys.readouterr().out


def test_evolve_outputs(tmp_path):
    assert run(tmp_path, "evolve") == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert 0.99 <= summary["ratio"] <= 1.01
    for name in ("trajectory.csv", "spectrum_final.bin", "spectrum_final.json", "field_final.bin"):
        assert (tmp_path / name).exists()


def test_evolve_standard_model(tmp_path):
    assert run(tmp_path, "evolve", "--model", "standard") == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["v_group_analytic"] == 1.0 and 0.99 <= summary["ratio"] <= 1.01


@pytest.mark.parametrize("body, needle", [
    ("[packet]\namplitude = 0\n", "amplitude"),
    ("[packet]\nk_center = 1.2\n", "k_center - 3/width"),
    ("[packet\n", "malformed"),
])
def test_configuration_errors_exit_2(tmp_path, capsys, body, needle):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(body)
    assert run(tmp_path, "evolve", "--config", str(cfg)) == 2
    assert needle in capsys.readouterr().err


def test_fock_demo(tmp_path):
    assert run(tmp_path, "fock-demo") == 0
    moments = json.loads((tmp_path / "moments.json").read_text())
    assert moments["squeezed"]["dimensionless"]["var_x"] == pytest.approx(0.5 * 2.718281828459045 ** -1, rel=1e-6)
    assert (tmp_path / "coherent.csv").exists()


def test_module_entry_point_and_bad_flag(tmp_path):
    ok = subprocess.run([sys.executable, "-m", "qedmaxwell", "print-defaults"], capture_output=True, text=True)
    assert ok.returncode == 0 and "[units]" in ok.stdout
    bad = subprocess.run([sys.executable, "-m", "qedmaxwell", "verify", "--suite", "nope"], capture_output=True)
    assert bad.returncode == 2
