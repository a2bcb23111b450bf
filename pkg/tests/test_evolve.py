import csv
import math

import numpy as np
import pytest

from qedmaxwell import evolve as ev
from qedmaxwell import modes as md
from qedmaxwell.greens import ResonanceError
from qedmaxwell.units import PhysicalParams, group_velocity

NAT = PhysicalParams.natural()


@pytest.fixture(scope="module")
def grid():
    return md.GridSpec(1000.0, 4096, 1)


def packet(grid, k_c=2.0, model=ev.Model.CORRECTED, x0=300.0):
    return ev.init_packet(ev.PacketSpec(k_c, 10.0, x0), grid, NAT, model)


def test_support_rule_names_constraint(grid):
    with pytest.raises(ev.PacketSupportError, match="k_center - 3/width"):
        ev.init_packet(ev.PacketSpec(1.2, 10.0, 0.0), grid, NAT)
    with pytest.raises(ev.PacketSupportError):
        ev.init_packet(ev.PacketSpec(2.0, 0.0, 0.0), grid, NAT)


def test_initial_field_is_real_gaussian(grid):
    state = packet(grid)
    f = ev.position_field(state)
    assert np.abs(f.imag).max() < 1e-12 * np.abs(f.real).max()
    x = grid.axis()
    envelope = np.exp(-((x - 300.0) ** 2) / 200.0)
    expected = 2 * envelope * np.cos(2.0 * (x - 300.0))
    assert np.abs(f.real - expected).max() < 1e-8


def test_sub_cutoff_modes_carry_nothing(grid):
    state = packet(grid, k_c=1.5)
    k = np.abs(ev.wavenumbers(grid))
    assert np.all(state.plus[k <= 1.0] == 0) and np.all(state.minus[k <= 1.0] == 0)


def test_negative_step_rejected(grid):
    with pytest.raises(ValueError):
        ev.step(packet(grid), -1.0, NAT)


def test_step_composition_and_energy(grid):
    state = packet(grid)
    a = ev.step(ev.step(state, 3.0, NAT), 4.5, NAT)
    b = ev.step(state, 7.5, NAT)
    assert np.allclose(a.plus, b.plus, atol=1e-14)
    assert ev.spectral_energy(b, NAT) == pytest.approx(ev.spectral_energy(state, NAT), rel=1e-14)
    assert ev.imaginary_residue(b) < 1e-12


def test_single_mode_phase(grid):
    n = 700
    state = ev.single_mode_state(n, grid, NAT)
    k = 2 * math.pi * n / grid.box_length
    w = math.sqrt(k * k - 1)
    later = ev.step(state, 123.0, NAT)
    assert later.plus[n] == pytest.approx(np.exp(-1j * w * 123.0), abs=1e-12)
    with pytest.raises(ev.PacketSupportError):
        ev.single_mode_state(10, grid, NAT)


@pytest.mark.parametrize("k_c", [2.0, 3.0])
def test_corrected_velocity(grid, k_c):
    states = ev.trajectory(packet(grid, k_c), np.linspace(0, 300, 7), NAT)
    assert ev.measure_group_velocity(states, NAT) == pytest.approx(group_velocity(k_c, NAT), rel=1e-2)


def test_standard_velocity_is_c(grid):
    states = ev.trajectory(packet(grid, model=ev.Model.STANDARD), np.linspace(0, 300, 7), NAT)
    assert ev.measure_group_velocity(states, NAT) == pytest.approx(1.0, rel=1e-10)


def test_wraparound_detected(grid):
    states = ev.trajectory(packet(grid, x0=900.0), np.linspace(0, 300, 7), NAT)
    with pytest.raises(ev.WrapAroundError):
        ev.measure_group_velocity(states, NAT)


def test_needs_five_snapshots(grid):
    with pytest.raises(ValueError):
        ev.measure_group_velocity(ev.trajectory(packet(grid), [0, 1, 2], NAT), NAT)


def test_sourced_field_follows_xi(grid):
    states = ev.trajectory(packet(grid), np.linspace(0, 300, 7), NAT)
    a = ev.evolve_sourced_A(states, grid, NAT)
    assert np.allclose(a[3].plus, -states[3].plus)
    assert ev.measure_group_velocity(a, NAT) == pytest.approx(ev.measure_group_velocity(states, NAT), rel=1e-3)
    std = ev.trajectory(packet(grid, model=ev.Model.STANDARD), [0.0], NAT)
    with pytest.raises(ResonanceError):
        ev.evolve_sourced_A(std, grid, NAT)


def test_field_configuration_bridge():
    grid = md.GridSpec(16 * math.pi, 64, 1)
    state = ev.step(ev.single_mode_state(12, grid, NAT, amplitude=0.5 + 0.25j), 2.0, NAT)
    cfg = ev.to_field_configuration(state, NAT)
    field = md.synthesize_field(cfg, grid, NAT, include_conjugate=False).values[1]
    assert np.allclose(field, ev.position_field(state) - np.fft.ifft(state.minus) * 64, atol=1e-12)


def test_trajectory_csv(tmp_path, grid):
    states = ev.trajectory(packet(grid), np.linspace(0, 100, 5), NAT)
    path = tmp_path / "t.csv"
    ev.write_trajectory_csv(path, states, NAT)
    rows = list(csv.DictReader(path.open()))
    assert [float(r["t"]) for r in rows] == [0.0, 25.0, 50.0, 75.0, 100.0]
    assert float(rows[-1]["centroid"]) > float(rows[0]["centroid"])
