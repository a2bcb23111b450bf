import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qedmaxwell import modes as md
from qedmaxwell.units import CutoffError, PhysicalParams

NAT = PhysicalParams.natural()


@pytest.fixture(scope="module")
def small():
    grid = md.GridSpec(16 * math.pi, 64, 1)
    return grid, md.build_mode_set(grid, 2.0, NAT)


def test_polarization_anchor_axes():
    e1, e2 = md.polarization_basis([0, 0, 1.0])
    assert np.allclose(e1, [1, 0, 0]) and np.allclose(e2, [0, 1, 0])
    e1, e2 = md.polarization_basis([2.0, 0, 0])
    assert np.allclose(e1, [0, 1, 0]) and np.allclose(e2, [0, 0, 1])
    with pytest.raises(ValueError):
        md.polarization_basis([0, 0, 0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=-10, max_value=10), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 1e-3))
def test_polarization_basis_is_right_handed_and_transverse(k):
    k = np.array(k)
    e1, e2 = md.polarization_basis(k)
    khat = k / np.linalg.norm(k)
    assert abs(e1 @ khat) < 1e-12 and abs(e2 @ khat) < 1e-12 and abs(e1 @ e2) < 1e-12
    assert np.allclose(np.cross(e1, e2), khat, atol=1e-12)


def test_mode_set_excludes_cutoff_edge():
    grid = md.GridSpec(16 * math.pi, 64, 1)  # dk = 1/8, so n = 8 sits at k0
    mode_set = md.build_mode_set(grid, 2.0, NAT)
    ks = sorted({m.kmag for m in mode_set})
    assert ks[0] == pytest.approx(1.125)
    assert all(abs(m.n[0]) != 8 for m in mode_set)
    assert len(mode_set) == 2 * 2 * 8


def test_mode_set_errors():
    grid = md.GridSpec(2 * math.pi, 8, 1)
    with pytest.raises(ValueError, match="must exceed"):
        md.build_mode_set(grid, 0.5, NAT)
    with pytest.raises(ValueError, match="no lattice mode"):
        md.build_mode_set(grid, 1.5, NAT)


def test_sub_cutoff_mode_has_no_amplitude():
    mode = md.make_mode((1,), 1, md.GridSpec(4 * math.pi, 8, 1))
    with pytest.raises(CutoffError):
        md.mode_amplitude(mode, NAT)


def test_normalization_constant_value(small):
    grid, mode_set = small
    m = mode_set.modes[0]
    w = math.sqrt(m.kmag ** 2 - 1)
    n_k = (2 * math.pi) ** 1.5 / math.pi * math.sqrt(w) / m.kmag
    assert mode_set.normalization_constant[0] == pytest.approx(2 * w * grid.volume / n_k, rel=1e-14)


def test_kg_inner_product_conjugate_symmetry(small):
    grid, mode_set = small
    rng = np.random.default_rng(1)
    f = md.synthesize_field(md.random_configuration(mode_set, rng), grid, NAT, include_conjugate=False)
    g = md.synthesize_field(md.random_configuration(mode_set, rng), grid, NAT, include_conjugate=False)
    assert md.kg_inner_product(f, g) == pytest.approx(np.conj(md.kg_inner_product(g, f)), rel=1e-12)
    with pytest.raises(ValueError):
        md.kg_inner_product(f, md.mode_field(mode_set.modes[0], md.GridSpec(8 * math.pi, 32, 1), NAT))


def test_conjugate_modes_have_negative_norm(small):
    grid, mode_set = small
    f = md.mode_field(mode_set.modes[3], grid, NAT, conjugate=True)
    assert md.kg_inner_product(f, f).real == pytest.approx(-mode_set.normalization_constant[3], rel=1e-12)


def test_unknown_mode_and_unresolved_mode(small):
    grid, mode_set = small
    stray = md.make_mode((40,), 1, grid)
    cfg = md.FieldConfiguration(mode_set, {stray: 1.0})
    with pytest.raises(KeyError):
        md.synthesize_field(cfg, grid, NAT)
    coarse = md.GridSpec(16 * math.pi, 16, 1)
    coarse_set = md.build_mode_set(coarse, 2.0, NAT)
    with pytest.raises(ValueError, match="not resolved"):
        md.synthesize_field(md.FieldConfiguration(coarse_set, {coarse_set.modes[0]: 1.0}), coarse, NAT)


def test_mixing_mode_sets_rejected(small):
    grid, mode_set = small
    other = md.build_mode_set(grid, 1.5, NAT)
    a = md.FieldConfiguration(mode_set, {})
    with pytest.raises(ValueError):
        a.combine(md.FieldConfiguration(other, {}))


def test_field_is_real_and_linear(small):
    grid, mode_set = small
    rng = np.random.default_rng(3)
    a = md.random_configuration(mode_set, rng, time=1.7)
    b = md.random_configuration(mode_set, rng, time=1.7)
    fa, fb = md.synthesize_field(a, grid, NAT), md.synthesize_field(b, grid, NAT)
    fab = md.synthesize_field(a.combine(b, 2.0, -0.5), grid, NAT)
    assert np.isrealobj(fa.values)
    assert np.allclose(fab.values, 2 * fa.values - 0.5 * fb.values, atol=1e-12 * np.abs(fa.values).max())


def test_electric_to_magnetic_ratio_single_mode(small):
    grid, mode_set = small
    mode = next(m for m in mode_set if m.n == (12,) and m.s == 2)
    e, b = md.electric_magnetic(md.FieldConfiguration(mode_set, {mode: 1.0}), grid, NAT)
    w = math.sqrt(mode.kmag ** 2 - 1)
    assert np.abs(b).max() / np.abs(e).max() == pytest.approx(mode.kmag / w, rel=1e-10)
    # E along eps, B along k x eps
    assert np.abs(e[0]).max() == 0 and np.abs(b[0]).max() < 1e-12 * np.abs(b).max()


def test_transversality_in_3d():
    grid = md.GridSpec(8 * math.pi, 16, 3)
    mode_set = md.build_mode_set(grid, 1.3, NAT)
    cfg = md.random_configuration(mode_set, np.random.default_rng(5), time=0.4)
    e, b = md.electric_magnetic(cfg, grid, NAT)
    assert np.abs(md.divergence(e, grid)).max() <= 1e-12 * np.abs(e).max()
    assert np.abs(md.divergence(b, grid)).max() <= 1e-12 * np.abs(b).max()
    back = md.project_configuration(md.synthesize_field(cfg, grid, NAT), mode_set, NAT)
    assert max(abs(back.coefficients[m] - cfg.coefficients[m]) for m in mode_set) < 1e-10


def test_laplacian_of_plane_wave():
    grid = md.GridSpec(2 * math.pi, 16, 1)
    x = grid.axis()
    f = np.stack([np.cos(3 * x), np.zeros_like(x), np.zeros_like(x)])
    assert np.allclose(md.laplacian(f, grid)[0], -9 * np.cos(3 * x), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.floats(min_value=0.0, max_value=50.0))
def test_round_trip_property(seed, t):
    grid = md.GridSpec(16 * math.pi, 64, 1)
    mode_set = md.build_mode_set(grid, 2.0, NAT)
    cfg = md.random_configuration(mode_set, np.random.default_rng(seed), time=t)
    back = md.project_configuration(md.synthesize_field(cfg, grid, NAT), mode_set, NAT)
    assert max(abs(back.coefficients[m] - cfg.coefficients[m]) for m in mode_set) < 1e-10


def test_wavepacket_basis_is_orthonormal(small):
    grid, mode_set = small
    basis = md.build_wavepacket_basis(mode_set)
    assert basis.seed_condition < 1e3
    fields = [basis.packet_field(j, NAT) for j in range(len(basis))]
    gram = np.array([[md.kg_inner_product(a, b) for b in fields] for a in fields])
    assert np.abs(gram - np.eye(len(fields))).max() < 1e-10
    coeffs = np.arange(len(mode_set), dtype=complex)
    packets = basis.packet_coefficients(coeffs)
    assert np.linalg.norm(packets) == pytest.approx(np.linalg.norm(coeffs), rel=1e-12)


def test_identity_window_gives_plain_modes(small):
    grid, mode_set = small
    basis = md.build_wavepacket_basis(mode_set, md.PacketWindow(width=0.0))
    assert np.allclose(np.abs(basis.transform), np.eye(len(mode_set)))


def test_packet_window_validation():
    with pytest.raises(ValueError):
        md.PacketWindow(width=-1.0)


def test_ill_conditioned_seeds_rejected(small):
    _, mode_set = small
    with pytest.raises(md.PacketBasisError):
        md.build_wavepacket_basis(mode_set, md.PacketWindow(max_condition=1.0))
