import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qedmaxwell.units import (
    CODATA_ALPHA,
    CODATA_ELECTRON_WAVENUMBER,
    CutoffError,
    PhysicalParams,
    UnitSystem,
    cutoff_wavenumber,
    dispersion,
    from_natural,
    group_velocity,
    minimal_length,
    omega,
    phase_velocity,
    standard_omega,
    to_natural,
)

SI = PhysicalParams.si()
NAT = PhysicalParams.natural()


def test_si_cutoff_matches_high_precision():
    mpmath.mp.dps = 40
    ref = mpmath.sqrt(15 * mpmath.pi / mpmath.mpf(CODATA_ALPHA)) * mpmath.mpf(CODATA_ELECTRON_WAVENUMBER)
    assert cutoff_wavenumber(SI) == pytest.approx(float(ref), rel=1e-15)
    assert cutoff_wavenumber(SI) == pytest.approx(2.081e14, rel=1e-3)
    assert minimal_length(SI) == pytest.approx(4.805e-15, rel=1e-3)


def test_natural_units_fix_cutoff_to_one():
    assert cutoff_wavenumber(NAT) == 1.0
    assert NAT.c == NAT.hbar == 1.0
    assert NAT.electron_wavenumber == pytest.approx(math.sqrt(CODATA_ALPHA / (15 * math.pi)))
    # the general formula agrees with the hard-wired natural value
    general = math.sqrt(15 * math.pi / NAT.alpha) * NAT.electron_wavenumber
    assert general == pytest.approx(1.0, rel=1e-15)


def test_anchor_points():
    assert omega(math.sqrt(2), NAT).omega == pytest.approx(1.0, rel=1e-15)
    w = omega(1.0, NAT)
    assert w.omega == 0 and w.is_propagating
    below = omega(0.6, NAT)
    assert not below.is_propagating
    assert below.omega.real == 0 and below.omega.imag == pytest.approx(0.8)


def test_cutoff_edge_is_exact_in_si():
    k0 = cutoff_wavenumber(SI)
    assert omega(k0, SI).omega == 0


def test_group_velocity_values():
    assert group_velocity(2.0, NAT) == pytest.approx(2 / math.sqrt(3), rel=1e-15)
    assert group_velocity(4.0, NAT) == pytest.approx(4 / math.sqrt(15), rel=1e-15)
    mpmath.mp.dps = 30
    ref = 100 / mpmath.sqrt(100 ** 2 - 1)
    assert group_velocity(100.0, NAT) == pytest.approx(float(ref), rel=1e-15)
    with pytest.raises(CutoffError):
        group_velocity(1.0, NAT)
    with pytest.raises(CutoffError):
        group_velocity(0.5, NAT)


def test_phase_and_group_velocity_product_is_c_squared():
    for k in (1.01, 2.0, 37.0):
        assert phase_velocity(k, NAT) * group_velocity(k, NAT) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(CutoffError):
        phase_velocity(0.9, NAT)


def test_standard_limit_far_above_cutoff():
    k = 1e6
    assert omega(k, NAT).omega.real / standard_omega(k, NAT) == pytest.approx(1.0, abs=1e-12)


def test_vectorised_dispersion_matches_scalar():
    k = np.array([0.0, 0.5, 1.0, 1.5, 10.0])
    w = dispersion(k, NAT)
    assert np.allclose(w, [omega(v, NAT).omega for v in k], rtol=0, atol=1e-15)
    with pytest.raises(ValueError):
        dispersion(np.array([-1.0]), NAT)


def test_negative_wavenumber_rejected():
    with pytest.raises(ValueError):
        omega(-1.0, NAT)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        PhysicalParams(0.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        PhysicalParams(1.0, math.nan, 1.0, 1.0)


def test_natural_round_trip():
    nat, scales = to_natural(SI)
    assert nat.unit_system is UnitSystem.NATURAL
    assert nat.c == pytest.approx(1.0, rel=1e-15)
    back = from_natural(nat, scales)
    assert back.c == pytest.approx(SI.c, rel=1e-15)
    assert back.electron_wavenumber == pytest.approx(SI.electron_wavenumber, rel=1e-15)
    with pytest.raises(ValueError):
        from_natural(SI, scales)


def test_alpha_override_moves_cutoff():
    heavy = PhysicalParams.si(alpha=4 * CODATA_ALPHA)
    assert cutoff_wavenumber(heavy) == pytest.approx(cutoff_wavenumber(SI) / 2, rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1.0, max_value=1e4))
def test_dispersion_identity_property(ratio):
    for params in (NAT, SI):
        k0 = cutoff_wavenumber(params)
        k = ratio * k0
        w = omega(k, params).omega.real
        assert abs(w * w + (params.c * k0) ** 2 - (params.c * k) ** 2) <= 1e-12 * (params.c * k) ** 2


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1.0001, max_value=1e3))
def test_group_velocity_is_superluminal_and_matches_derivative(k):
    vg = group_velocity(k, NAT)
    assert vg > 1.0
    h = 1e-5 * (k - 1.0)
    numeric = (omega(k + h, NAT).omega.real - omega(k - h, NAT).omega.real) / (2 * h)
    assert numeric == pytest.approx(vg, rel=1e-6)
