import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from qedmaxwell.expm import THETA_13, expm, one_norm, scaling_exponent


def test_zero_and_identity():
    assert np.allclose(expm(np.zeros((3, 3))), np.eye(3), rtol=0, atol=1e-15)
    assert np.allclose(expm(np.eye(2)), np.e * np.eye(2), rtol=1e-15, atol=0)


def test_diagonal_matrix():
    d = np.array([-3.0, 0.5, 2.0, 10.0])
    assert np.allclose(expm(np.diag(d)), np.diag(np.exp(d)), rtol=1e-14, atol=0)


def test_rotation_generator():
    t = 1.3
    a = np.array([[0.0, -t], [t, 0.0]])
    expected = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    assert np.allclose(expm(a), expected, atol=1e-15)


def test_nilpotent_is_exact_series():
    a = np.diag([1.0, 2.0, 3.0], k=1)
    expected = np.eye(4) + a + a @ a / 2 + a @ a @ a / 6
    assert np.allclose(expm(a), expected, atol=1e-14)


def test_scaling_exponent_threshold():
    a = np.eye(2) * (THETA_13 / 2)
    assert scaling_exponent(a) == 0
    assert scaling_exponent(np.eye(2) * (4 * THETA_13)) == 2
    assert one_norm(np.array([[1.0, -2.0], [3.0, 4.0]])) == 6.0


@pytest.mark.parametrize("seed", range(5))
def test_matches_scipy_on_random_complex(seed):
    rng = np.random.default_rng(seed)
    a = (rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))) * (seed + 1)
    ref = scipy.linalg.expm(a)
    assert np.linalg.norm(expm(a) - ref) <= 1e-12 * np.linalg.norm(ref)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5))
def test_anti_hermitian_gives_unitary(x, y):
    h = np.array([[x, y + 1j], [y - 1j, -x]])
    u = expm(-1j * h)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-13)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        expm(np.zeros((2, 3)))
