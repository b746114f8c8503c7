import math

import numpy as np
import pytest
from scipy.linalg import expm

from src.errors import InvalidArgument, InvalidOperator, InvalidState
from src.operators.matrix_algebra import (
    angle_difference,
    as_operator,
    expm_hermitian,
    frobenius_distance,
    global_phase_distance,
    is_hermitian,
    is_unitary,
    optimal_phase,
    propagators,
    require_normalized,
    wrap_angle,
)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (a + a.conj().T)


@pytest.mark.parametrize("seed", range(5))
def test_expm_hermitian_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, 3)
    t = float(rng.uniform(-3, 3))
    assert np.allclose(expm_hermitian(h, t), expm(-1j * h * t), atol=1e-12)


def taylor_exponential(h, t, terms=60):
    step = -1j * t * h
    term = np.eye(h.shape[0], dtype=complex)
    total = term.copy()
    for k in range(1, terms):
        term = term @ step / k
        total = total + term
    return total


def test_expm_hermitian_matches_taylor_series():
    rng = np.random.default_rng(60)
    for _ in range(200):
        h = random_hermitian(rng, 3)
        h = h / np.linalg.norm(h, 2)
        t = float(rng.uniform(-3, 3))
        assert np.max(np.abs(expm_hermitian(h, t) - taylor_exponential(h, t))) <= 1e-9


def test_expm_hermitian_zero_time_is_identity():
    h = random_hermitian(np.random.default_rng(7), 3)
    assert np.allclose(expm_hermitian(h, 0.0), np.eye(3))


def test_expm_hermitian_is_unitary_and_inverts():
    h = random_hermitian(np.random.default_rng(11), 6)
    forward = expm_hermitian(h, 1.7)
    assert is_unitary(forward)
    assert np.allclose(expm_hermitian(h, -1.7) @ forward, np.eye(6), atol=1e-12)


def test_expm_hermitian_rejects_non_hermitian():
    with pytest.raises(InvalidOperator):
        expm_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


def test_expm_hermitian_rejects_infinite_time():
    with pytest.raises(InvalidArgument):
        expm_hermitian(np.eye(2), math.inf)


def test_propagators_stack_matches_single_calls():
    h = random_hermitian(np.random.default_rng(3), 3)
    times = np.linspace(0.0, 2.0, 5)
    stack = propagators(h, times)
    assert stack.shape == (5, 3, 3)
    for t, u in zip(times, stack):
        assert np.allclose(u, expm_hermitian(h, t), atol=1e-12)


@pytest.mark.parametrize("shape", [(3,), (2, 3), (1, 1)])
def test_as_operator_rejects_bad_shapes(shape):
    with pytest.raises(InvalidOperator):
        as_operator(np.zeros(shape))


def test_is_hermitian():
    assert is_hermitian(np.array([[1, 1j], [-1j, 2]]))
    assert not is_hermitian(np.array([[1, 1j], [1j, 2]]))


def test_global_phase_distance_ignores_global_phase():
    u = expm_hermitian(random_hermitian(np.random.default_rng(5), 3), 1.0)
    assert global_phase_distance(np.exp(0.7j) * u, u) < 1e-12
    assert math.isclose(optimal_phase(np.exp(0.7j) * u, u), 0.7, abs_tol=1e-12)


def test_global_phase_distance_detects_relative_phase():
    a = np.diag([1.0, 1.0]).astype(complex)
    b = np.diag([1.0, -1.0]).astype(complex)
    assert global_phase_distance(a, b) == pytest.approx(2.0)


def test_distances_reject_mismatched_dimensions():
    with pytest.raises(InvalidArgument):
        frobenius_distance(np.eye(2), np.eye(3))
    with pytest.raises(InvalidArgument):
        global_phase_distance(np.eye(2), np.eye(3))


def test_global_phase_distance_requires_unitaries():
    with pytest.raises(InvalidOperator):
        global_phase_distance(2 * np.eye(2), np.eye(2))


def test_require_normalized():
    ket = require_normalized([1, 0, 0], 3)
    assert ket.dtype == complex
    with pytest.raises(InvalidState):
        require_normalized([1, 1, 0], 3)
    with pytest.raises(InvalidState):
        require_normalized([1, 0], 3)


@pytest.mark.parametrize(
    "angle, expected",
    [(0.0, 0.0), (-math.pi / 2, 3 * math.pi / 2), (5 * math.pi, math.pi), (2 * math.pi, 0.0)],
)
def test_wrap_angle(angle, expected):
    assert wrap_angle(angle) == pytest.approx(expected, abs=1e-12)


def test_angle_difference_is_signed():
    assert angle_difference(0.1, 2 * math.pi - 0.1) == pytest.approx(0.2)
    assert angle_difference(2 * math.pi - 0.1, 0.1) == pytest.approx(-0.2)
