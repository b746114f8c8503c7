"""Dense complex matrix helpers for the 3-level and 6-level models.

Operators are plain ``numpy`` arrays of dtype ``complex128``. Basis index
0 is |0>, 1 is |1>, 2 is |e>; the two-qubit space uses index 3*spin + level.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from src.config import HERMITIAN_TOL, UNITARY_TOL
from src.errors import InvalidArgument, InvalidOperator, InvalidState

LEVEL_0 = 0
LEVEL_1 = 1
LEVEL_E = 2


def as_operator(matrix: Sequence | np.ndarray) -> np.ndarray:
    """Return ``matrix`` as a square complex array, dim >= 2."""
    op = np.asarray(matrix, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or op.shape[0] < 2:
        raise InvalidOperator(f"Expected a square matrix of dim >= 2, got shape {op.shape}")
    return op


def basis_ket(dim: int, index: int) -> np.ndarray:
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def dagger(op: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(op, -1, -2))


def outer(ket: np.ndarray, bra: np.ndarray) -> np.ndarray:
    """|ket><bra| for two kets."""
    return np.outer(ket, np.conj(bra))


def projector(kets: Iterable[np.ndarray]) -> np.ndarray:
    """Sum of |k><k| over the supplied kets."""
    kets = list(kets)
    dim = kets[0].shape[0]
    proj = np.zeros((dim, dim), dtype=complex)
    for ket in kets:
        proj += outer(ket, ket)
    return proj


def is_hermitian(op: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    scale = max(np.linalg.norm(op), 1.0)
    return bool(np.linalg.norm(op - dagger(op)) <= tol * scale)


def is_unitary(op: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    identity = np.eye(op.shape[0], dtype=complex)
    return bool(np.linalg.norm(dagger(op) @ op - identity) <= tol)


def require_unitary(op: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    op = as_operator(op)
    if not is_unitary(op, tol):
        raise InvalidOperator("Operator is not unitary within tolerance")
    return op


def require_normalized(ket: Sequence | np.ndarray, dim: int, tol: float = 1e-12) -> np.ndarray:
    vec = np.asarray(ket, dtype=complex)
    if vec.shape != (dim,):
        raise InvalidState(f"Expected a ket of dimension {dim}, got shape {vec.shape}")
    if abs(np.linalg.norm(vec) - 1.0) > tol:
        raise InvalidState(f"Ket is not normalized: norm = {np.linalg.norm(vec):.3e}")
    return vec


def expm_hermitian(hamiltonian: np.ndarray, t: float) -> np.ndarray:
    """Return exp(-i H t) for Hermitian ``hamiltonian`` via its eigendecomposition.

    ``t`` may be negative for inverse propagation.
    """
    h = as_operator(hamiltonian)
    if not is_hermitian(h):
        raise InvalidOperator("expm_hermitian requires a Hermitian generator")
    if not math.isfinite(t):
        raise InvalidArgument(f"Evolution time must be finite, got {t}")
    h = 0.5 * (h + dagger(h))
    eigvals, vecs = np.linalg.eigh(h)
    phases = np.exp(-1j * eigvals * t)
    return (vecs * phases) @ dagger(vecs)


def propagators(hamiltonian: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Stack of exp(-i H t) for every t in ``times``; one eigendecomposition."""
    h = as_operator(hamiltonian)
    if not is_hermitian(h):
        raise InvalidOperator("propagators requires a Hermitian generator")
    times = np.asarray(times, dtype=float)
    if not np.all(np.isfinite(times)):
        raise InvalidArgument("Evolution times must be finite")
    eigvals, vecs = np.linalg.eigh(0.5 * (h + dagger(h)))
    phases = np.exp(-1j * np.outer(times, eigvals))
    return (vecs[None, :, :] * phases[:, None, :]) @ dagger(vecs)[None, :, :]


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise InvalidArgument(f"Dimension mismatch: {a.shape} vs {b.shape}")


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_same_dim(a, b)
    return float(np.linalg.norm(a - b))


def optimal_phase(a: np.ndarray, b: np.ndarray) -> float:
    """The chi minimizing ||a - e^{i chi} b||_F, i.e. arg tr(b^dagger a)."""
    return float(np.angle(np.trace(dagger(b) @ a)))


def global_phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min over chi of ||a - e^{i chi} b||_F for two unitaries."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_same_dim(a, b)
    require_unitary(a)
    require_unitary(b)
    chi = optimal_phase(a, b)
    return float(np.linalg.norm(a - np.exp(1j * chi) * b))


def wrap_angle(angle: float) -> float:
    """Reduce ``angle`` to [0, 2*pi)."""
    wrapped = float(np.mod(angle, 2 * math.pi))
    if wrapped >= 2 * math.pi:
        wrapped -= 2 * math.pi
    return wrapped


def angle_difference(a: float, b: float) -> float:
    """Signed a - b reduced to (-pi, pi]."""
    diff = wrap_angle(a - b)
    return diff - 2 * math.pi if diff > math.pi else diff
