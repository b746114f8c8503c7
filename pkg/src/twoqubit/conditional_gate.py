"""Nuclear-spin-conditioned holonomic gates on the electron-nuclear space.

The 6-dimensional space is ordered 3*spin + level with spin up = 0, down = 1
and level (|0>, |1>, |a>); the auxiliary level |a> plays the role of |e>.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
import qutip as qt

from src.config import DEFAULT_SAMPLES, RESIDUAL_TOL, UNITARY_TOL
from src.decoupling.interleave import interleave, schedule_propagator
from src.errors import InvalidArgument, InvalidOperator, InvalidPlan
from src.holonomy.gate_extraction import HolonomyReport, extract_gate, gate_to_pairs
from src.lambda_system.bright_dark import SegmentSpec, hamiltonian
from src.operators.matrix_algebra import require_unitary
from src.propagation.evolve_path import PathPlan, path_propagator

logger = logging.getLogger(__name__)

SPINS = {"up": 0, "down": 1}
COMPUTATIONAL_INDICES = [0, 1, 3, 4]
ENTANGLING_THRESHOLD = 1e-6
TWO_QUBIT_KET_DIMS = [[2, 2], [1, 1]]

_S = 1.0 / math.sqrt(2.0)
PAULI_EIGENSTATES = (
    np.array([1.0, 0.0], dtype=complex),
    np.array([0.0, 1.0], dtype=complex),
    np.array([_S, _S], dtype=complex),
    np.array([_S, -_S], dtype=complex),
    np.array([_S, 1j * _S], dtype=complex),
    np.array([_S, -1j * _S], dtype=complex),
)


@dataclass(frozen=True)
class ConditionalPlan:
    plan_up: PathPlan
    plan_down: PathPlan

    def to_dict(self) -> Dict[str, Any]:
        return {"up": self.plan_up.to_dict(), "down": self.plan_down.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ConditionalPlan":
        if not isinstance(data, dict) or not {"up", "down"} <= set(data):
            raise InvalidPlan("Conditional plan needs 'up' and 'down' plans")
        return cls(PathPlan.from_dict(data["up"]), PathPlan.from_dict(data["down"]))


@dataclass(frozen=True)
class EntanglementCheck:
    entangling: bool
    measure: float
    input_pair: Tuple[int, int]


@dataclass(frozen=True, eq=False)
class ConditionalGate:
    gate6x6: np.ndarray
    gate4x4: np.ndarray
    report_up: HolonomyReport
    report_down: HolonomyReport
    protected: bool = False
    equivalence_error: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        check = is_entangling(self.gate4x4)
        data: Dict[str, Any] = {
            "gate": gate_to_pairs(self.gate4x4),
            "entangling": check.entangling,
            "entangling_measure": check.measure,
            "up": self.report_up.to_dict(),
            "down": self.report_down.to_dict(),
            "protected": self.protected,
        }
        if self.equivalence_error is not None:
            data["equivalence_error"] = self.equivalence_error
        return data


def conditional_hamiltonian(spin: str, seg: SegmentSpec) -> np.ndarray:
    """|j><j| (x) H(seg) on the 6-dimensional space."""
    if spin not in SPINS:
        raise InvalidArgument(f"spin must be 'up' or 'down', got {spin!r}")
    selector = np.zeros((2, 2), dtype=complex)
    selector[SPINS[spin], SPINS[spin]] = 1.0
    return np.kron(selector, hamiltonian(seg))


def _block(plan: PathPlan, report: HolonomyReport, protect: bool) -> Tuple[np.ndarray, float]:
    """3x3 block with the dark phase divided out, plus the protection error."""
    if protect:
        schedule = interleave(plan)
        propagator, error = schedule_propagator(schedule), schedule.equivalence_error
    else:
        propagator, error = path_propagator(plan), 0.0
    return propagator * np.exp(-1j * report.dark_phase), error


def compose_conditional_gate(
    cp: ConditionalPlan,
    protect: bool = False,
    samples_per_segment: int = DEFAULT_SAMPLES,
    tolerance: float = RESIDUAL_TOL,
) -> ConditionalGate:
    """Block-diagonal gate sum_j |j><j| (x) U_j and its computational 4x4 part.

    With ``protect`` each four-segment block runs under the decoupling sequence.
    """
    report_up = extract_gate(cp.plan_up, samples_per_segment, tolerance)
    report_down = extract_gate(cp.plan_down, samples_per_segment, tolerance)

    block_up, error_up = _block(cp.plan_up, report_up, protect)
    block_down, error_down = _block(cp.plan_down, report_down, protect)

    gate6 = np.zeros((6, 6), dtype=complex)
    gate6[:3, :3] = block_up
    gate6[3:, 3:] = block_down
    gate4 = gate6[np.ix_(COMPUTATIONAL_INDICES, COMPUTATIONAL_INDICES)]
    logger.info("Composed conditional gate (protected=%s)", protect)
    return ConditionalGate(
        gate6x6=gate6,
        gate4x4=gate4,
        report_up=report_up,
        report_down=report_down,
        protected=protect,
        equivalence_error=max(error_up, error_down) if protect else None,
    )


def concurrence(state: np.ndarray) -> float:
    """Concurrence of a pure two-qubit state given as a length-4 vector."""
    ket = qt.Qobj(np.asarray(state, dtype=complex).reshape(4, 1), dims=TWO_QUBIT_KET_DIMS)
    return float(qt.concurrence(ket))


def is_entangling(gate4x4: np.ndarray) -> EntanglementCheck:
    """Largest output concurrence over all products of Pauli eigenstates."""
    gate = require_unitary(gate4x4, UNITARY_TOL)
    if gate.shape != (4, 4):
        raise InvalidOperator(f"Expected a 4x4 gate, got shape {gate.shape}")
    best, best_pair = 0.0, (0, 0)
    for i, j in itertools.product(range(len(PAULI_EIGENSTATES)), repeat=2):
        output = gate @ np.kron(PAULI_EIGENSTATES[i], PAULI_EIGENSTATES[j])
        value = concurrence(output)
        if value > best:
            best, best_pair = value, (i, j)
    return EntanglementCheck(entangling=best > ENTANGLING_THRESHOLD, measure=best, input_pair=best_pair)
