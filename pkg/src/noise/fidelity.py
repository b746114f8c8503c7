"""Noisy gate channels and their average fidelity on the qubit subspace.

Superoperators act on row-major vectorized density matrices: column i*d + j
holds the flattened image of |i><j|, so a unitary U acts as kron(U, conj(U)).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.decoupling.interleave import ProtectedSchedule
from src.lambda_system.bright_dark import SegmentSpec
from src.noise.lindblad import NoiseModel, default_dt, evolve_density
from src.operators.matrix_algebra import require_unitary
from src.propagation.evolve_path import PathPlan

logger = logging.getLogger(__name__)

# positions of |0><0|, |0><1|, |1><0|, |1><1| in a flattened 3x3 matrix
QUBIT_BLOCK = [0, 1, 3, 4]

Schedule = Union[PathPlan, ProtectedSchedule]


@dataclass(frozen=True, eq=False)
class GateChannel:
    superop: np.ndarray
    qubit_superop: np.ndarray
    dt: float

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.superop.shape[0])))

    def choi(self) -> np.ndarray:
        """Choi matrix sum_ij |i><j| (x) Phi(|i><j|)."""
        d = self.dim
        images = self.superop.T.reshape(d, d, d, d)
        return images.transpose(0, 2, 1, 3).reshape(d * d, d * d)

    def is_completely_positive(self, tol: float = 1e-6) -> bool:
        choi = self.choi()
        choi = 0.5 * (choi + choi.conj().T)
        return bool(np.min(np.linalg.eigvalsh(choi)) >= -tol)

    def trace_preservation_error(self) -> float:
        """max_ij |tr Phi(|i><j|) - delta_ij| on the full space."""
        d = self.dim
        traces = self.superop.reshape(d, d, d * d)[np.arange(d), np.arange(d), :].sum(axis=0)
        return float(np.max(np.abs(traces - np.eye(d).ravel())))

    def retained_population(self) -> float:
        """Average trace kept in the qubit block for inputs in that block."""
        populations = self.qubit_superop[np.ix_([0, 3], [0, 3])]
        return float(np.real(populations.sum()) / 2.0)


def schedule_parts(schedule: Schedule) -> Tuple[Sequence[SegmentSpec], Optional[Sequence[Optional[np.ndarray]]]]:
    if isinstance(schedule, ProtectedSchedule):
        return schedule.segments, schedule.pulses
    return schedule.segments, None


def noisy_gate_channel(schedule: Schedule, noise: NoiseModel, dt: Optional[float] = None) -> GateChannel:
    """Propagate all nine |i><j| at once and assemble the channel."""
    segments, pulses = schedule_parts(schedule)
    if dt is None:
        dt = default_dt(segments, noise)
    inputs = np.eye(9, dtype=complex).reshape(9, 3, 3)
    outputs = evolve_density(inputs, segments, noise, dt, pulses)
    superop = outputs.reshape(9, 9).T
    qubit = superop[np.ix_(QUBIT_BLOCK, QUBIT_BLOCK)]
    logger.debug("Simulated channel over %d segments, dt=%.3e", len(segments), dt)
    return GateChannel(superop=superop, qubit_superop=qubit, dt=dt)


def unitary_superop(unitary: np.ndarray) -> np.ndarray:
    return np.kron(unitary, np.conj(unitary))


def process_fidelity(channel: GateChannel, ideal: np.ndarray) -> float:
    ideal = require_unitary(ideal)
    d = ideal.shape[0]
    overlap = np.trace(unitary_superop(ideal).conj().T @ channel.qubit_superop)
    return float(np.real(overlap) / d**2)


def average_gate_fidelity(channel: GateChannel, ideal: np.ndarray) -> float:
    """(d F_pro + retained population) / (d + 1) on the qubit subspace.

    Reduces to (2 F_pro + 1) / 3 when nothing leaks out of the qubit block.
    """
    d = 2
    f_pro = process_fidelity(channel, ideal)
    return float((d * f_pro + channel.retained_population()) / (d + 1))
