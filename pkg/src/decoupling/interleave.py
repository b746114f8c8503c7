"""Dynamical decoupling of multi-segment holonomic paths.

The group {I, g1, g2, g3} of diagonal sign flips averages out the system side
of the |e>-|0> and |e>-|1> couplings. Interleaving g1, g3, g1, g3 after four
segments, with interior Hamiltonians conjugated into the toggling frame,
reproduces the unprotected evolution exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.config import DEFAULT_SAMPLES, HERMITIAN_TOL
from src.errors import InvalidArgument, InvalidOperator, InvalidPlan
from src.holonomy.conditions import geometric_residual
from src.lambda_system.bright_dark import (
    BrightFrame,
    SegmentSpec,
    bright_dark,
    frame_change,
    hamiltonian,
    segment_from_hamiltonian,
)
from src.operators.matrix_algebra import (
    LEVEL_E,
    basis_ket,
    dagger,
    expm_hermitian,
    frobenius_distance,
    outer,
)
from src.propagation.evolve_path import (
    PathPlan,
    Trajectory,
    evolve_schedule,
    path_propagator,
    segment_propagator,
)

logger = logging.getLogger(__name__)

GROUP_NAMES = ("I", "g1", "g2", "g3")
# pulse after each segment and the toggling frame each segment is conjugated by
PULSE_SEQUENCE = ("g1", "g3", "g1", "g3")
TOGGLING_FRAMES = ("I", "g1", "g2", "g3")


@dataclass(frozen=True, eq=False)
class DecouplingGroup:
    elements: Tuple[np.ndarray, ...]
    names: Tuple[str, ...] = GROUP_NAMES

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.elements[self.names.index(name)]
        except ValueError as exc:
            raise InvalidArgument(f"Unknown group element {name!r}") from exc


def build_group() -> DecouplingGroup:
    diagonals = [(1, 1, 1), (-1, 1, -1), (-1, -1, 1), (1, -1, -1)]
    return DecouplingGroup(elements=tuple(np.diag(d).astype(complex) for d in diagonals))


def pulse_realization(k: int) -> np.ndarray:
    """Resonant pi rotation on the |e>-|0> (k=1) or |e>-|1> (k=3) transition."""
    levels = {1: 0, 3: 1}
    if k not in levels:
        raise InvalidArgument(f"Only g1 and g3 have a single-pulse realization, got k={k}")
    ground = basis_ket(3, levels[k])
    excited = basis_ket(3, LEVEL_E)
    generator = outer(excited, ground) + outer(ground, excited)
    return expm_hermitian(generator, math.pi)


def dephasing_pulse() -> np.ndarray:
    """P = |p><p| - |m><m| - |e><e|; swaps |0> and |1>."""
    zero, one, excited = basis_ket(3, 0), basis_ket(3, 1), basis_ket(3, LEVEL_E)
    minus = zero - one
    generator = outer(excited, minus) + outer(minus, excited)
    return expm_hermitian(generator, math.pi / math.sqrt(2.0))


def symmetrize_dephasing(coupling: np.ndarray) -> np.ndarray:
    """(C + P^dagger C P) / 2 for a system-side dephasing coupling C."""
    pulse = dephasing_pulse()
    coupling = np.asarray(coupling, dtype=complex)
    return 0.5 * (coupling + dagger(pulse) @ coupling @ pulse)


def first_order_average(group: DecouplingGroup, coupling: np.ndarray) -> np.ndarray:
    coupling = np.asarray(coupling, dtype=complex)
    if coupling.shape != (3, 3):
        raise InvalidOperator(f"Expected a 3x3 coupling, got shape {coupling.shape}")
    return sum(dagger(g) @ coupling @ g for g in group.elements) / len(group.elements)


def conjugate_segment(seg: SegmentSpec, g: np.ndarray) -> Tuple[SegmentSpec, float]:
    """Segment whose Hamiltonian is g H g, and the rebuild error of that form."""
    target = g @ hamiltonian(seg) @ g
    conjugated = segment_from_hamiltonian(target, seg.tau)
    error = float(np.max(np.abs(hamiltonian(conjugated) - target)))
    if error > HERMITIAN_TOL * max(1.0, np.linalg.norm(target)):
        raise InvalidOperator(f"Conjugated segment lost the rotating-frame form (error {error:.2e})")
    return conjugated, error


@dataclass(frozen=True, eq=False)
class ProtectedSchedule:
    """Conjugated segments, each followed by its decoupling pulse."""

    plan: PathPlan
    segments: Tuple[SegmentSpec, ...]
    pulse_names: Tuple[Optional[str], ...]
    toggling_frames: Tuple[str, ...]
    equivalence_error: float
    geometric_residual: float
    form_error: float

    @property
    def initial_frame(self) -> BrightFrame:
        return self.plan.initial_frame

    @property
    def pulses(self) -> List[Optional[np.ndarray]]:
        group = build_group()
        return [None if name is None else group[name] for name in self.pulse_names]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "steps": [
                {"segment": seg.to_dict(), "pulse": name, "toggling_frame": frame}
                for seg, name, frame in zip(self.segments, self.pulse_names, self.toggling_frames)
            ],
            "equivalence_error": self.equivalence_error,
            "geometric_residual": self.geometric_residual,
        }


def schedule_propagator(schedule: ProtectedSchedule) -> np.ndarray:
    total = np.eye(3, dtype=complex)
    elapsed = 0.0
    segments = schedule.segments
    for index, (seg, pulse) in enumerate(zip(segments, schedule.pulses)):
        total = segment_propagator(seg) @ total
        elapsed += seg.tau
        if index < len(segments) - 1:
            total = frame_change(seg.delta, segments[index + 1].delta, elapsed) @ total
        if pulse is not None:
            total = pulse @ total
    return total


def evolve_protected(schedule: ProtectedSchedule, samples_per_segment: int = DEFAULT_SAMPLES) -> Trajectory:
    return evolve_schedule(
        schedule.segments,
        bright_dark(schedule.plan.initial_frame),
        samples_per_segment,
        pulses=schedule.pulses,
    )


def interleave(plan: PathPlan, samples_per_segment: int = DEFAULT_SAMPLES) -> ProtectedSchedule:
    """Protect a four-segment plan with the g1, g3, g1, g3 sequence."""
    if len(plan.segments) != 4:
        raise InvalidPlan(f"Decoupling needs exactly 4 segments, got {len(plan.segments)}")
    group = build_group()

    conjugated, form_errors = [], []
    for seg, frame_name in zip(plan.segments, TOGGLING_FRAMES):
        if frame_name == "I":
            conjugated.append(seg)
            form_errors.append(0.0)
            continue
        new_seg, error = conjugate_segment(seg, group[frame_name])
        conjugated.append(new_seg)
        form_errors.append(error)

    partial = ProtectedSchedule(
        plan=plan,
        segments=tuple(conjugated),
        pulse_names=PULSE_SEQUENCE,
        toggling_frames=TOGGLING_FRAMES,
        equivalence_error=math.nan,
        geometric_residual=math.nan,
        form_error=max(form_errors),
    )
    equivalence = frobenius_distance(schedule_propagator(partial), path_propagator(plan))

    residual = geometric_residual(evolve_protected(partial, samples_per_segment))
    logger.info("Interleaved decoupling: equivalence %.2e, geometric residual %.2e", equivalence, residual)
    return replace(partial, equivalence_error=equivalence, geometric_residual=residual)
