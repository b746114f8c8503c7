"""Segment propagators, frame-compensated handoffs and sampled path evolution."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.config import DEFAULT_SAMPLES
from src.errors import InvalidArgument, InvalidPlan
from src.lambda_system.bright_dark import (
    BrightFrame,
    SegmentSpec,
    bright_dark,
    frame_change,
    frame_dict,
    hamiltonian,
)
from src.operators.matrix_algebra import (
    LEVEL_E,
    dagger,
    outer,
    projector,
    propagators,
    wrap_angle,
)

logger = logging.getLogger(__name__)

Basis = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class PathPlan:
    """Ordered pulse segments acting on the subspace spanned by the initial frame."""

    segments: Tuple[SegmentSpec, ...]
    initial_frame: BrightFrame

    def __post_init__(self) -> None:
        segments = tuple(self.segments)
        if not segments:
            raise InvalidPlan("A path plan needs at least one segment")
        object.__setattr__(self, "segments", segments)

    @property
    def total_duration(self) -> float:
        return float(sum(seg.tau for seg in self.segments))

    @property
    def start_times(self) -> np.ndarray:
        taus = np.array([seg.tau for seg in self.segments])
        return np.concatenate([[0.0], np.cumsum(taus)[:-1]])

    @property
    def boundary_times(self) -> np.ndarray:
        """Elapsed time at the end of every segment but the last."""
        return np.cumsum([seg.tau for seg in self.segments])[:-1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "initial_frame": frame_dict(self.initial_frame),
            "segments": [seg.to_dict() for seg in self.segments],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PathPlan":
        if not isinstance(data, dict) or "segments" not in data:
            raise InvalidPlan("Plan document must be an object with a 'segments' list")
        raw_segments = data["segments"]
        if not isinstance(raw_segments, list) or not raw_segments:
            raise InvalidPlan("Plan 'segments' must be a nonempty list")
        try:
            segments = tuple(SegmentSpec.from_dict(item) for item in raw_segments)
        except (TypeError, ValueError) as exc:
            raise InvalidPlan(f"Invalid segment: {exc}") from exc
        frame_data = data.get("initial_frame")
        if frame_data is None:
            frame = segments[0].frame
        else:
            try:
                frame = BrightFrame(float(frame_data["theta"]), float(frame_data.get("phi", 0.0)))
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidPlan(f"Invalid initial_frame: {exc}") from exc
        return cls(segments=segments, initial_frame=frame)


@dataclass(frozen=True)
class Trajectory:
    """Sampled evolution of the computational basis pair.

    ``basis[i]`` is a 3x2 array whose columns are the two evolved basis states at
    ``times[i]``. ``compensation_phases[k]`` is the phase multiplying |0>, |1> at
    the k-th boundary.
    """

    times: np.ndarray
    segment_index: np.ndarray
    basis: np.ndarray
    hamiltonians: Tuple[np.ndarray, ...]
    compensation_phases: Tuple[float, ...]

    @property
    def final_basis(self) -> Basis:
        return self.basis[-1][:, 0], self.basis[-1][:, 1]

    @property
    def total_compensation_phase(self) -> float:
        return wrap_angle(sum(self.compensation_phases))

    def projector(self, index: int) -> np.ndarray:
        return projector([self.basis[index][:, 0], self.basis[index][:, 1]])

    def orthonormality_error(self) -> float:
        """Largest deviation of any sampled Gram matrix from the identity."""
        gram = dagger(self.basis) @ self.basis
        return float(np.max(np.abs(gram - np.eye(2)[None, :, :])))

    def to_frame(self) -> pd.DataFrame:
        """One row per sample: time, segment, then Re/Im of every amplitude."""
        data: Dict[str, np.ndarray] = {
            "time": self.times,
            "segment": self.segment_index,
        }
        labels = ("0", "1", "e")
        for state in range(2):
            for level, label in enumerate(labels):
                amplitude = self.basis[:, level, state]
                data[f"re_psi{state + 1}_{label}"] = amplitude.real
                data[f"im_psi{state + 1}_{label}"] = amplitude.imag
        return pd.DataFrame(data)


def segment_propagator(seg: SegmentSpec) -> np.ndarray:
    """Full-traversal propagator exp(-i H tau) from the closed-form rotation.

    The bright state rotates inside span{|b>, |e>} by the effective angle; the
    dark state is left untouched.
    """
    bright, dark = bright_dark(seg.frame)
    excited = np.zeros(3, dtype=complex)
    excited[LEVEL_E] = 1.0

    angle = seg.rotation_angle
    cos_eta, sin_eta = seg.cos_eta, seg.sin_eta
    prefactor = np.exp(-1j * angle * cos_eta)
    c, s = math.cos(angle), math.sin(angle)
    laser = np.exp(1j * seg.laser_phase)

    u_bb = prefactor * (c + 1j * s * cos_eta)
    u_ee = prefactor * (c - 1j * s * cos_eta)
    u_eb = prefactor * (-1j * s * sin_eta * laser)
    u_be = prefactor * (-1j * s * sin_eta * np.conj(laser))

    return (
        outer(dark, dark)
        + u_bb * outer(bright, bright)
        + u_ee * outer(excited, excited)
        + u_eb * outer(excited, bright)
        + u_be * outer(bright, excited)
    )


def compensated_handoff(
    state_basis: Basis,
    delta_prev: float,
    delta_next: float,
    tau: float,
) -> Basis:
    """Carry a basis pair into the next segment's rotating frame.

    ``tau`` is the elapsed time at the boundary (the first segment's duration
    for a segment pair).
    """
    change = frame_change(delta_prev, delta_next, tau)
    return change @ state_basis[0], change @ state_basis[1]


def path_propagator(plan: PathPlan) -> np.ndarray:
    """Product of all segment propagators and boundary frame changes."""
    total = np.eye(3, dtype=complex)
    boundaries = plan.boundary_times
    for index, seg in enumerate(plan.segments):
        total = segment_propagator(seg) @ total
        if index < len(plan.segments) - 1:
            nxt = plan.segments[index + 1]
            total = frame_change(seg.delta, nxt.delta, boundaries[index]) @ total
    return total


def evolve_schedule(
    segments: Sequence[SegmentSpec],
    initial_basis: Basis,
    samples_per_segment: int = DEFAULT_SAMPLES,
    pulses: Optional[Sequence[Optional[np.ndarray]]] = None,
) -> Trajectory:
    """Evolve a basis pair through segments, optional instantaneous pulses after each.

    ``pulses[k]`` (if given and not None) is applied at the end of segment k,
    after the frame change into segment k+1.
    """
    if samples_per_segment < 2:
        raise InvalidArgument(f"samples_per_segment must be >= 2, got {samples_per_segment}")
    if pulses is not None and len(pulses) != len(segments):
        raise InvalidPlan("One pulse slot is required per segment")

    current = np.column_stack(initial_basis).astype(complex)
    times, indices, bases = [], [], []
    hams, phases = [], []
    start = 0.0
    for index, seg in enumerate(segments):
        h = hamiltonian(seg)
        hams.append(h)
        local = np.linspace(0.0, seg.tau, samples_per_segment)
        evolved = propagators(h, local) @ current[None, :, :]
        times.append(start + local)
        indices.append(np.full(samples_per_segment, index))
        bases.append(evolved)

        current = evolved[-1]
        start += seg.tau
        if index < len(segments) - 1:
            nxt = segments[index + 1]
            xi = (nxt.delta - seg.delta) * start
            phases.append(wrap_angle(xi))
            current = frame_change(seg.delta, nxt.delta, start) @ current
        if pulses is not None and pulses[index] is not None:
            current = pulses[index] @ current

    return Trajectory(
        times=np.concatenate(times),
        segment_index=np.concatenate(indices),
        basis=np.concatenate(bases),
        hamiltonians=tuple(hams),
        compensation_phases=tuple(phases),
    )


def evolve_path(plan: PathPlan, samples_per_segment: int = DEFAULT_SAMPLES) -> Trajectory:
    """Sample the evolution of (|b_1>, |d_1>) along every segment of ``plan``."""
    trajectory = evolve_schedule(
        plan.segments,
        bright_dark(plan.initial_frame),
        samples_per_segment,
    )
    logger.debug(
        "Evolved %d segments, %d samples, total compensation phase %.6f",
        len(plan.segments),
        trajectory.times.shape[0],
        trajectory.total_compensation_phase,
    )
    return trajectory
