"""Markovian decay and dephasing of the three-level system.

Density matrices may be batched as (..., 3, 3); every operation broadcasts
over the leading axes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional, Sequence

import numpy as np

from src.errors import InvalidArgument, StepTooLarge
from src.lambda_system.bright_dark import SegmentSpec, frame_change, hamiltonian
from src.operators.matrix_algebra import LEVEL_E, basis_ket, dagger, outer

logger = logging.getLogger(__name__)

STEP_SCALE = 0.01
STEPS_PER_SEGMENT = 200


@dataclass(frozen=True)
class NoiseModel:
    """Decay |e> -> |0>, |e> -> |1> and pure dephasing of each level."""

    gamma_e0: float = 0.0
    gamma_e1: float = 0.0
    kappa_0: float = 0.0
    kappa_1: float = 0.0
    kappa_e: float = 0.0

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidArgument(f"NoiseModel.{f.name} must be finite and >= 0, got {value}")

    @property
    def total_rate(self) -> float:
        return float(sum(asdict(self).values()))

    def scaled(self, factor: float) -> "NoiseModel":
        return NoiseModel(**{name: rate * factor for name, rate in asdict(self).items()})

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NoiseModel":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidArgument(f"Unknown noise rates: {unknown}")
        return cls(**{name: float(value) for name, value in data.items()})

    def jump_operators(self) -> np.ndarray:
        """Stack of sqrt(rate) * L for every nonzero rate, shape (k, 3, 3)."""
        zero, one, excited = (basis_ket(3, i) for i in (0, 1, LEVEL_E))
        terms = [
            (self.gamma_e0, outer(zero, excited)),
            (self.gamma_e1, outer(one, excited)),
            (self.kappa_0, outer(zero, zero)),
            (self.kappa_1, outer(one, one)),
            (self.kappa_e, outer(excited, excited)),
        ]
        ops = [math.sqrt(rate) * op for rate, op in terms if rate > 0]
        if not ops:
            return np.zeros((0, 3, 3), dtype=complex)
        return np.array(ops)


def max_step(h: np.ndarray, noise: NoiseModel) -> float:
    """Largest admissible RK4 step for generator ``h`` under ``noise``."""
    scale = max(float(np.linalg.norm(h, 2)), noise.total_rate)
    return math.inf if scale == 0.0 else STEP_SCALE / scale


def default_dt(segments: Sequence[SegmentSpec], noise: NoiseModel) -> float:
    shortest = min(seg.tau for seg in segments) / STEPS_PER_SEGMENT
    bound = min(max_step(hamiltonian(seg), noise) for seg in segments)
    return min(shortest, bound)


def lindblad_rhs(rho: np.ndarray, h: np.ndarray, jumps: np.ndarray) -> np.ndarray:
    drho = -1j * (h @ rho - rho @ h)
    for op in jumps:
        op_dag = dagger(op)
        anti = op_dag @ op
        drho = drho + op @ rho @ op_dag - 0.5 * (anti @ rho + rho @ anti)
    return drho


def lindblad_step(rho: np.ndarray, h: np.ndarray, noise: NoiseModel, dt: float) -> np.ndarray:
    """One classical RK4 step of the master equation."""
    limit = max_step(h, noise)
    if dt > limit * (1.0 + 1e-12):
        raise StepTooLarge(f"dt={dt:.3e} exceeds the stable step {limit:.3e}")
    jumps = noise.jump_operators()
    k1 = lindblad_rhs(rho, h, jumps)
    k2 = lindblad_rhs(rho + 0.5 * dt * k1, h, jumps)
    k3 = lindblad_rhs(rho + 0.5 * dt * k2, h, jumps)
    k4 = lindblad_rhs(rho + dt * k3, h, jumps)
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve_density(
    rho: np.ndarray,
    segments: Sequence[SegmentSpec],
    noise: NoiseModel,
    dt: Optional[float] = None,
    pulses: Optional[Sequence[Optional[np.ndarray]]] = None,
) -> np.ndarray:
    """Integrate ``rho`` through every segment; boundary unitaries act instantly.

    Each segment is cut into equal steps no longer than ``dt`` or the
    stable step of its generator.
    """
    if dt is None:
        dt = default_dt(segments, noise)
    if not dt > 0:
        raise InvalidArgument(f"dt must be positive, got {dt}")
    rho = np.asarray(rho, dtype=complex)
    elapsed = 0.0
    for index, seg in enumerate(segments):
        h = hamiltonian(seg)
        limit = min(dt, max_step(h, noise))
        steps = max(1, math.ceil(seg.tau / limit - 1e-9))
        step = seg.tau / steps
        for _ in range(steps):
            rho = lindblad_step(rho, h, noise, step)
        elapsed += seg.tau
        if index < len(segments) - 1:
            change = frame_change(seg.delta, segments[index + 1].delta, elapsed)
            rho = change @ rho @ dagger(change)
        if pulses is not None and pulses[index] is not None:
            rho = pulses[index] @ rho @ dagger(pulses[index])
    logger.debug("Integrated %d segments at dt <= %.3e", len(segments), dt)
    return rho
