"""Holonomic gate extraction, path length and gate composition."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from src.config import DEFAULT_SAMPLES, DEGENERATE_TOL, RESIDUAL_TOL
from src.errors import NotCyclic
from src.holonomy.conditions import cyclic_residual, geometric_residual
from src.holonomy.matching import rotation_argument
from src.lambda_system.bright_dark import BrightFrame, bright_dark
from src.operators.matrix_algebra import dagger, projector, wrap_angle
from src.propagation.evolve_path import PathPlan, evolve_path, path_propagator

logger = logging.getLogger(__name__)


def gate_to_pairs(gate: np.ndarray) -> List[List[float]]:
    """Row-major [re, im] pairs, the JSON form of every exported gate."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(gate).ravel()]


@dataclass(frozen=True, eq=False)
class HolonomyReport:
    """Gate on the ordered basis (|b_1>, |d_1>), normalized so <d_1|U|d_1> = 1."""

    gate2x2: np.ndarray
    beta: float
    cyclic_residual: float
    geometric_residual: float
    total_angle: float
    frame: BrightFrame
    bright_phase: float = 0.0
    dark_phase: float = 0.0
    closed_form_beta: Optional[float] = None
    cyclic: bool = True
    extras: Dict[str, Any] = field(default_factory=dict)

    def computational_gate(self) -> np.ndarray:
        """The same gate written on (|0>, |1>)."""
        bright, dark = bright_dark(self.frame)
        change = np.column_stack([bright[:2], dark[:2]])
        return change @ self.gate2x2 @ dagger(change)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "beta": self.beta,
            "total_angle": self.total_angle,
            "cyclic_residual": self.cyclic_residual,
            "geometric_residual": self.geometric_residual,
            "gate": gate_to_pairs(self.gate2x2),
            "dark_phase": self.dark_phase,
            "cyclic": self.cyclic,
        }
        if self.closed_form_beta is not None:
            data["closed_form_beta"] = self.closed_form_beta
        data.update(self.extras)
        return data


def total_rotation_angle(plan: PathPlan) -> float:
    return float(sum(seg.rotation_angle for seg in plan.segments))


def closed_form_beta(plan: PathPlan) -> Optional[float]:
    """Geometric phase from segment parameters for one- and two-segment paths.

    Valid only for matched (cyclic) plans; ``None`` for longer plans.
    """
    segments = plan.segments
    if len(segments) > 2:
        return None
    if len(segments) == 2:
        first, second = segments
        s1 = math.sin(first.rotation_angle) * first.sin_eta
        if abs(abs(s1) - 1.0) <= DEGENERATE_TOL:
            s2 = math.sin(second.rotation_angle) * second.sin_eta
            a = math.pi if s1 * s2 >= 0 else 0.0
            return wrap_angle(first.laser_phase - second.laser_phase + a)
    beta = 0.0
    for seg in segments:
        eta = math.atan2(seg.sin_eta, seg.cos_eta)
        beta += rotation_argument(seg.rotation_angle, eta) - seg.rotation_angle * seg.cos_eta
    return wrap_angle(beta)


def extract_gate(
    plan: PathPlan,
    samples_per_segment: int = DEFAULT_SAMPLES,
    tolerance: float = RESIDUAL_TOL,
    strict: bool = True,
) -> HolonomyReport:
    """Simulate ``plan`` and read off its holonomic gate.

    Raises NotCyclic (carrying the report) when the subspace does not return
    and ``strict`` is set; otherwise the report comes back with ``cyclic`` false.
    """
    trajectory = evolve_path(plan, samples_per_segment)
    bright, dark = bright_dark(plan.initial_frame)
    start = np.column_stack([bright, dark])
    raw = dagger(start) @ trajectory.basis[-1]

    dark_phase = float(np.angle(raw[1, 1]))
    gate = raw * np.exp(-1j * dark_phase)
    beta = wrap_angle(float(np.angle(gate[0, 0])))

    cyc = cyclic_residual(trajectory, projector([bright, dark]))
    geo = geometric_residual(trajectory)
    expected = closed_form_beta(plan)
    report = HolonomyReport(
        gate2x2=gate,
        beta=beta,
        cyclic_residual=cyc,
        geometric_residual=geo,
        total_angle=total_rotation_angle(plan),
        frame=plan.initial_frame,
        bright_phase=float(np.angle(raw[0, 0])),
        dark_phase=wrap_angle(dark_phase),
        closed_form_beta=expected,
        cyclic=cyc <= tolerance,
    )

    if not report.cyclic:
        message = f"Path is not cyclic: residual {cyc:.3e} > {tolerance:.1e}"
        if strict:
            raise NotCyclic(message, report=report)
        logger.warning(message)
        return report

    if expected is not None:
        mismatch = abs(math.remainder(expected - beta, 2 * math.pi))
        if mismatch > max(tolerance, 1e-8):
            logger.warning("Simulated beta %.10f differs from closed form %.10f", beta, expected)
    logger.info(
        "Extracted gate: beta=%.8f rad, total angle=%.8f rad, residuals %.2e / %.2e",
        beta,
        report.total_angle,
        cyc,
        geo,
    )
    return report


def compose_gates(first: HolonomyReport, second: HolonomyReport) -> np.ndarray:
    """Computational-basis product second * first."""
    return second.computational_gate() @ first.computational_gate()


def amplitude_error_sensitivity(plan: PathPlan, epsilon: float) -> float:
    """Gate infidelity after scaling every Rabi amplitude by (1 + epsilon).

    Uses 1 - |tr(U^dagger U_err)| / 2 on the computational block, so leakage
    left in |e> counts as error.
    """
    ideal = path_propagator(plan)[:2, :2]
    perturbed = PathPlan(
        segments=tuple(seg.with_changes(omega=seg.omega * (1.0 + epsilon)) for seg in plan.segments),
        initial_frame=plan.initial_frame,
    )
    actual = path_propagator(perturbed)[:2, :2]
    overlap = abs(np.trace(dagger(ideal) @ actual)) / 2.0
    return float(max(0.0, 1.0 - overlap))
