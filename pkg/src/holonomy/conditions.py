"""Cyclic and geometric (parallel-transport) condition checks on simulated paths."""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from src.config import DEFAULT_SAMPLES
from src.lambda_system.bright_dark import bright_dark
from src.operators.matrix_algebra import dagger, projector
from src.propagation.evolve_path import PathPlan, Trajectory, evolve_path

logger = logging.getLogger(__name__)


def cyclic_residual(trajectory: Trajectory, initial: np.ndarray) -> float:
    """||P(T) - P(0)||_F for an already simulated trajectory."""
    final = trajectory.projector(-1)
    return float(np.linalg.norm(final - initial))


def geometric_residual(trajectory: Trajectory) -> float:
    """Largest |<phi_k(t)|H|phi_l(t)>| over all samples and basis pairs."""
    worst = 0.0
    for index, h in enumerate(trajectory.hamiltonians):
        basis = trajectory.basis[trajectory.segment_index == index]
        elements = dagger(basis) @ h[None, :, :] @ basis
        worst = max(worst, float(np.max(np.abs(elements))))
    return worst


def check_cyclic(plan: PathPlan, trajectory: Optional[Trajectory] = None) -> float:
    if trajectory is None:
        trajectory = evolve_path(plan)
    residual = cyclic_residual(trajectory, projector(bright_dark(plan.initial_frame)))
    logger.debug("Cyclic residual %.3e", residual)
    return residual


def check_geometric(
    plan: PathPlan,
    samples_per_segment: int = DEFAULT_SAMPLES,
    trajectory: Optional[Trajectory] = None,
) -> float:
    if trajectory is None:
        trajectory = evolve_path(plan, samples_per_segment)
    residual = geometric_residual(trajectory)
    logger.debug("Geometric residual %.3e", residual)
    return residual
