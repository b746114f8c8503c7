"""Segment matching: rotation angles and laser phases that close a path.

A later segment sharing the bright frame of the first one must pull the
excited-state population back to zero and keep the computational subspace
parallel-transported. Both conditions fix the later segment's rotation angle
(up to a branch) and its laser phase.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.config import DEGENERATE_TOL, MATCH_TOL
from src.errors import InvalidArgument, InvalidPlan, MatchViolation, NoSolution
from src.lambda_system.bright_dark import SegmentSpec, bright_dark, frame_change
from src.operators.matrix_algebra import LEVEL_E, wrap_angle
from src.propagation.evolve_path import PathPlan, path_propagator

logger = logging.getLogger(__name__)

BRANCHES = ("principal", "complement")


@dataclass(frozen=True)
class MatchSolution:
    theta2: float
    a: float
    phi2: float
    degenerate_phase: bool = False


def rotation_argument(theta: float, eta: float) -> float:
    """arg(cos theta + i sin theta cos eta)."""
    return math.atan2(math.sin(theta) * math.cos(eta), math.cos(theta))


def _check_branch(branch: str) -> None:
    if branch not in BRANCHES:
        raise InvalidArgument(f"branch must be one of {BRANCHES}, got {branch!r}")


def _check_eta(name: str, eta: float) -> None:
    if not (0.0 < eta <= math.pi):
        raise InvalidArgument(f"{name} must lie in (0, pi], got {eta}")


def match_rotation_angle(
    theta1: float,
    eta1: float,
    eta2: float,
    branch: str = "principal",
) -> float:
    """Rotation angle of the second segment that empties |e> again.

    Solves |sin theta2 sin eta2| = |sin theta1 sin eta1|; the principal branch
    lies in (0, pi/2], the complement branch is pi minus it.
    """
    _check_branch(branch)
    if not theta1 > 0:
        raise InvalidArgument(f"theta1 must be positive, got {theta1}")
    _check_eta("eta1", eta1)
    _check_eta("eta2", eta2)

    population = abs(math.sin(theta1) * math.sin(eta1))
    reach = abs(math.sin(eta2))
    if population > reach + MATCH_TOL:
        raise NoSolution(
            f"Second segment cannot reach the required excited amplitude "
            f"({population:.6f} > {reach:.6f})"
        )
    ratio = min(population / reach, 1.0) if reach > 0 else 0.0
    theta2 = math.asin(ratio)
    return theta2 if branch == "principal" else math.pi - theta2


def match_phase(
    phi1: float,
    delta1: float,
    delta2: float,
    tau: float,
    theta1: float,
    eta1: float,
    theta2: float,
    eta2: float,
) -> MatchSolution:
    """Laser phase of the second segment for a cyclic, geometric pair.

    ``a`` is pi when sin(theta2)sin(eta2) has the same sign as
    sin(theta1)sin(eta1) and 0 otherwise.
    """
    s1 = math.sin(theta1) * math.sin(eta1)
    s2 = math.sin(theta2) * math.sin(eta2)
    if abs(abs(s2) - abs(s1)) > DEGENERATE_TOL:
        raise MatchViolation(
            f"Excited amplitudes do not match: |{s1:.12f}| vs |{s2:.12f}|"
        )

    a = math.pi if s1 * s2 >= 0 else 0.0
    phi2 = (
        phi1
        + (delta1 - delta2) * tau
        - a
        - rotation_argument(theta1, eta1)
        - rotation_argument(theta2, eta2)
    )
    degenerate = abs(abs(s1) - 1.0) <= DEGENERATE_TOL
    if degenerate:
        logger.warning("Full population transfer: the second laser phase is unconstrained")
    return MatchSolution(theta2=theta2, a=a, phi2=wrap_angle(phi2), degenerate_phase=degenerate)


def detuning_for(eta: float, omega: float) -> float:
    """Detuning with 2 omega / delta = tan(eta)."""
    return 2.0 * omega * math.cos(eta) / math.sin(eta)


def duration_for(theta: float, eta: float, omega: float) -> float:
    """Duration giving rotation angle ``theta`` at mixing angle ``eta``."""
    return theta * math.sin(eta) / omega


def _handoff_amplitudes(plan: PathPlan, delta_next: float) -> tuple[complex, complex]:
    """Bright and excited amplitudes of U|b_1> in the next segment's frame."""
    bright, _ = bright_dark(plan.initial_frame)
    state = path_propagator(plan) @ bright
    state = frame_change(plan.segments[-1].delta, delta_next, plan.total_duration) @ state
    return complex(np.vdot(bright, state)), complex(state[LEVEL_E])


def continue_path(
    plan: PathPlan,
    eta: float,
    omega: float,
    branch: str = "principal",
    rotation_angle: Optional[float] = None,
) -> PathPlan:
    """Append one segment in the plan's bright frame.

    Without ``rotation_angle`` the new segment closes the path: it returns all
    excited population to |b_1>. With ``rotation_angle`` it is an intermediate
    segment whose laser phase keeps the subspace parallel-transported.
    """
    _check_branch(branch)
    if not (0.0 < eta < math.pi):
        raise InvalidArgument(f"eta must lie in (0, pi), got {eta}")
    if not omega > 0:
        raise InvalidArgument(f"omega must be positive, got {omega}")
    frame = plan.initial_frame
    for seg in plan.segments:
        if abs(seg.frame.theta - frame.theta) > MATCH_TOL or abs(
            math.remainder(seg.frame.phi - frame.phi, 2 * math.pi)
        ) > MATCH_TOL:
            raise InvalidPlan("continue_path needs every segment in the initial bright frame")

    delta = detuning_for(eta, omega)
    amp_b, amp_e = _handoff_amplitudes(plan, delta)
    sin_eta = math.sin(eta)

    if rotation_angle is None:
        ratio = abs(amp_e) / sin_eta
        if ratio > 1.0 + MATCH_TOL:
            raise NoSolution(
                f"Closing segment cannot return excited amplitude {abs(amp_e):.6f} at eta={eta:.6f}"
            )
        theta = math.asin(min(ratio, 1.0))
        if branch == "complement":
            theta = math.pi - theta
        if theta <= MATCH_TOL:
            raise NoSolution("Path is already closed; no closing segment is needed")
        arg_b = float(np.angle(amp_b)) if abs(amp_b) > DEGENERATE_TOL else 0.0
        laser_phase = float(np.angle(amp_e)) - arg_b - math.pi / 2 - rotation_argument(theta, eta)
    else:
        theta = float(rotation_angle)
        if not theta > 0:
            raise InvalidArgument(f"rotation_angle must be positive, got {theta}")
        if abs(amp_e) <= DEGENERATE_TOL:
            laser_phase = plan.segments[-1].laser_phase
        else:
            overlap = np.conj(amp_e) * amp_b
            # Re(e^{i phi} conj(B) A) = -|B|^2 cot(eta) keeps <psi|H|psi> = 0
            target = -abs(amp_e) ** 2 * math.cos(eta) / sin_eta
            cosine = target / abs(overlap) if abs(overlap) > 0 else math.inf
            if abs(cosine) > 1.0 + MATCH_TOL:
                raise NoSolution("No laser phase keeps the continued segment parallel-transported")
            laser_phase = math.acos(max(-1.0, min(1.0, cosine))) - float(np.angle(overlap))

    segment = SegmentSpec(
        frame=frame,
        omega=omega,
        delta=delta,
        laser_phase=laser_phase,
        tau=duration_for(theta, eta, omega),
    )
    logger.debug("Continued path with theta=%.6f eta=%.6f phi_L=%.6f", theta, eta, segment.laser_phase)
    return PathPlan(segments=plan.segments + (segment,), initial_frame=frame)
