"""Search for the shortest matched path realizing a target geometric phase.

Two families are scanned: single full loops (rotation angle pi, any beta via
the mixing angle) and matched segment pairs on a grid of mixing angles. Each
pair is reduced to a 1-D root search in the first rotation angle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.optimize import brentq

from src.config import DEFAULT_OMEGA_MAX, DEFAULT_TAU_MAX, RESIDUAL_TOL
from src.errors import InvalidArgument, NoSolution, NotCyclic
from src.holonomy.gate_extraction import HolonomyReport, extract_gate
from src.holonomy.matching import (
    BRANCHES,
    detuning_for,
    duration_for,
    match_phase,
    match_rotation_angle,
    rotation_argument,
)
from src.lambda_system.bright_dark import BrightFrame, SegmentSpec
from src.operators.matrix_algebra import angle_difference
from src.propagation.evolve_path import PathPlan

logger = logging.getLogger(__name__)

SCAN_POINTS = 721
ROOT_TOL = 1e-6
FAMILY_RANK = {"single_loop": 0, "matched_pair": 1}


@dataclass(frozen=True)
class PlannerConstraints:
    omega_max: float = DEFAULT_OMEGA_MAX
    tau_max: float = DEFAULT_TAU_MAX

    def __post_init__(self) -> None:
        if not (self.omega_max > 0 and self.tau_max > 0):
            raise InvalidArgument("omega_max and tau_max must be positive")


@dataclass(frozen=True, eq=False)
class PlannerResult:
    plan: PathPlan
    report: HolonomyReport
    family: str
    candidates: pd.DataFrame

    @property
    def total_angle(self) -> float:
        return self.report.total_angle

    @property
    def beta(self) -> float:
        return self.report.beta


def pair_beta(theta1: float, eta1: float, eta2: float, branch: str = "principal") -> float:
    """Closed-form geometric phase of the matched pair started with ``theta1``."""
    theta2 = match_rotation_angle(theta1, eta1, eta2, branch)
    return (
        rotation_argument(theta1, eta1)
        - theta1 * math.cos(eta1)
        + rotation_argument(theta2, eta2)
        - theta2 * math.cos(eta2)
    )


def _pair_beta_grid(thetas: np.ndarray, eta1: float, eta2: float, branch: str) -> np.ndarray:
    ratio = np.minimum(np.abs(np.sin(thetas) * math.sin(eta1)) / abs(math.sin(eta2)), 1.0)
    thetas2 = np.arcsin(ratio)
    if branch == "complement":
        thetas2 = math.pi - thetas2
    return (
        np.arctan2(np.sin(thetas) * math.cos(eta1), np.cos(thetas))
        - thetas * math.cos(eta1)
        + np.arctan2(np.sin(thetas2) * math.cos(eta2), np.cos(thetas2))
        - thetas2 * math.cos(eta2)
    )


def _wrap_signed(angles: np.ndarray) -> np.ndarray:
    """Reduce to (-pi, pi], elementwise."""
    wrapped = np.mod(angles, 2 * math.pi)
    return np.where(wrapped > math.pi, wrapped - 2 * math.pi, wrapped)


def _pair_roots(target: float, eta1: float, eta2: float, branch: str) -> List[float]:
    thetas = np.linspace(0.0, math.pi, SCAN_POINTS)[1:-1]
    feasible = np.abs(np.sin(thetas) * math.sin(eta1)) <= abs(math.sin(eta2))

    def mismatch(theta: float) -> float:
        return angle_difference(pair_beta(theta, eta1, eta2, branch), target)

    values = np.full(thetas.shape, np.nan)
    values[feasible] = _wrap_signed(_pair_beta_grid(thetas[feasible], eta1, eta2, branch) - target)

    roots: List[float] = []
    for i in range(len(thetas)):
        if np.isfinite(values[i]) and abs(values[i]) <= 1e-12:
            roots.append(float(thetas[i]))
            continue
        if i + 1 >= len(thetas) or not (np.isfinite(values[i]) and np.isfinite(values[i + 1])):
            continue
        lo, hi = values[i], values[i + 1]
        # a jump across the branch cut of the phase is not a root
        if lo * hi < 0 and abs(lo - hi) < math.pi:
            try:
                root = brentq(mismatch, thetas[i], thetas[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps)
            except NoSolution:
                continue
            if abs(mismatch(root)) <= ROOT_TOL:
                roots.append(float(root))
    return roots


def _pair_candidates(
    target: float,
    eta1: float,
    eta2: float,
    branch: str,
    constraints: PlannerConstraints,
) -> List[Dict[str, Any]]:
    rows = []
    for theta1 in _pair_roots(target, eta1, eta2, branch):
        theta2 = match_rotation_angle(theta1, eta1, eta2, branch)
        tau_total = duration_for(theta1, eta1, constraints.omega_max) + duration_for(
            theta2, eta2, constraints.omega_max
        )
        rows.append(
            {
                "family": "matched_pair",
                "eta1": eta1,
                "eta2": eta2,
                "branch": branch,
                "theta1": theta1,
                "theta2": theta2,
                "total_angle": theta1 + theta2,
                "beta": pair_beta(theta1, eta1, eta2, branch),
                "tau_total": tau_total,
                "feasible": tau_total <= constraints.tau_max,
            }
        )
    return rows


def single_loop_candidate(target: float, constraints: PlannerConstraints) -> Dict[str, Any]:
    """Full loop theta = pi with cos(eta) = 1 - beta/pi."""
    eta = math.acos(1.0 - target / math.pi)
    tau = duration_for(math.pi, eta, constraints.omega_max)
    return {
        "family": "single_loop",
        "eta1": eta,
        "eta2": math.nan,
        "branch": "principal",
        "theta1": math.pi,
        "theta2": 0.0,
        "total_angle": math.pi,
        "beta": target,
        "tau_total": tau,
        "feasible": tau <= constraints.tau_max,
    }


def build_candidate_plan(
    row: Dict[str, Any],
    constraints: PlannerConstraints,
    frame: BrightFrame,
    phi1: float = 0.0,
) -> PathPlan:
    omega = constraints.omega_max
    eta1, theta1 = row["eta1"], row["theta1"]
    delta1 = detuning_for(eta1, omega)
    first = SegmentSpec(frame, omega, delta1, phi1, duration_for(theta1, eta1, omega))
    if row["family"] == "single_loop":
        return PathPlan(segments=(first,), initial_frame=frame)

    eta2, theta2 = row["eta2"], row["theta2"]
    delta2 = detuning_for(eta2, omega)
    solution = match_phase(phi1, delta1, delta2, first.tau, theta1, eta1, theta2, eta2)
    second = SegmentSpec(frame, omega, delta2, solution.phi2, duration_for(theta2, eta2, omega))
    return PathPlan(segments=(first, second), initial_frame=frame)


def _check_grid(name: str, grid: Sequence[float]) -> List[float]:
    values = [float(x) for x in grid]
    if not values:
        raise InvalidArgument(f"{name} must be nonempty")
    for eta in values:
        if not (0.0 < eta < math.pi):
            raise InvalidArgument(f"{name} entries must lie in (0, pi), got {eta}")
    return values


def plan_shortest_path(
    target_beta: float,
    eta1_grid: Sequence[float],
    eta2_grid: Sequence[float],
    constraints: Optional[PlannerConstraints] = None,
    frame: Optional[BrightFrame] = None,
    phi1: float = 0.0,
    allow_single_segment: bool = True,
    jobs: int = 1,
    tolerance: float = RESIDUAL_TOL,
) -> PlannerResult:
    """Shortest-total-angle plan with geometric phase ``target_beta``.

    Ties on the total angle go to the single loop, then to smaller (eta1, eta2).
    """
    if not (0.0 < target_beta < 2 * math.pi):
        raise InvalidArgument(f"target_beta must lie in (0, 2 pi), got {target_beta}")
    eta1_values = _check_grid("eta1_grid", eta1_grid)
    eta2_values = _check_grid("eta2_grid", eta2_grid)
    constraints = constraints or PlannerConstraints()
    frame = frame or BrightFrame(0.0, 0.0)

    tasks = [(e1, e2, b) for e1 in eta1_values for e2 in eta2_values for b in BRANCHES]
    if jobs > 1:
        batches = Parallel(n_jobs=jobs)(
            delayed(_pair_candidates)(target_beta, e1, e2, b, constraints) for e1, e2, b in tasks
        )
    else:
        batches = [_pair_candidates(target_beta, e1, e2, b, constraints) for e1, e2, b in tasks]

    rows = [row for batch in batches for row in batch]
    if allow_single_segment:
        rows.insert(0, single_loop_candidate(target_beta, constraints))

    candidates = pd.DataFrame(rows, columns=list(single_loop_candidate(target_beta, constraints)))
    if candidates.empty or not candidates["feasible"].any():
        raise NoSolution(f"No feasible path found for beta={target_beta:.6f}")

    candidates["angle_key"] = candidates["total_angle"].round(12)
    candidates["family_rank"] = candidates["family"].map(FAMILY_RANK)
    candidates["branch_rank"] = candidates["branch"].map({b: i for i, b in enumerate(BRANCHES)})
    candidates = candidates.sort_values(
        ["feasible", "angle_key", "family_rank", "eta1", "eta2", "branch_rank", "theta1"],
        ascending=[False, True, True, True, True, True, True],
        na_position="first",
    ).reset_index(drop=True)
    dropped = int((~candidates["feasible"]).sum())
    if dropped:
        logger.warning("Dropped %d candidates exceeding tau_max=%.3f", dropped, constraints.tau_max)

    for row in candidates[candidates["feasible"]].to_dict("records"):
        plan = build_candidate_plan(row, constraints, frame, phi1)
        try:
            report = extract_gate(plan, tolerance=tolerance)
        except NotCyclic as exc:
            logger.warning("Candidate rejected on verification: %s", exc)
            continue
        if report.geometric_residual > tolerance:
            logger.warning("Candidate rejected: geometric residual %.3e", report.geometric_residual)
            continue
        logger.info(
            "Planned %s path: total angle %.6f pi, beta %.6f pi",
            row["family"],
            report.total_angle / math.pi,
            report.beta / math.pi,
        )
        return PlannerResult(plan=plan, report=report, family=row["family"], candidates=candidates)

    raise NoSolution(f"No candidate for beta={target_beta:.6f} passed verification")
