"""Short-path versus pi-loop comparison under decay and dephasing."""

from __future__ import annotations

import logging
import math
from typing import Any, Dict, Optional, Sequence

import pandas as pd
from joblib import Parallel, delayed

from src.config import DEFAULT_SAMPLES, RESIDUAL_TOL
from src.holonomy.gate_extraction import extract_gate
from src.lambda_system.bright_dark import BrightFrame, SegmentSpec
from src.noise.fidelity import average_gate_fidelity, noisy_gate_channel
from src.noise.lindblad import NoiseModel, default_dt
from src.propagation.evolve_path import PathPlan

logger = logging.getLogger(__name__)


def pi_pulse_plan(frame: BrightFrame, omega: float, laser_phase: float = 0.0) -> PathPlan:
    """Resonant single loop with rotation angle pi."""
    seg = SegmentSpec(frame=frame, omega=omega, delta=0.0, laser_phase=laser_phase, tau=math.pi / omega)
    return PathPlan(segments=(seg,), initial_frame=frame)


def compare_paths(
    short_plan: PathPlan,
    reference_plan: PathPlan,
    noise: NoiseModel,
    dt: Optional[float] = None,
    samples_per_segment: int = DEFAULT_SAMPLES,
    tolerance: float = RESIDUAL_TOL,
) -> Dict[str, Any]:
    """Average gate fidelity of each plan against its own noiseless gate.

    Both plans are integrated with one common step so the comparison does not
    depend on step size.
    """
    if dt is None:
        dt = min(default_dt(short_plan.segments, noise), default_dt(reference_plan.segments, noise))

    results = {}
    for label, plan in (("short", short_plan), ("reference", reference_plan)):
        report = extract_gate(plan, samples_per_segment, tolerance)
        channel = noisy_gate_channel(plan, noise, dt)
        results[label] = {
            "fidelity": average_gate_fidelity(channel, report.computational_gate()),
            "total_angle": report.total_angle,
            "duration": plan.total_duration,
        }

    comparison = {
        "fidelity_short": results["short"]["fidelity"],
        "fidelity_reference": results["reference"]["fidelity"],
        "total_angle_short": results["short"]["total_angle"],
        "total_angle_reference": results["reference"]["total_angle"],
        "duration_short": results["short"]["duration"],
        "duration_reference": results["reference"]["duration"],
        "noise": noise.to_dict(),
        "dt": dt,
    }
    logger.info(
        "Fidelity short %.8f vs reference %.8f",
        comparison["fidelity_short"],
        comparison["fidelity_reference"],
    )
    return comparison


def rate_sweep(
    short_plan: PathPlan,
    reference_plan: PathPlan,
    noise: NoiseModel,
    factors: Sequence[float],
    jobs: int = 1,
    dt: Optional[float] = None,
    samples_per_segment: int = DEFAULT_SAMPLES,
    tolerance: float = RESIDUAL_TOL,
) -> pd.DataFrame:
    """One comparison per rate scaling factor, one row each."""
    settings = (dt, samples_per_segment, tolerance)
    if jobs > 1:
        rows = Parallel(n_jobs=jobs)(
            delayed(compare_paths)(short_plan, reference_plan, noise.scaled(f), *settings) for f in factors
        )
    else:
        rows = [compare_paths(short_plan, reference_plan, noise.scaled(f), *settings) for f in factors]
    frame = pd.DataFrame(rows).drop(columns=["noise"])
    frame.insert(0, "factor", list(factors))
    return frame
