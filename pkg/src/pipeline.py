"""Entry points coordinating design, verification, simulation and comparison runs.

Each ``run_*`` function loads its inputs, does the work, writes its artefacts
under ``config.output`` and records one metadata event, marking it failed and
re-raising when anything goes wrong.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from src.config import RunConfig
from src.decoupling.interleave import interleave
from src.errors import InvalidArgument
from src.holonomy.conditions import check_cyclic, check_geometric
from src.holonomy.gate_extraction import amplitude_error_sensitivity, extract_gate
from src.holonomy.path_planner import PlannerConstraints, plan_shortest_path
from src.ingestion.load_plan import load_conditional_plan, load_noise, load_plan
from src.metadata.metadata_store import MetadataStore
from src.noise.compare_paths import compare_paths, pi_pulse_plan, rate_sweep
from src.noise.lindblad import NoiseModel
from src.propagation.evolve_path import evolve_path
from src.reporting.export import write_frame, write_json, write_trajectory_csv
from src.reporting.report_generator import generate_report
from src.twoqubit.conditional_gate import compose_conditional_gate

logger = logging.getLogger(__name__)

EQUIVALENCE_TOL = 1e-10


def _output(config: RunConfig, name: str) -> Path:
    return Path(config.output) / name


def run_design(config: RunConfig, store: MetadataStore) -> Dict[str, Any]:
    """Plan the shortest path for ``config.target_beta`` and write plan and report."""
    details: Dict[str, Any] = {"target_beta": config.target_beta}
    try:
        if config.target_beta is None:
            raise InvalidArgument("design needs a target_beta")
        logger.info("Planning path for beta = %.6f pi", config.target_beta / math.pi)
        result = plan_shortest_path(
            config.target_beta,
            config.eta1_grid,
            config.eta2_grid,
            constraints=PlannerConstraints(config.omega_max, config.tau_max),
            allow_single_segment=config.allow_single_segment,
            jobs=config.jobs,
            tolerance=config.tolerance,
        )
        plan_path = write_json(result.plan.to_dict(), _output(config, "plan.json"))
        report = dict(result.report.to_dict(), family=result.family)
        report_path = write_json(report, _output(config, "design_report.json"))
        candidates_path = write_frame(result.candidates, _output(config, "candidates.csv"))

        details.update(
            {
                "status": "success",
                "family": result.family,
                "total_angle": result.total_angle,
                "beta": result.beta,
                "segments": len(result.plan.segments),
                "candidates": len(result.candidates),
                "plan_path": str(plan_path),
                "report_path": str(report_path),
                "candidates_path": str(candidates_path),
            }
        )
        store.add_event(stage="design", action="plan_shortest_path", details=details)
        return report

    except Exception as e:
        details.update({"status": "failed", "error": str(e)})
        store.add_event(stage="design", action="plan_shortest_path", details=details)
        raise


def run_verify(plan_path: str | Path, config: RunConfig, store: MetadataStore) -> Tuple[Dict[str, Any], bool]:
    """Check both holonomy conditions; the flag is True when both pass."""
    details: Dict[str, Any] = {"input": str(plan_path), "tolerance": config.tolerance}
    try:
        plan = load_plan(plan_path, store)
        trajectory = evolve_path(plan, config.samples)
        cyclic = check_cyclic(plan, trajectory)
        geometric = check_geometric(plan, config.samples, trajectory)
        passed = cyclic <= config.tolerance and geometric <= config.tolerance
        report = {
            "cyclic_residual": cyclic,
            "geometric_residual": geometric,
            "tolerance": config.tolerance,
            "passed": passed,
        }
        write_json(report, _output(config, "verify_report.json"))
        if not passed:
            logger.warning("Plan %s failed verification", plan_path)

        details.update({"status": "success", **report})
        store.add_event(stage="verification", action="verify_plan", details=details)
        return report, passed

    except Exception as e:
        details.update({"status": "failed", "error": str(e)})
        store.add_event(stage="verification", action="verify_plan", details=details)
        raise


def run_simulate(
    plan_path: str | Path,
    config: RunConfig,
    store: MetadataStore,
    csv_path: Optional[str | Path] = None,
    epsilon: float = 0.01,
) -> Dict[str, Any]:
    """Write the sampled trajectory CSV and the extracted gate report."""
    details: Dict[str, Any] = {"input": str(plan_path), "samples": config.samples}
    try:
        plan = load_plan(plan_path, store)
        trajectory = evolve_path(plan, config.samples)
        csv_written = write_trajectory_csv(trajectory, csv_path or _output(config, "trajectory.csv"))
        gate = extract_gate(plan, config.samples, config.tolerance, strict=False)
        report = dict(
            gate.to_dict(),
            amplitude_error=epsilon,
            amplitude_error_infidelity=amplitude_error_sensitivity(plan, epsilon),
            compensation_phases=list(trajectory.compensation_phases),
        )
        write_json(report, _output(config, "gate_report.json"))

        details.update(
            {
                "status": "success",
                "beta": gate.beta,
                "total_angle": gate.total_angle,
                "cyclic": gate.cyclic,
                "csv_path": str(csv_written),
            }
        )
        store.add_event(stage="simulation", action="simulate_plan", details=details)
        return report

    except Exception as e:
        details.update({"status": "failed", "error": str(e)})
        store.add_event(stage="simulation", action="simulate_plan", details=details)
        raise


def run_dd(plan_path: str | Path, config: RunConfig, store: MetadataStore) -> Tuple[Dict[str, Any], bool]:
    """Interleave the decoupling sequence; the flag is True when the evolution is unchanged."""
    details: Dict[str, Any] = {"input": str(plan_path)}
    try:
        plan = load_plan(plan_path, store)
        schedule = interleave(plan, config.samples)
        passed = schedule.equivalence_error <= EQUIVALENCE_TOL
        report = dict(schedule.to_dict(), passed=passed)
        output = write_json(report, _output(config, "protected_schedule.json"))

        details.update(
            {
                "status": "success",
                "equivalence_error": schedule.equivalence_error,
                "geometric_residual": schedule.geometric_residual,
                "passed": passed,
                "output": str(output),
            }
        )
        store.add_event(stage="decoupling", action="interleave", details=details)
        return report, passed

    except Exception as e:
        details.update({"status": "failed", "error": str(e)})
        store.add_event(stage="decoupling", action="interleave", details=details)
        raise


def run_two_qubit(
    plan_path: str | Path,
    config: RunConfig,
    store: MetadataStore,
    protect: bool = False,
) -> Dict[str, Any]:
    details: Dict[str, Any] = {"input": str(plan_path), "protected": protect}
    try:
        cp = load_conditional_plan(plan_path, store)
        gate = compose_conditional_gate(cp, protect, config.samples, config.tolerance)
        report = gate.to_dict()
        write_json(report, _output(config, "two_qubit_report.json"))

        details.update(
            {
                "status": "success",
                "entangling": report["entangling"],
                "entangling_measure": report["entangling_measure"],
            }
        )
        store.add_event(stage="two_qubit", action="compose_conditional_gate", details=details)
        return report

    except Exception as e:
        details.update({"status": "failed", "error": str(e)})
        store.add_event(stage="two_qubit", action="compose_conditional_gate", details=details)
        raise


def run_noise_compare(
    short_path: str | Path,
    config: RunConfig,
    store: MetadataStore,
    reference_path: Optional[str | Path] = None,
    noise_path: Optional[str | Path] = None,
    sweep: Optional[Tuple[float, ...]] = None,
) -> Dict[str, Any]:
    """Compare a short plan with a reference plan under the configured noise.

    Without a reference file the reference is the resonant pi loop in the short
    plan's frame at its largest Rabi amplitude.
    """
    details: Dict[str, Any] = {"short": str(short_path), "reference": str(reference_path)}
    try:
        short_plan = load_plan(short_path, store)
        if reference_path is not None:
            reference_plan = load_plan(reference_path, store)
        else:
            omega = max(seg.omega for seg in short_plan.segments)
            reference_plan = pi_pulse_plan(short_plan.initial_frame, omega)
        noise = load_noise(noise_path, store) if noise_path is not None else NoiseModel.from_dict(config.noise)

        comparison = compare_paths(short_plan, reference_plan, noise, config.dt, config.samples, config.tolerance)
        write_json(comparison, _output(config, "noise_comparison.json"))
        if sweep:
            table = rate_sweep(
                short_plan,
                reference_plan,
                noise,
                sweep,
                config.jobs,
                dt=config.dt,
                samples_per_segment=config.samples,
                tolerance=config.tolerance,
            )
            write_frame(table, _output(config, "noise_sweep.csv"))

        details.update({"status": "success", **{k: v for k, v in comparison.items() if k != "noise"}})
        store.add_event(stage="noise", action="compare_paths", details=details)
        return comparison

    except Exception as e:
        details.update({"status": "failed", "error": str(e)})
        store.add_event(stage="noise", action="compare_paths", details=details)
        raise


def run_report(config: RunConfig, metadata_path: str | Path) -> Path:
    path = generate_report(metadata_path, _output(config, "report.md"))
    logger.info("Run report written to %s", path)
    return path
