"""Command-line front end for designing and checking holonomic gates.

Usage::

    python -m src.cli design --target-beta 0.1745 --output outputs
    python -m src.cli verify plans/worked_example.json
    python -m src.cli noise-compare plans/worked_example.json --noise plans/noise_decay.json
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Dict, Optional, Sequence, Tuple

from src import pipeline
from src.config import METADATA_PATH, RunConfig
from src.errors import (
    DegenerateSegment,
    HolonomyError,
    InvalidArgument,
    InvalidOperator,
    InvalidPlan,
    InvalidState,
    MatchViolation,
    NoSolution,
    NotCyclic,
    PlanFileError,
    StepTooLarge,
)
from src.metadata.metadata_store import MetadataStore

logger = logging.getLogger("src.cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_NO_SOLUTION = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_IO = 66

# failed preconditions on well-formed input
DOMAIN_ERRORS = (
    InvalidPlan,
    DegenerateSegment,
    MatchViolation,
    NotCyclic,
    InvalidOperator,
    InvalidState,
    StepTooLarge,
)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors surface as InvalidArgument instead of exiting."""

    def error(self, message: str):
        raise InvalidArgument(f"{self.prog}: {message}")


def configure_logging(verbosity: int = 0) -> None:
    if verbosity > 0:
        level = logging.DEBUG
    elif verbosity < 0:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _float_list(text: str) -> Tuple[float, ...]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    try:
        return tuple(float(item) for item in items)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tolerance", type=float, help="residual tolerance (default 1e-8)")
    common.add_argument("--samples", type=int, help="time samples per segment (default 64)")
    common.add_argument("--jobs", type=int, help="parallel workers for planning and sweeps")
    common.add_argument("--output", help="directory for reports (default outputs)")
    common.add_argument("--config", help="JSON file with run parameters; flags win")
    common.add_argument("--metadata", default=METADATA_PATH, help="event log path")
    common.add_argument("--no-metadata", action="store_true", help="do not write the event log")
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("-q", "--quiet", action="count", default=0)

    parser = _Parser(prog="holonomy", description="Design and verify nonadiabatic holonomic gates.")
    sub = parser.add_subparsers(dest="command", required=True)

    design = sub.add_parser("design", parents=[common], help="plan the shortest path for a phase")
    design.add_argument("--target-beta", type=float, help="target phase in radians")
    design.add_argument("--eta1-grid", type=_float_list, help="comma-separated eta values for segment 1")
    design.add_argument("--eta2-grid", type=_float_list, help="comma-separated eta values for segment 2")
    design.add_argument("--omega-max", type=float)
    design.add_argument("--tau-max", type=float)
    design.add_argument(
        "--no-single-segment",
        dest="allow_single_segment",
        action="store_false",
        default=None,
        help="exclude the single-loop family",
    )

    verify = sub.add_parser("verify", parents=[common], help="check the cyclic and geometric conditions")
    verify.add_argument("plan")

    simulate = sub.add_parser("simulate", parents=[common], help="sample the trajectory and extract the gate")
    simulate.add_argument("plan")
    simulate.add_argument("--csv", help="trajectory CSV path (default <output>/trajectory.csv)")
    simulate.add_argument("--epsilon", type=float, default=0.01, help="relative Rabi amplitude error")

    dd = sub.add_parser("dd", parents=[common], help="interleave the decoupling pulses")
    dd.add_argument("plan")

    two = sub.add_parser("two-qubit", parents=[common], help="compose a conditional two-qubit gate")
    two.add_argument("plan")
    two.add_argument("--protect", action="store_true", help="interleave decoupling in both blocks")

    noise = sub.add_parser("noise-compare", parents=[common], help="compare two paths under noise")
    noise.add_argument("plan")
    noise.add_argument("--reference", help="reference plan (default: resonant pi loop)")
    noise.add_argument("--noise", help="JSON file with decay and dephasing rates")
    noise.add_argument("--dt", type=float, help="integration step")
    noise.add_argument("--sweep", type=_float_list, help="comma-separated rate scale factors")

    sub.add_parser("report", parents=[common], help="write the markdown run report")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, object] = {
        "tolerance": args.tolerance,
        "samples": args.samples,
        "jobs": args.jobs,
        "output": args.output,
    }
    for key in ("target_beta", "eta1_grid", "eta2_grid", "omega_max", "tau_max", "allow_single_segment", "dt"):
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    return RunConfig.from_sources(overrides, args.config)


def _dispatch(args: argparse.Namespace, config: RunConfig, store: MetadataStore) -> int:
    if args.command == "design":
        pipeline.run_design(config, store)
        return EXIT_OK
    if args.command == "verify":
        _, passed = pipeline.run_verify(args.plan, config, store)
        return EXIT_OK if passed else EXIT_FAILED
    if args.command == "simulate":
        pipeline.run_simulate(args.plan, config, store, csv_path=args.csv, epsilon=args.epsilon)
        return EXIT_OK
    if args.command == "dd":
        _, passed = pipeline.run_dd(args.plan, config, store)
        return EXIT_OK if passed else EXIT_FAILED
    if args.command == "two-qubit":
        pipeline.run_two_qubit(args.plan, config, store, protect=args.protect)
        return EXIT_OK
    if args.command == "noise-compare":
        pipeline.run_noise_compare(
            args.plan,
            config,
            store,
            reference_path=args.reference,
            noise_path=args.noise,
            sweep=args.sweep,
        )
        return EXIT_OK
    pipeline.run_report(config, args.metadata)
    return EXIT_OK


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the process exit status."""
    if isinstance(error, (FileNotFoundError, PlanFileError)):
        return EXIT_IO
    if isinstance(error, NoSolution):
        return EXIT_NO_SOLUTION
    if isinstance(error, DOMAIN_ERRORS):
        return EXIT_DATA
    if isinstance(error, (InvalidArgument, argparse.ArgumentError)):
        return EXIT_USAGE
    if isinstance(error, OSError):
        return EXIT_IO
    return EXIT_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InvalidArgument as exc:
        configure_logging(0)
        logger.error("%s", exc)
        return EXIT_USAGE

    configure_logging(args.verbose - args.quiet)
    try:
        config = _run_config(args)
        store = MetadataStore(path=args.metadata, enabled=not args.no_metadata)
        return _dispatch(args, config, store)
    except (HolonomyError, OSError, ValueError) as exc:
        code = exit_code_for(exc)
        logger.error("%s failed (exit %d): %s", args.command, code, exc)
        return code


if __name__ == "__main__":
    sys.exit(main())
