"""Default tolerances, paths and the run configuration shared by the CLI."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from src.errors import InvalidArgument

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
MATCH_TOL = 1e-12
DEGENERATE_TOL = 1e-9
RESIDUAL_TOL = 1e-8

DEFAULT_SAMPLES = 64
DEFAULT_OUTPUT_DIR = "outputs"
METADATA_PATH = "data/processed/metadata.json"

# Planner defaults: eta grids span (0, pi) without the endpoints.
DEFAULT_ETA_GRID: Tuple[float, ...] = tuple(
    float(x) for x in [k * math.pi / 12 for k in range(1, 12)] + [math.atan(4 / 3)]
)
DEFAULT_OMEGA_MAX = 1.0
DEFAULT_TAU_MAX = 100.0


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one CLI run, merged from a JSON config file and flags."""

    tolerance: float = RESIDUAL_TOL
    samples: int = DEFAULT_SAMPLES
    jobs: int = 1
    output: str = DEFAULT_OUTPUT_DIR
    target_beta: Optional[float] = None
    eta1_grid: Tuple[float, ...] = DEFAULT_ETA_GRID
    eta2_grid: Tuple[float, ...] = DEFAULT_ETA_GRID
    omega_max: float = DEFAULT_OMEGA_MAX
    tau_max: float = DEFAULT_TAU_MAX
    allow_single_segment: bool = True
    dt: Optional[float] = None
    noise: Dict[str, float] = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise InvalidArgument(f"tolerance must be positive, got {self.tolerance}")
        if self.samples < 2:
            raise InvalidArgument(f"samples must be at least 2, got {self.samples}")
        if self.jobs < 1:
            raise InvalidArgument(f"jobs must be at least 1, got {self.jobs}")
        if not self.eta1_grid or not self.eta2_grid:
            raise InvalidArgument("eta grids must be nonempty")
        if self.omega_max <= 0 or self.tau_max <= 0:
            raise InvalidArgument("omega_max and tau_max must be positive")
        if self.dt is not None and not self.dt > 0:
            raise InvalidArgument(f"dt must be positive, got {self.dt}")
        return self

    @classmethod
    def from_sources(
        cls,
        overrides: Optional[Dict[str, Any]] = None,
        config_path: Optional[str | Path] = None,
    ) -> "RunConfig":
        """Build a config from an optional JSON file, then apply non-None overrides."""
        values: Dict[str, Any] = {}
        if config_path is not None:
            config_path = Path(config_path)
            if not config_path.exists():
                raise FileNotFoundError(f"Config file not found at {config_path}")
            try:
                loaded = json.loads(config_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise InvalidArgument(f"Malformed config {config_path}: {exc}") from exc
            if not isinstance(loaded, dict):
                raise InvalidArgument(f"Config {config_path} must hold a JSON object")
            values.update(loaded)

        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value

        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise InvalidArgument(f"Unknown config keys: {unknown}")

        for grid in ("eta1_grid", "eta2_grid"):
            if grid in values:
                if not isinstance(values[grid], (list, tuple)):
                    raise InvalidArgument(f"{grid} must be a list of angles")
                values[grid] = tuple(float(x) for x in values[grid])

        try:
            config = replace(cls(), **values)
        except TypeError as exc:
            raise InvalidArgument(str(exc)) from exc
        return config.validate()
