"""JSON and CSV writers for reports, plans and trajectories."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import pandas as pd

from src.metadata.metadata_store import to_serializable
from src.propagation.evolve_path import Trajectory

FLOAT_FORMAT = "%.17g"


def write_json(data: Any, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(to_serializable(data), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def write_frame(df: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_trajectory_csv(trajectory: Trajectory, path: str | Path) -> Path:
    return write_frame(trajectory.to_frame(), path)
