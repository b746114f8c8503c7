"""Reads plan, conditional-plan and noise documents into domain objects."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Optional

from src.errors import PlanFileError
from src.metadata.metadata_store import MetadataStore
from src.noise.lindblad import NoiseModel
from src.propagation.evolve_path import PathPlan
from src.twoqubit.conditional_gate import ConditionalPlan
from src.validation.validate_plan import require_valid

logger = logging.getLogger(__name__)


def read_json(path: str | Path) -> Any:
    """Parse a JSON document; truncated or malformed files raise PlanFileError."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Input file not found at {path}")
    try:
        with path.open("r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise PlanFileError(f"Malformed JSON in {path}: {exc}") from exc


def _load(path: str | Path, kind: str, build, store: Optional[MetadataStore]):
    store = store or MetadataStore(enabled=False)
    try:
        document = read_json(path)
        try:
            require_valid(document, kind)
            obj = build(document)
        except (ValueError, KeyError, TypeError) as exc:
            raise PlanFileError(f"Invalid {kind} file {path}: {exc}") from exc
        store.add_event(
            stage="ingestion",
            action=f"load_{kind}",
            details={"input": str(path), "status": "success"},
        )
        logger.info("Loaded %s from %s", kind, path)
        return obj
    except Exception as e:
        store.add_event(
            stage="ingestion",
            action=f"load_{kind}",
            details={"input": str(path), "status": "failed", "error": str(e)},
        )
        raise


def load_plan(path: str | Path, store: Optional[MetadataStore] = None) -> PathPlan:
    return _load(path, "plan", PathPlan.from_dict, store)


def load_conditional_plan(path: str | Path, store: Optional[MetadataStore] = None) -> ConditionalPlan:
    return _load(path, "conditional_plan", ConditionalPlan.from_dict, store)


def load_noise(path: str | Path, store: Optional[MetadataStore] = None) -> NoiseModel:
    return _load(path, "noise", NoiseModel.from_dict, store)
