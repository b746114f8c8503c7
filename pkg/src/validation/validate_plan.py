"""Validates loaded plan and noise documents before they become domain objects."""

from __future__ import annotations

import math
from typing import Any, Dict, List

from src.errors import InvalidPlan

REQUIRED_SEGMENT_FIELDS = ["theta", "omega", "delta", "tau"]
OPTIONAL_SEGMENT_FIELDS = ["phi", "laser_phase"]
NOISE_FIELDS = ["gamma_e0", "gamma_e1", "kappa_0", "kappa_1", "kappa_e"]


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def validate_plan_document(document: Any) -> Dict[str, Any]:
    """Return a dictionary of issues; empty when the plan document is usable."""
    issues: Dict[str, Any] = {}
    if not isinstance(document, dict):
        return {"not_an_object": True}
    segments = document.get("segments")
    if not isinstance(segments, list) or not segments:
        return {"missing_segments": True}

    # --------------------------
    # Required Fields Check
    # --------------------------
    missing: Dict[int, List[str]] = {}
    non_numeric: Dict[int, List[str]] = {}
    for index, seg in enumerate(segments):
        if not isinstance(seg, dict):
            missing[index] = list(REQUIRED_SEGMENT_FIELDS)
            continue
        absent = [c for c in REQUIRED_SEGMENT_FIELDS if c not in seg]
        if absent:
            missing[index] = absent
        bad = [
            c
            for c in REQUIRED_SEGMENT_FIELDS + OPTIONAL_SEGMENT_FIELDS
            if c in seg and not _is_number(seg[c])
        ]
        if bad:
            non_numeric[index] = bad
    if missing:
        issues["missing_fields"] = missing
    if non_numeric:
        issues["non_numeric_fields"] = non_numeric
    if missing or non_numeric:
        return issues

    # --------------------------
    # Range Checks
    # --------------------------
    negative_omega = sum(1 for seg in segments if seg["omega"] < 0)
    if negative_omega:
        issues["negative_omega_count"] = negative_omega
    nonpositive_tau = sum(1 for seg in segments if seg["tau"] <= 0)
    if nonpositive_tau:
        issues["nonpositive_tau_count"] = nonpositive_tau
    bad_theta = sum(1 for seg in segments if not (0.0 <= seg["theta"] <= math.pi / 2 + 1e-12))
    if bad_theta:
        issues["theta_out_of_range_count"] = bad_theta

    frame = document.get("initial_frame")
    if frame is not None:
        if not isinstance(frame, dict) or not _is_number(frame.get("theta")):
            issues["invalid_initial_frame"] = True
        elif "phi" in frame and not _is_number(frame["phi"]):
            issues["invalid_initial_frame"] = True
    return issues


def validate_conditional_document(document: Any) -> Dict[str, Any]:
    if not isinstance(document, dict):
        return {"not_an_object": True}
    issues: Dict[str, Any] = {}
    for spin in ("up", "down"):
        if spin not in document:
            issues[f"missing_{spin}"] = True
            continue
        sub = validate_plan_document(document[spin])
        if sub:
            issues[spin] = sub
    return issues


def validate_noise_document(document: Any) -> Dict[str, Any]:
    if not isinstance(document, dict):
        return {"not_an_object": True}
    issues: Dict[str, Any] = {}
    unknown = sorted(set(document) - set(NOISE_FIELDS))
    if unknown:
        issues["unknown_rates"] = unknown
    invalid = [k for k in NOISE_FIELDS if k in document and not (_is_number(document[k]) and document[k] >= 0)]
    if invalid:
        issues["invalid_rates"] = invalid
    return issues


VALIDATORS = {
    "plan": validate_plan_document,
    "conditional_plan": validate_conditional_document,
    "noise": validate_noise_document,
}


def require_valid(document: Any, kind: str) -> None:
    """Raise InvalidPlan listing every issue found in ``document``."""
    issues = VALIDATORS[kind](document)
    if issues:
        raise InvalidPlan(f"Invalid {kind} document: {issues}")
