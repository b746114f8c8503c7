"""Generate a human-readable report of the latest gate design and verification runs."""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.config import METADATA_PATH

SECTIONS = [
    ("design", "plan_shortest_path", "Path Design"),
    ("verification", "verify_plan", "Holonomy Verification"),
    ("simulation", "simulate_plan", "Trajectory Simulation"),
    ("decoupling", "interleave", "Dynamical Decoupling"),
    ("two_qubit", "compose_conditional_gate", "Conditional Two-Qubit Gate"),
    ("noise", "compare_paths", "Noise Comparison"),
]


def _load_metadata(path: Path) -> List[Dict[str, Any]]:
    """Load the metadata event list from JSON."""
    if not path.exists():
        raise FileNotFoundError(f"Metadata file not found at {path}")
    with path.open("r", encoding="utf-8") as f:
        return json.load(f)


def _find_latest_event(
    events: List[Dict[str, Any]],
    stage: str,
    action: Optional[str] = None,
) -> Optional[Dict[str, Any]]:
    """Return the most recent event matching stage (and optional action)."""
    for event in reversed(events):
        if event.get("stage") != stage:
            continue
        if action is not None and event.get("action") != action:
            continue
        return event
    return None


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        if math.isfinite(value) and value != 0 and (abs(value) < 1e-3 or abs(value) >= 1e4):
            return f"{value:.3e}"
        return f"{value:.6f}"
    if isinstance(value, (list, dict)):
        return f"`{json.dumps(value)}`"
    return str(value)


def _format_angle(value: Any) -> str:
    if isinstance(value, (int, float)):
        return f"{value:.6f} rad ({value / math.pi:.6f} pi)"
    return str(value)


def _format_details(details: Dict[str, Any]) -> List[str]:
    lines: List[str] = []
    for key, value in details.items():
        if key == "error":
            continue
        if key in {"beta", "target_beta", "total_angle", "total_angle_short", "total_angle_reference"}:
            lines.append(f"- **{key}**: {_format_angle(value)}")
        else:
            lines.append(f"- **{key}**: {_format_value(value)}")
    error = details.get("error")
    if error:
        lines.append(f"- **Last error**: `{error}`")
    return lines


def generate_report(
    metadata_path: str | Path = METADATA_PATH,
    output_path: str | Path = "outputs/report.md",
) -> Path:
    """
    Generate a markdown report summarising the latest event of every stage.

    Returns
    -------
    Path
        Path to the generated report file.
    """
    metadata_path = Path(metadata_path)
    output_path = Path(output_path)

    events = _load_metadata(metadata_path)
    now = datetime.now(timezone.utc).isoformat()

    lines: List[str] = []

    # 1. Header
    lines.append("# Holonomic Gate Run Report")
    lines.append("")
    lines.append(f"Generated: `{now}`")
    lines.append("")
    lines.append(f"Events recorded: {len(events)}")
    lines.append("")

    # 2. One section per stage
    for number, (stage, action, title) in enumerate(SECTIONS, start=1):
        lines.append(f"## {number}. {title}")
        lines.append("")
        event = _find_latest_event(events, stage=stage, action=action)
        if event is None:
            lines.append(f"_No {stage} event found in metadata._")
        else:
            lines.append(f"Recorded: `{event.get('timestamp', 'N/A')}`")
            lines.append("")
            lines.extend(_format_details(event.get("details", {})))
        lines.append("")

    # 3. Failures
    failures = [e for e in events if e.get("details", {}).get("status") == "failed"]
    lines.append(f"## {len(SECTIONS) + 1}. Failures")
    lines.append("")
    if not failures:
        lines.append("_No failed events recorded._")
    for event in failures[-10:]:
        d = event.get("details", {})
        lines.append(f"- `{event.get('stage')}/{event.get('action')}`: {d.get('error', 'unknown error')}")
    lines.append("")

    # 4. Footer
    lines.append("---")
    lines.append("")
    lines.append(f"_Metadata: `{metadata_path}`_")

    output_path.parent.mkdir(parents=True, exist_ok=True)
    with output_path.open("w", encoding="utf-8") as f:
        f.write("\n".join(lines))

    return output_path
