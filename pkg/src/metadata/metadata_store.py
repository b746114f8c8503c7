"""Records workflow events for gate design and verification runs."""

import json
import logging
import math
import os
from datetime import datetime, timezone

from src.config import METADATA_PATH

logger = logging.getLogger(__name__)


def to_serializable(obj):
    """Plain-Python copy of ``obj``: numpy values unwrapped, complex numbers as
    [re, im], NaN and infinities written as null."""
    if isinstance(obj, dict):
        return {str(k): to_serializable(v) for k, v in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [to_serializable(i) for i in obj]
    elif hasattr(obj, "tolist"):  # numpy array or scalar
        return to_serializable(obj.tolist())
    elif isinstance(obj, complex):
        return [obj.real, obj.imag]
    elif isinstance(obj, float) and not math.isfinite(obj):
        return None
    else:
        return obj


class MetadataStore:
    """
    A simple metadata store that records run events in a JSON file.
    Each event is appended as a dictionary with keys:
    - stage
    - action
    - timestamp
    - details

    A disabled store keeps events in memory only.
    """

    def __init__(self, path=METADATA_PATH, enabled=True):
        self.path = path
        self.enabled = enabled
        self.events = []

        if not self.enabled:
            return
        # Load existing metadata if present
        if os.path.exists(self.path):
            self.load()
        else:
            directory = os.path.dirname(self.path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            self.save()

    def timestamp(self):
        """Return current UTC timestamp as ISO8601 string."""
        return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")

    def add_event(self, stage, action, details=None):
        """Append a metadata event."""
        event = {
            "stage": stage,
            "action": action,
            "timestamp": self.timestamp(),
            "details": details or {},
        }
        self.events.append(event)
        logger.debug("Recorded %s/%s event", stage, action)
        self.save()

    def save(self):
        """Write metadata events to disk with type normalization."""
        if not self.enabled:
            return
        serializable_events = to_serializable(self.events)
        with open(self.path, "w") as f:
            json.dump(serializable_events, f, indent=2)

    def load(self):
        """Load metadata events from disk."""
        with open(self.path, "r") as f:
            try:
                self.events = json.load(f)
            except json.JSONDecodeError:
                logger.warning("Metadata file %s is corrupt; starting a new event log", self.path)
                self.events = []
