"""Lambda-system building blocks: bright/dark frames, segments and their Hamiltonians.

All quantities are dimensionless: frequencies in units of a reference Rabi
frequency, times in its inverse. Basis order is (|0>, |1>, |e>).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Tuple

import numpy as np

from src.config import HERMITIAN_TOL
from src.errors import DegenerateSegment, InvalidArgument, InvalidOperator
from src.operators.matrix_algebra import (
    LEVEL_E,
    as_operator,
    is_hermitian,
    require_normalized,
    wrap_angle,
)


_ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class BrightFrame:
    """Bright state |b> = cos(theta)|0> + sin(theta) e^{i phi}|1>."""

    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise InvalidArgument("BrightFrame angles must be finite")
        if not (-_ANGLE_SLACK <= self.theta <= math.pi / 2 + _ANGLE_SLACK):
            raise InvalidArgument(f"theta must lie in [0, pi/2], got {self.theta}")
        object.__setattr__(self, "theta", min(max(float(self.theta), 0.0), math.pi / 2))
        object.__setattr__(self, "phi", wrap_angle(self.phi))


@dataclass(frozen=True)
class SegmentSpec:
    """One constant-Hamiltonian pulse segment.

    ``laser_phase`` is the phase of the coupling e^{i phi_L}|e><b|; ``delta`` is
    the common detuning of both transitions.
    """

    frame: BrightFrame
    omega: float
    delta: float
    laser_phase: float
    tau: float

    def __post_init__(self) -> None:
        for name in ("omega", "delta", "laser_phase", "tau"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgument(f"SegmentSpec.{name} must be finite")
        if self.omega < 0:
            raise InvalidArgument(f"Rabi amplitude must be >= 0, got {self.omega}")
        if self.tau <= 0:
            raise InvalidArgument(f"Segment duration must be > 0, got {self.tau}")
        object.__setattr__(self, "laser_phase", wrap_angle(self.laser_phase))

    @property
    def effective_frequency(self) -> float:
        return math.hypot(self.delta / 2.0, self.omega)

    @property
    def rotation_angle(self) -> float:
        """Effective Bloch-sphere rotation angle sqrt((delta/2)^2 + omega^2) * tau."""
        return self.effective_frequency * self.tau

    @property
    def eta(self) -> float:
        """atan2(2 omega, delta); zero for free evolution (omega == 0)."""
        if self.omega == 0.0:
            return 0.0
        return math.atan2(2.0 * self.omega, self.delta)

    @property
    def cos_eta(self) -> float:
        """delta / (2 W), keeping the sign of delta for free evolution."""
        w = self.effective_frequency
        return 1.0 if w == 0.0 else self.delta / (2.0 * w)

    @property
    def sin_eta(self) -> float:
        w = self.effective_frequency
        return 0.0 if w == 0.0 else self.omega / w

    def with_changes(self, **changes: Any) -> "SegmentSpec":
        values = {
            "frame": self.frame,
            "omega": self.omega,
            "delta": self.delta,
            "laser_phase": self.laser_phase,
            "tau": self.tau,
        }
        values.update(changes)
        return SegmentSpec(**values)

    def to_dict(self) -> Dict[str, float]:
        return {
            "theta": self.frame.theta,
            "phi": self.frame.phi,
            "omega": self.omega,
            "delta": self.delta,
            "laser_phase": self.laser_phase,
            "tau": self.tau,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SegmentSpec":
        missing = [k for k in ("theta", "omega", "delta", "tau") if k not in data]
        if missing:
            raise InvalidArgument(f"Segment is missing fields: {missing}")
        return cls(
            frame=BrightFrame(float(data["theta"]), float(data.get("phi", 0.0))),
            omega=float(data["omega"]),
            delta=float(data["delta"]),
            laser_phase=float(data.get("laser_phase", 0.0)),
            tau=float(data["tau"]),
        )


def bright_dark(frame: BrightFrame) -> Tuple[np.ndarray, np.ndarray]:
    """Return (|b>, |d>) with |d> = sin(theta)|0> - cos(theta) e^{i phi}|1>."""
    c, s = math.cos(frame.theta), math.sin(frame.theta)
    phase = np.exp(1j * frame.phi)
    bright = np.array([c, s * phase, 0.0], dtype=complex)
    dark = np.array([s, -c * phase, 0.0], dtype=complex)
    return bright, dark


def from_physical(
    omega_e0: float,
    omega_e1: float,
    phi0: float,
    phi1: float,
    delta: float,
    tau: float,
) -> SegmentSpec:
    """Build a segment from the two real Rabi amplitudes and laser phases."""
    if omega_e0 < 0 or omega_e1 < 0:
        raise InvalidArgument("Rabi amplitudes must be non-negative")
    if omega_e0 == 0 and omega_e1 == 0:
        raise DegenerateSegment("Both Rabi amplitudes vanish; no bright state is defined")
    frame = BrightFrame(theta=math.atan2(omega_e1, omega_e0), phi=phi0 - phi1)
    return SegmentSpec(
        frame=frame,
        omega=math.hypot(omega_e0, omega_e1),
        delta=delta,
        laser_phase=phi0,
        tau=tau,
    )


def rabi_amplitudes(seg: SegmentSpec) -> Tuple[complex, complex]:
    """Complex couplings (Omega_0, Omega_1) of |e><0| and |e><1|."""
    coupling = seg.omega * np.exp(1j * seg.laser_phase)
    omega_0 = coupling * math.cos(seg.frame.theta)
    omega_1 = coupling * math.sin(seg.frame.theta) * np.exp(-1j * seg.frame.phi)
    return complex(omega_0), complex(omega_1)


def hamiltonian(seg: SegmentSpec) -> np.ndarray:
    """Rotating-frame H = delta|e><e| + omega(e^{i phi_L}|e><b| + h.c.)."""
    omega_0, omega_1 = rabi_amplitudes(seg)
    h = np.zeros((3, 3), dtype=complex)
    h[LEVEL_E, LEVEL_E] = seg.delta
    h[LEVEL_E, 0] = omega_0
    h[LEVEL_E, 1] = omega_1
    h[0, LEVEL_E] = np.conj(omega_0)
    h[1, LEVEL_E] = np.conj(omega_1)
    return h


def segment_from_hamiltonian(h: np.ndarray, tau: float) -> SegmentSpec:
    """Recover the segment parameters of a matrix of the rotating-frame form.

    Raises InvalidOperator when ``h`` is not Hermitian or couples |0>, |1>
    directly.
    """
    h = as_operator(h)
    if h.shape != (3, 3) or not is_hermitian(h):
        raise InvalidOperator("Expected a 3x3 Hermitian Hamiltonian")
    scale = max(np.linalg.norm(h), 1.0)
    if np.max(np.abs(h[:2, :2])) > HERMITIAN_TOL * scale:
        raise InvalidOperator("Hamiltonian couples the computational levels directly")

    delta = float(h[LEVEL_E, LEVEL_E].real)
    c0, c1 = h[LEVEL_E, 0], h[LEVEL_E, 1]
    omega = float(math.hypot(abs(c0), abs(c1)))
    if omega <= HERMITIAN_TOL * scale:
        return SegmentSpec(BrightFrame(0.0, 0.0), 0.0, delta, 0.0, tau)

    theta = math.atan2(abs(c1), abs(c0))
    if abs(c0) > HERMITIAN_TOL * scale:
        laser_phase = float(np.angle(c0))
        phi = laser_phase - float(np.angle(c1)) if abs(c1) > HERMITIAN_TOL * scale else 0.0
    else:
        laser_phase = float(np.angle(c1))
        phi = 0.0
    return SegmentSpec(BrightFrame(theta, phi), omega, delta, laser_phase, tau)


def frame_change(delta1: float, delta2: float, tau: float) -> np.ndarray:
    """V_2(tau) V_1^dagger(tau) = diag(e^{i(d2-d1)tau}, e^{i(d2-d1)tau}, 1)."""
    phase = np.exp(1j * (delta2 - delta1) * tau)
    return np.diag([phase, phase, 1.0]).astype(complex)


def decompose(state: np.ndarray, frame: BrightFrame) -> Tuple[complex, complex, complex]:
    """Coefficients (c_e, c_b, c_d) of ``state`` in the basis (|e>, |b>, |d>)."""
    state = require_normalized(state, 3)
    bright, dark = bright_dark(frame)
    c_e = complex(state[LEVEL_E])
    c_b = complex(np.vdot(bright, state))
    c_d = complex(np.vdot(dark, state))
    return c_e, c_b, c_d


def frame_dict(frame: BrightFrame) -> Dict[str, float]:
    return asdict(frame)
