"""Rotor-angle time series and their CSV representation.

File layout::

    # voltage_kV=-29
    # fps=2000
    t_s,theta_rad
    0.0,0.0
    ...

The header is ``t_s,theta_rad`` or ``frame,theta_deg`` (``frame,theta_rad``
and ``t_s,theta_deg`` are accepted too). Frame-indexed files need a frame
rate, either from the ``# fps=`` comment or passed explicitly. A third
``omega_rad_s`` column is optional. Any ``# key=value`` comment line is kept
as metadata.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataQualityError, TraceFormatError

TIME_COLUMNS = ("t_s", "frame")
ANGLE_COLUMNS = {"theta_rad": "rad", "theta_deg": "deg"}
OMEGA_COLUMN = "omega_rad_s"

# An unwrapped per-frame step beyond this is treated as tracking failure.
MAX_STEP = math.pi / 2


@dataclass
class SpeedTrace:
    t: np.ndarray
    theta: np.ndarray
    omega: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        if self.omega is not None:
            self.omega = np.asarray(self.omega, dtype=float)
        if self.t.shape != self.theta.shape or self.t.ndim != 1:
            raise TraceFormatError("t and theta must be 1-D arrays of equal length")
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise TraceFormatError("timestamps must be strictly increasing")

    def __len__(self):
        return len(self.t)

    @property
    def voltage(self) -> float | None:
        """Drive voltage in volts, from the ``voltage_kV`` metadata key."""
        v = self.metadata.get("voltage_kV")
        return None if v is None else float(v) * 1e3

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def is_uniform(self, tol: float = 1e-9) -> bool:
        if len(self.t) < 3:
            return True
        steps = np.diff(self.t)
        return bool(np.max(np.abs(steps - steps[0])) <= tol)


@dataclass
class KinematicsTrace:
    t: np.ndarray
    omega: np.ndarray
    alpha_dot: np.ndarray
    window: int
    poly_degree: int
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def half_window(self) -> int:
        return self.window // 2

    def subset(self, mask) -> "KinematicsTrace":
        return KinematicsTrace(
            self.t[mask], self.omega[mask], self.alpha_dot[mask],
            self.window, self.poly_degree, dict(self.metadata),
        )


def unwrap_angles(theta: np.ndarray) -> np.ndarray:
    """Remove 2*pi jumps, assuming less than half a turn per sample.

    Raises DataQualityError for a jump of at least pi that a whole revolution
    does not explain (the corrected step would still exceed a quarter turn).
    """
    theta = np.asarray(theta, dtype=float)
    if len(theta) < 2:
        return theta.copy()
    step = np.diff(theta)
    corrected = step - 2 * np.pi * np.round(step / (2 * np.pi))
    bad = np.flatnonzero((np.abs(step) >= np.pi) & (np.abs(corrected) > MAX_STEP))
    if bad.size:
        i = int(bad[0])
        raise DataQualityError(
            f"angle jump of {step[i]:.4g} rad between samples {i} and {i + 1} "
            "is not explained by a full revolution"
        )
    return np.concatenate([[theta[0]], theta[0] + np.cumsum(corrected)])


def _parse_metadata(line: str, metadata: dict) -> None:
    body = line.lstrip("#").strip()
    if "=" not in body:
        return
    key, value = (s.strip() for s in body.split("=", 1))
    try:
        metadata[key] = float(value)
    except ValueError:
        metadata[key] = value


def parse_trace(text: str, angle_unit: str | None = None, frame_rate: float | None = None,
                source: str = "<string>") -> SpeedTrace:
    metadata: dict = {}
    header = None
    rows = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            _parse_metadata(line, metadata)
            continue
        if header is None:
            header = [c.strip() for c in line.split(",")]
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise TraceFormatError(f"{source}:{lineno}: expected {len(header)} fields, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise TraceFormatError(f"{source}:{lineno}: {exc}") from None

    if header is None:
        raise TraceFormatError(f"{source}: empty trace file")
    if len(header) not in (2, 3) or header[0] not in TIME_COLUMNS or header[1] not in ANGLE_COLUMNS:
        raise TraceFormatError(f"{source}: unrecognised header {','.join(header)!r}")
    if len(header) == 3 and header[2] != OMEGA_COLUMN:
        raise TraceFormatError(f"{source}: unrecognised third column {header[2]!r}")
    if not rows:
        raise TraceFormatError(f"{source}: trace has a header but no samples")

    data = np.array(rows)
    unit = angle_unit or ANGLE_COLUMNS[header[1]]
    if unit not in ("rad", "deg"):
        raise TraceFormatError(f"angle unit must be 'rad' or 'deg', got {unit!r}")
    theta = np.radians(data[:, 1]) if unit == "deg" else data[:, 1]

    if header[0] == "frame":
        fps = frame_rate or metadata.get("fps")
        if not fps:
            raise TraceFormatError(f"{source}: frame-indexed trace needs a frame rate")
        t = data[:, 0] / float(fps)
        metadata.setdefault("fps", float(fps))
    else:
        t = data[:, 0]
        if frame_rate:
            metadata.setdefault("fps", float(frame_rate))
    if len(t) > 1 and not np.all(np.diff(t) > 0):
        raise TraceFormatError(f"{source}: time column is not strictly increasing")

    omega = data[:, 2] if len(header) == 3 else None
    return SpeedTrace(t, unwrap_angles(theta), omega, metadata)


def ingest_trace(path, angle_unit: str | None = None, frame_rate: float | None = None) -> SpeedTrace:
    """Read a trace CSV, converting angles to unwrapped radians."""
    path = Path(path)
    text = path.read_bytes().decode("utf-8")
    return parse_trace(text, angle_unit, frame_rate, source=str(path))


def format_trace(trace: SpeedTrace, include_omega: bool = True) -> str:
    lines = []
    for key, value in trace.metadata.items():
        lines.append(f"# {key}={value!r}" if isinstance(value, float) else f"# {key}={value}")
    with_omega = include_omega and trace.omega is not None
    lines.append("t_s,theta_rad,omega_rad_s" if with_omega else "t_s,theta_rad")
    if with_omega:
        lines.extend(f"{t!r},{th!r},{w!r}" for t, th, w in
                     zip(trace.t.tolist(), trace.theta.tolist(), trace.omega.tolist()))
    else:
        lines.extend(f"{t!r},{th!r}" for t, th in zip(trace.t.tolist(), trace.theta.tolist()))
    return "\n".join(lines) + "\n"


def write_trace(trace: SpeedTrace, path, include_omega: bool = True) -> None:
    Path(path).write_text(format_trace(trace, include_omega), encoding="utf-8", newline="\n")


def format_table(rows, header: str, comments: dict | None = None) -> str:
    """Full-precision CSV table with ``# key=value`` comment lines on top."""
    out = [f"# {k}={v}" for k, v in (comments or {}).items()]
    out.append(header)
    out.extend(",".join(repr(float(x)) for x in row) for row in np.asarray(rows).tolist())
    return "\n".join(out) + "\n"
