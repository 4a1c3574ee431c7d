"""Rotor mechanics: load curve, time integration and operating points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import corona
from .corona import ElectricalParams, RotorBody
from .errors import ParameterError
from .traces import SpeedTrace

DEFAULT_DT = 0.5e-3  # one frame at 2000 fps


@dataclass(frozen=True)
class LoadModel:
    """Bearing friction and windage: ``c0 + c1 |w| + c2 w**2``, opposing motion."""

    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0

    def __post_init__(self):
        for name in ("c0", "c1", "c2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ParameterError(f"load coefficient {name} must be >= 0, got {value!r}")

    def magnitude(self, omega):
        w = abs(omega) if np.ndim(omega) == 0 else np.abs(omega)
        return self.c0 + self.c1 * w + self.c2 * w * w

    def torque(self, omega):
        """Signed load torque; zero at rest."""
        return np.sign(omega) * self.magnitude(omega)


@dataclass(frozen=True)
class VoltageSchedule:
    """Piecewise-constant drive: ``steps[i] = (t_start, V)``."""

    steps: tuple

    def __init__(self, steps: Sequence[tuple[float, float]]):
        steps = tuple((float(t), float(v)) for t, v in steps)
        if not steps:
            raise ParameterError("voltage schedule needs at least one step")
        if steps[0][0] != 0.0:
            raise ParameterError("voltage schedule must start at t=0")
        times = [t for t, _ in steps]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ParameterError("schedule start times must be strictly increasing")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def constant(cls, V: float) -> "VoltageSchedule":
        return cls([(0.0, V)])

    @classmethod
    def on_off(cls, V: float, t_off: float) -> "VoltageSchedule":
        return cls([(0.0, V), (t_off, 0.0)])

    def voltage_at(self, t: float) -> float:
        V = self.steps[0][1]
        for start, v in self.steps:
            if start > t:
                break
            V = v
        return V

    def intervals(self, t_end: float = math.inf):
        """Yield ``(t_start, t_stop, V)`` for each step."""
        for i, (start, v) in enumerate(self.steps):
            stop = self.steps[i + 1][0] if i + 1 < len(self.steps) else t_end
            yield start, stop, v

    def format(self) -> str:
        """Compact ``t:V;t:V`` text form, stored in trace metadata."""
        return ";".join(f"{t!r}:{v!r}" for t, v in self.steps)

    @classmethod
    def parse(cls, text: str) -> "VoltageSchedule":
        try:
            steps = [tuple(float(x) for x in part.split(":")) for part in str(text).split(";")]
        except ValueError:
            raise ParameterError(f"malformed schedule {text!r}") from None
        if any(len(s) != 2 for s in steps):
            raise ParameterError(f"malformed schedule {text!r}")
        return cls(steps)

    def switch_times(self) -> list[float]:
        return [t for t, _ in self.steps[1:]]


@dataclass(frozen=True)
class OperatingPoint:
    omega_star: float
    torque_star: float
    stable: bool


def _static_net(t_motor: float, c0: float) -> float:
    # at rest the friction can hold up to c0 against the motor
    return t_motor - math.copysign(min(c0, abs(t_motor)), t_motor)


def net_torque(params: ElectricalParams, body: RotorBody, load: LoadModel, V: float, omega: float) -> float:
    """Motor torque minus load torque at a single speed."""
    t_motor = float(corona.torque(params, body, V, omega))
    if omega == 0.0:
        return _static_net(t_motor, load.c0)
    return t_motor - math.copysign(load.magnitude(omega), omega)


def simulate(
    params: ElectricalParams,
    body: RotorBody,
    load: LoadModel,
    schedule: VoltageSchedule,
    dt: float = DEFAULT_DT,
    t_end: float = 1.0,
    omega0: float = 0.0,
    theta0: float = 0.0,
    perturbation: Callable[[float], float] | None = None,
) -> SpeedTrace:
    """Integrate rotor angle and speed with fixed-step RK4.

    The voltage is held at its value at the start of each step. Friction
    locks the rotor when the speed crosses zero and the motor torque at rest
    cannot overcome ``c0``. ``perturbation(t)`` adds an external torque, for
    probing estimator robustness.
    """
    if not dt > 0 or not t_end > 0:
        raise ParameterError("dt and t_end must be positive")
    if dt >= t_end:
        raise ParameterError(f"dt={dt} must be smaller than t_end={t_end}")
    n = int(round(t_end / dt))
    inertia = body.inertia
    c0, c1, c2 = load.c0, load.c1, load.c2
    curves: dict[float, Callable] = {}

    t_out = np.empty(n + 1)
    theta_out = np.empty(n + 1)
    omega_out = np.empty(n + 1)
    theta, omega = float(theta0), float(omega0)
    t_out[0], theta_out[0], omega_out[0] = 0.0, theta, omega

    for k in range(n):
        t = k * dt
        V = schedule.voltage_at(t)
        curve = curves.get(V)
        if curve is None:
            curve = curves[V] = corona.motor_curve(params, body, V)
        extra = perturbation(t) if perturbation else 0.0
        t_rest = curve(0.0) + extra
        if omega == 0.0:
            if abs(t_rest) <= c0:
                t_out[k + 1], theta_out[k + 1], omega_out[k + 1] = (k + 1) * dt, theta, 0.0
                continue
            sign = math.copysign(1.0, t_rest)
        else:
            sign = math.copysign(1.0, omega)

        # friction direction is frozen over the step so RK4 sees a smooth field
        def accel(w):
            return (curve(w) + extra - sign * c0 - c1 * w - c2 * w * abs(w)) / inertia

        k1 = accel(omega)
        w2 = omega + 0.5 * dt * k1
        k2 = accel(w2)
        w3 = omega + 0.5 * dt * k2
        k3 = accel(w3)
        w4 = omega + dt * k3
        k4 = accel(w4)
        new_omega = omega + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        theta += dt / 6.0 * (omega + 2.0 * w2 + 2.0 * w3 + w4)

        if new_omega * sign < 0.0 and abs(t_rest) <= c0:
            new_omega = 0.0
        omega = new_omega
        t_out[k + 1] = (k + 1) * dt
        theta_out[k + 1] = theta
        omega_out[k + 1] = omega

    meta = {"fps": 1.0 / dt}
    drive = [v for _, v in schedule.steps if v != 0.0]
    if len(set(drive)) == 1:
        meta["voltage_kV"] = drive[0] / 1e3
    meta["schedule"] = schedule.format()
    return SpeedTrace(t_out, theta_out, omega_out, meta)


def steady_state(
    params: ElectricalParams,
    body: RotorBody,
    load: LoadModel,
    V: float,
    omega_hi: float | None = None,
    samples: int = 2000,
) -> OperatingPoint | None:
    """Highest-speed intersection of motor and load curves on ``(0, omega_hi]``.

    ``omega_hi`` defaults to ten charge-relaxation rates. Returns None when
    the curves do not cross.
    """
    if corona.below_onset(params, V):
        return None
    tau = corona.time_constant(params)
    omega_hi = 10.0 / tau if omega_hi is None else omega_hi
    curve = corona.motor_curve(params, body, V)

    def excess(w):
        return curve(w) - load.magnitude(w)

    grid = np.linspace(0.0, omega_hi, samples + 1)
    grid[0] = omega_hi * 1e-9
    values = np.array([excess(w) for w in grid])
    crossings = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)
    if crossings.size == 0:
        return None
    i = int(crossings[-1])
    lo, hi = grid[i], grid[i + 1]
    if values[i + 1] == 0.0:
        w_star = hi
    elif values[i] == 0.0:
        w_star = lo
    else:
        w_star = brentq(excess, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)
    h = max(1e-6 * w_star, 1e-9)
    slope = (excess(w_star + h) - excess(w_star - h)) / (2 * h)
    return OperatingPoint(float(w_star), float(curve(w_star)), bool(slope < 0))


@dataclass
class VoltageSweep:
    rows: np.ndarray  # (V, omega_star)
    skipped: list


def voltage_sweep_steady_state(params, body, load, V_list) -> VoltageSweep:
    """Steady-state speed per drive voltage; voltages without one are skipped."""
    if len(V_list) == 0:
        raise ParameterError("voltage list is empty")
    rows, skipped = [], []
    for V in V_list:
        op = steady_state(params, body, load, V)
        if op is None:
            skipped.append(V)
        else:
            rows.append((V, op.omega_star))
    return VoltageSweep(np.array(rows, dtype=float).reshape(-1, 2), skipped)
