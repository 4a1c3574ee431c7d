"""Kinematics from tracked angles and identification of load and motor parameters."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares, nnls
from scipy.signal import savgol_filter
from scipy.stats import linregress

from . import corona
from .corona import ElectricalParams, RotorBody
from .dynamics import LoadModel, VoltageSchedule
from .errors import FitError, ParameterError
from .traces import KinematicsTrace, SpeedTrace, ingest_trace  # noqa: F401  (re-export)

DEFAULT_WINDOW = 41
DEFAULT_DEGREE = 2
OMEGA_FLOOR = 5.0

SIGMA_BOUNDS = (1e-11, 1e-6)
SIGMA_STARTS = (1e-10, 1e-9, 1e-8, 1e-7)
ALPHA_STARTS = (0.0, 0.2, 0.4)
ALPHA_LIMIT = math.pi / 2 - 1e-6


@dataclass
class FitReport:
    names: tuple
    values: np.ndarray
    units: tuple
    residual_rms: float
    iterations: int
    converged: bool
    covariance: np.ndarray | None = None
    reliable: bool = True
    message: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.converged:
            self.reliable = False

    def as_dict(self) -> dict:
        return dict(zip(self.names, (float(v) for v in self.values)))

    def std_errors(self) -> np.ndarray | None:
        if self.covariance is None:
            return None
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    def summary(self) -> str:
        errs = self.std_errors()
        lines = []
        for i, (name, value, unit) in enumerate(zip(self.names, self.values, self.units)):
            err = "" if errs is None else f" +/- {errs[i]:.4g}"
            lines.append(f"{name} = {value:.4g}{err} {unit}".rstrip())
        lines.append(f"residual_rms = {self.residual_rms:.4g}")
        lines.append(f"iterations = {self.iterations}, converged = {self.converged}, reliable = {self.reliable}")
        if self.message:
            lines.append(self.message)
        return "\n".join(lines)


def differentiate(trace: SpeedTrace, window: int = DEFAULT_WINDOW,
                  poly_degree: int = DEFAULT_DEGREE) -> KinematicsTrace:
    """Angular speed and acceleration by local polynomial least squares.

    Half a window is trimmed from each end, so only samples with a full
    centred window are returned.
    """
    if window % 2 == 0 or window < poly_degree + 2:
        raise ParameterError(
            f"window must be odd and at least poly_degree + 2, got window={window}, degree={poly_degree}"
        )
    if poly_degree < 2:
        raise ParameterError("poly_degree must be at least 2 to estimate acceleration")
    if len(trace) < window:
        raise ParameterError(f"trace has {len(trace)} samples, fewer than the window {window}")
    if not trace.is_uniform():
        raise ParameterError("trace sampling is not uniform")
    dt = trace.dt
    omega = savgol_filter(trace.theta, window, poly_degree, deriv=1, delta=dt, mode="interp")
    accel = savgol_filter(trace.theta, window, poly_degree, deriv=2, delta=dt, mode="interp")
    hw = window // 2
    keep = slice(hw, len(trace) - hw)
    return KinematicsTrace(trace.t[keep], omega[keep], accel[keep], window, poly_degree,
                           dict(trace.metadata))


def _schedule_of(kin: KinematicsTrace, schedule) -> VoltageSchedule:
    if schedule is not None:
        return schedule
    text = kin.metadata.get("schedule")
    if text is None:
        raise ParameterError("no drive schedule given and none stored in the trace metadata")
    return VoltageSchedule.parse(text)


def _segments(kin, schedule, powered, omega_floor, exclude):
    """Contiguous runs inside on/off intervals, clear of switching transients."""
    margin = (kin.half_window + 0.5) * (kin.t[1] - kin.t[0]) if len(kin) > 1 else 0.0
    t = kin.t
    out = []
    for start, stop, V in schedule.intervals(t_end=math.inf):
        if (V != 0.0) != powered:
            continue
        mask = (t > start + margin) & (t < stop - margin) & (np.abs(kin.omega) > omega_floor)
        for lo, hi in exclude or ():
            mask &= ~((t >= lo) & (t <= hi))
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            continue
        breaks = np.flatnonzero(np.diff(idx) > 1)
        for run in np.split(idx, breaks + 1):
            seg = kin.subset(run)
            seg.metadata["voltage_V"] = V
            out.append(seg)
    return out


def segment_spin_down(kin: KinematicsTrace, schedule: VoltageSchedule | None = None,
                      omega_floor: float = OMEGA_FLOOR, exclude=None) -> list[KinematicsTrace]:
    """Unpowered stretches where ``|omega|`` exceeds ``omega_floor``.

    ``exclude`` is an optional list of ``(t0, t1)`` intervals to drop.
    """
    return _segments(kin, _schedule_of(kin, schedule), False, omega_floor, exclude)


def segment_powered(kin: KinematicsTrace, schedule: VoltageSchedule | None = None,
                    omega_floor: float = 0.0, exclude=None) -> list[KinematicsTrace]:
    return _segments(kin, _schedule_of(kin, schedule), True, omega_floor, exclude)


def fit_load_quadratic(segments, inertia: float) -> tuple[LoadModel, FitReport]:
    """Fit ``c0 + c1 |w| + c2 w**2`` to spin-down deceleration torque.

    Without drive the measured torque ``I * d2theta/dt2`` is the negated
    load. Coefficients are constrained non-negative.
    """
    if not inertia > 0:
        raise ParameterError("inertia must be positive")
    omega = np.concatenate([s.omega for s in segments]) if segments else np.empty(0)
    accel = np.concatenate([s.alpha_dot for s in segments]) if segments else np.empty(0)
    if omega.size < 10:
        raise FitError(f"need at least 10 pooled samples, got {omega.size}")
    w = np.abs(omega)
    y = -inertia * accel * np.sign(omega)
    A = np.column_stack([np.ones_like(w), w, w * w])
    scale = np.linalg.norm(A, axis=0)
    As = A / scale
    if np.linalg.matrix_rank(As, tol=1e-10 * np.sqrt(len(w))) < 3:
        raise FitError("load design matrix is rank deficient (speed range too narrow)")
    coef_s, _ = nnls(As, y)
    coef = coef_s / scale
    resid = y - A @ coef
    dof = max(len(y) - 3, 1)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    load = LoadModel(*(float(c) for c in coef))
    report = FitReport(
        names=("c0", "c1", "c2"),
        values=coef,
        units=("N m", "N m s/rad", "N m s^2/rad^2"),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        iterations=1,
        converged=True,
        covariance=cov,
        extra={"samples": int(len(y)), "clamped": [n for n, c in zip(("c0", "c1", "c2"), coef) if c == 0.0]},
    )
    return load, report


def motor_torque_from_trace(kin: KinematicsTrace, inertia: float, load: LoadModel) -> np.ndarray:
    """``(omega, T_motor)`` rows: output torque plus the load it overcame."""
    t_motor = inertia * kin.alpha_dot + load.torque(kin.omega)
    return np.column_stack([kin.omega, t_motor])


def _start_order(n_starts: int, seed) -> list[int]:
    if seed is None:
        seed = os.environ.get("KCL_SEED")
    order = list(range(n_starts))
    if seed not in (None, ""):
        order = [int(i) for i in np.random.default_rng(int(seed)).permutation(n_starts)]
    return order


def fit_motor_params(points, body: RotorBody, known: ElectricalParams,
                     seed=None) -> tuple[ElectricalParams, FitReport]:
    """Identify conductivity, onset voltage and discharge offset.

    ``points`` is an ``(n, 3)`` array of ``(omega, T_motor, V)``. ``known``
    supplies the permittivities and gap; its other fields are ignored.
    Every start in a fixed multi-start list is run; the lowest cost wins,
    ties going to the earlier start. ``seed`` (or ``KCL_SEED``) shuffles
    the start order.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ParameterError("points must be an (n, 3) array of (omega, T_motor, V)")
    omega, t_meas, V = pts.T
    if len(np.unique(pts[:, [0, 2]], axis=0)) < 3:
        raise FitError("need at least 3 distinct (omega, V) points")
    single_voltage = len(np.unique(V)) < 2
    v_abs_min = float(np.min(np.abs(V)))
    drive_sign = -1.0 if np.median(V) < 0 else 1.0
    scale = float(np.max(np.abs(t_meas))) or 1.0

    def params_of(x):
        return replace(known, sigma=float(10.0 ** x[0]), V_onset=float(drive_sign * x[1]), alpha=float(x[2]))

    eg, er = known.eps_g, known.eps_r
    k = 2.0 * math.pi * body.L * body.R**2
    ind = 2.0 * er * eg / (eg + er)

    def model(x):
        sigma, v_on, alpha = 10.0 ** x[0], x[1], x[2]
        E = np.clip(np.abs(V) - v_on, 0.0, None) / (2.0 * body.R + 2.0 * known.G)
        xt = omega * (eg + er) / sigma
        num = ind * E * E * xt + eg * E * E * (math.sin(alpha) + xt * math.cos(alpha))
        return k * num / (1.0 + xt * xt)

    def residuals(x):
        return (model(x) - t_meas) / scale

    lower = np.array([math.log10(SIGMA_BOUNDS[0]), 0.0, -ALPHA_LIMIT])
    upper = np.array([math.log10(SIGMA_BOUNDS[1]), v_abs_min, ALPHA_LIMIT])
    starts = [np.array([math.log10(s), 0.5 * v_abs_min, a]) for s in SIGMA_STARTS for a in ALPHA_STARTS]

    best = None
    total_nfev = 0
    for rank, idx in enumerate(_start_order(len(starts), seed)):
        x0 = np.clip(starts[idx], lower, upper)
        res = least_squares(residuals, x0, bounds=(lower, upper),
                            x_scale=np.array([1.0, max(v_abs_min, 1.0) / 10, 0.1]),
                            xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=2000)
        total_nfev += res.nfev
        if res.status <= 0:
            continue
        if best is None or res.cost < best[0].cost:
            best = (res, rank)

    if best is None:
        raise FitError("no multi-start run converged")
    res = best[0]
    x = res.x
    fitted = params_of(x)
    resid_n = model(x) - t_meas
    rms = float(np.sqrt(np.mean(resid_n**2)))

    # linearised covariance in (sigma, V_onset, alpha)
    J = res.jac * scale
    dof = max(len(t_meas) - 3, 1)
    s2 = float(resid_n @ resid_n) / dof
    chain = np.diag([math.log(10.0) * fitted.sigma, drive_sign, 1.0])
    try:
        cov_x = s2 * np.linalg.inv(J.T @ J)
        cov = chain @ cov_x @ chain.T
        cond = float(np.linalg.cond(J.T @ J))
    except np.linalg.LinAlgError:
        cov, cond = None, math.inf
    at_bound = bool(np.any(np.isclose(x, lower, rtol=0, atol=1e-9)) or np.any(np.isclose(x, upper, rtol=0, atol=1e-9)))
    rel = None if cov is None else np.sqrt(np.abs(np.diag(cov))) / np.maximum(np.abs([fitted.sigma, fitted.V_onset, fitted.alpha]), 1e-300)
    wide = cov is None or not np.all(np.isfinite(cov)) or bool(np.any(rel[:2] > 0.25))
    message = []
    if single_voltage:
        wide = True
        message.append("single drive voltage: sigma and V_onset are partly confounded")
    if at_bound:
        message.append("a parameter sits on its bound")
    if wide:
        message.append("parameter covariance is wide")
    report = FitReport(
        names=("sigma", "V_onset", "alpha"),
        values=np.array([fitted.sigma, fitted.V_onset, fitted.alpha]),
        units=("S/m", "V", "rad"),
        residual_rms=rms,
        iterations=int(total_nfev),
        converged=True,
        covariance=cov,
        reliable=not (at_bound or wide),
        message="; ".join(message),
        extra={"best_start": best[1], "condition": cond, "cost": float(res.cost)},
    )
    return fitted, report


def linear_fit_speed_voltage(points) -> tuple[float, float, FitReport]:
    """Ordinary least squares of steady speed against drive magnitude."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    v = np.abs(pts[:, 0])
    w = pts[:, 1]
    if len(np.unique(v)) < 2:
        raise FitError("need at least two distinct voltages for a linear fit")
    fit = linregress(v, w)
    resid = w - (fit.slope * v + fit.intercept)
    report = FitReport(
        names=("slope", "intercept"),
        values=np.array([fit.slope, fit.intercept]),
        units=("rad/s per V", "rad/s"),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        iterations=1,
        converged=True,
        extra={"r_squared": float(fit.rvalue**2)},
    )
    return float(fit.slope), float(fit.intercept), report
