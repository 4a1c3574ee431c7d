"""Quasi-static electrostatic induction model of a two-terminal corona motor.

The rotor is a dielectric cylinder of radius ``R`` in a uniform background
field ``E0``. The gap has conductivity ``sigma`` and permittivity ``eps_g``;
the rotor has permittivity ``eps_r``. Corona discharge adds a surface current
``Jc`` whose pattern is rotated by ``alpha`` against the field axis, which is
what gives the motor a starting torque and a preferred direction.

All quantities are SI. Drive and onset voltages are signed (the prototype is
driven negative); the effective field uses their magnitudes, so torque sign is
carried only by ``alpha`` and ``omega``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import epsilon_0 as EPS0
from scipy.optimize import minimize_scalar

from .errors import ParameterError


@dataclass(frozen=True)
class ElectricalParams:
    sigma: float
    eps_g: float = EPS0
    eps_r: float = EPS0
    alpha: float = 0.0
    V_onset: float = 0.0
    G: float = 3.5e-3

    def __post_init__(self):
        for name in ("sigma", "eps_g", "eps_r", "G"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive, got {value!r}")
        if not abs(self.alpha) < math.pi / 2:
            raise ParameterError(f"|alpha| must be below pi/2, got {self.alpha!r}")
        if not math.isfinite(self.V_onset):
            raise ParameterError("V_onset must be finite")


@dataclass(frozen=True)
class RotorBody:
    R: float
    L: float
    inertia: float

    def __post_init__(self):
        for name in ("R", "L", "inertia"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class FieldSolution:
    A_hat: complex
    B_hat: complex
    E0: float
    J_c_over_sigma: float
    tau: float


@dataclass(frozen=True)
class SurfaceChargeProfile:
    phi: np.ndarray
    rho: np.ndarray

    @property
    def grid_size(self) -> int:
        return len(self.phi)


# Prototype values used in the bench tests (sigma as fitted for ionised air).
PROTOTYPE_PARAMS = ElectricalParams(
    sigma=2e-9, eps_g=EPS0, eps_r=EPS0, alpha=0.15, V_onset=-10.5e3, G=3.5e-3
)
PROTOTYPE_BODY = RotorBody(R=30e-3, L=52e-3, inertia=4.24e-6)


def below_onset(params: ElectricalParams, V: float) -> bool:
    return abs(V) <= abs(params.V_onset)


def effective_field(params: ElectricalParams, R: float, V: float) -> float:
    """Effective drive field ``(|V| - |V_onset|) / (2R + 2G)`` in V/m.

    The same value stands in for both the background field and the corona
    drive ratio ``Jc/sigma``. Returns 0 at or below onset; use
    :func:`below_onset` to tell that case apart.
    """
    if below_onset(params, V):
        return 0.0
    return (abs(V) - abs(params.V_onset)) / (2.0 * R + 2.0 * params.G)


def time_constant(params: ElectricalParams) -> float:
    """Charge-relaxation time ``(eps_r + eps_g) / sigma``."""
    return (params.eps_r + params.eps_g) / params.sigma


def dipole_coefficients(params, R, E0, Jc_over_sigma, omega) -> FieldSolution:
    """Steady-state dipole coefficient ``A_hat`` and interior field ``B_hat``.

    ``A_hat`` solves the rotor-surface charge balance together with potential
    continuity; ``B_hat = E0 - A_hat / R**2``.
    """
    sigma, eg, er = params.sigma, params.eps_g, params.eps_r
    Jc = sigma * Jc_over_sigma
    num = -E0 * complex(sigma, omega * (eg - er)) + Jc * cmath.exp(-1j * params.alpha)
    A_hat = R**2 * num / complex(sigma, omega * (eg + er))
    B_hat = E0 - A_hat / R**2
    return FieldSolution(A_hat, B_hat, float(E0), float(Jc_over_sigma), time_constant(params))


def surface_charge(params, R, E0, Jc_over_sigma, omega, grid_size=360) -> SurfaceChargeProfile:
    """Rotor surface charge density sampled on ``grid_size`` uniform angles."""
    if grid_size < 8:
        raise ParameterError(f"grid_size must be at least 8, got {grid_size}")
    tau = time_constant(params)
    x = omega * tau
    a = params.alpha
    phi = 2.0 * np.pi * np.arange(grid_size) / grid_size
    corona = -(params.eps_g + params.eps_r) * Jc_over_sigma * (np.cos(phi - a) + x * np.sin(phi - a))
    induced = -2.0 * params.eps_r * E0 * (np.cos(phi) + x * np.sin(phi))
    return SurfaceChargeProfile(phi, (corona + induced) / (1.0 + x * x))


def field_torque(params, body, E0, Jc_over_sigma, omega):
    """Torque for explicit background field and corona drive ratio.

    Works elementwise on arrays of ``omega``. Positive torque is the
    self-start direction when ``alpha > 0``.
    """
    eg, er = params.eps_g, params.eps_r
    x = omega * time_constant(params)
    induction = 2.0 * er * eg / (eg + er) * E0 * E0 * x
    corona = eg * E0 * Jc_over_sigma * (math.sin(params.alpha) + x * math.cos(params.alpha))
    return 2.0 * math.pi * body.L * body.R**2 * (induction + corona) / (1.0 + x * x)


def torque(params: ElectricalParams, body: RotorBody, V: float, omega):
    """Motor torque (N m) at drive voltage ``V`` and speed ``omega``."""
    E = effective_field(params, body.R, V)
    if E == 0.0:
        return np.zeros_like(omega, dtype=float) if np.ndim(omega) else 0.0
    return field_torque(params, body, E, E, omega)


def field_max_torque(params, body, E0, Jc_over_sigma) -> float:
    eg, er = params.eps_g, params.eps_r
    return math.pi * body.L * body.R**2 * (
        2.0 * er * eg * E0 * E0 / (er + eg)
        + eg * E0 * Jc_over_sigma * (1.0 + math.sin(params.alpha))
    )


def max_torque(params: ElectricalParams, body: RotorBody, V: float) -> float:
    """Closed-form peak torque.

    Exact as the maximum over speed only when ``alpha == 0``; for small
    offsets it slightly overestimates (see :func:`numeric_max_torque`).
    """
    E = effective_field(params, body.R, V)
    if E == 0.0:
        return 0.0
    return field_max_torque(params, body, E, E)


def numeric_max_torque(params, body, V, E0=None, Jc_over_sigma=None):
    """Maximum of the torque-speed curve over ``omega >= 0`` found numerically.

    Returns ``(omega_at_max, torque_max)``. ``E0``/``Jc_over_sigma`` override
    the effective-field closure when given.
    """
    if E0 is None:
        E0 = Jc_over_sigma = effective_field(params, body.R, V)
    elif Jc_over_sigma is None:
        Jc_over_sigma = E0
    if E0 == 0.0 and Jc_over_sigma == 0.0:
        return 0.0, 0.0
    tau = time_constant(params)
    grid = np.linspace(0.0, 20.0 / tau, 4001)
    values = field_torque(params, body, E0, Jc_over_sigma, grid)
    k = int(np.argmax(values))
    if k == 0:
        return 0.0, float(values[0])
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(
        lambda w: -field_torque(params, body, E0, Jc_over_sigma, w),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12 / tau},
    )
    return float(res.x), float(-res.fun)


def torque_speed_sweep(params, body, V, omega_range, steps) -> np.ndarray:
    """Tabulate ``(omega, torque)`` rows on a uniform speed grid."""
    lo, hi = omega_range
    if not hi > lo:
        raise ParameterError(f"empty speed range [{lo}, {hi}]")
    if steps < 2:
        raise ParameterError(f"steps must be at least 2, got {steps}")
    omega = np.linspace(lo, hi, int(steps))
    return np.column_stack([omega, torque(params, body, V, omega)])


def motor_curve(params: ElectricalParams, body: RotorBody, V: float):
    """Return a scalar ``omega -> torque`` callable with the field precomputed.

    Used inside time-stepping loops where per-call overhead matters.
    """
    E = effective_field(params, body.R, V)
    if E == 0.0:
        return lambda omega: 0.0
    tau = time_constant(params)
    eg, er = params.eps_g, params.eps_r
    k = 2.0 * math.pi * body.L * body.R**2
    c_ind = 2.0 * er * eg / (eg + er) * E * E
    c_sin = eg * E * E * math.sin(params.alpha)
    c_cos = eg * E * E * math.cos(params.alpha)

    def curve(omega):
        x = omega * tau
        return k * (c_ind * x + c_sin + c_cos * x) / (1.0 + x * x)

    return curve
