"""Kresling cylinder fold geometry.

Lengths are in millimetres and angles in radians throughout. A cylinder is
described by the inscribed radius ``R`` of its polygonal cross-section, the
number of sides ``N`` and the base-to-diagonal angle ``theta0`` of the
parallelogram unit cell; ``M`` cells are stacked axially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import GeometryError, ParameterError

N_MIN, N_MAX = 3, 255
M_MIN, M_MAX = 1, 64

Role = Literal["rotor", "stator"]


@dataclass(frozen=True)
class KreslingCell:
    R: float
    N: int
    theta0: float

    def __post_init__(self):
        if not (isinstance(self.N, int) and N_MIN <= self.N <= N_MAX):
            raise ParameterError(f"N must be an integer in [{N_MIN}, {N_MAX}], got {self.N!r}")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ParameterError(f"R must be positive, got {self.R!r}")
        upper = math.pi - 2 * math.pi / self.N
        if not (0 <= self.theta0 < upper):
            raise ParameterError(
                f"theta0 must lie in [0, {upper:.6g}) rad for N={self.N}, got {self.theta0!r}"
            )

    @classmethod
    def from_degrees(cls, R: float, N: int, theta0_deg: float) -> "KreslingCell":
        return cls(R=float(R), N=int(N), theta0=math.radians(theta0_deg))


@dataclass(frozen=True)
class CylinderSpec:
    cell: KreslingCell
    M: int
    role: Role = "rotor"

    def __post_init__(self):
        if not (isinstance(self.M, int) and M_MIN <= self.M <= M_MAX):
            raise ParameterError(f"M must be an integer in [{M_MIN}, {M_MAX}], got {self.M!r}")
        if self.role not in ("rotor", "stator"):
            raise ParameterError(f"role must be 'rotor' or 'stator', got {self.role!r}")


@dataclass(frozen=True)
class DeployedGeometry:
    a: float
    theta_max: float
    h: float
    body_height: float
    circumradius: float


@dataclass(frozen=True)
class NestingReport:
    inscribed_gap: float
    circum_gap: float
    feasible: bool


def side_length(cell: KreslingCell) -> float:
    """Polygon side length ``2 R sin(pi/N)``."""
    return 2.0 * cell.R * math.sin(math.pi / cell.N)


def max_fold_angle(cell: KreslingCell) -> float:
    """Angle between consecutive polygons in the folded configuration.

    Raises GeometryError when it falls below ``theta0``: the cell would then
    have no real height. Equality is the flat-folded limit and is allowed.
    """
    theta_max = math.pi - 2.0 * math.pi / cell.N - cell.theta0
    if theta_max < cell.theta0:
        raise GeometryError(
            f"theta_max={math.degrees(theta_max):.4g} deg is below "
            f"theta0={math.degrees(cell.theta0):.4g} deg; no real cell height"
        )
    return theta_max


def cell_height(cell: KreslingCell) -> float:
    theta_max = max_fold_angle(cell)
    arg = 2.0 * (math.cos(cell.theta0) - math.cos(theta_max))
    # cos is decreasing on [0, pi], so arg >= 0 whenever theta0 <= theta_max;
    # clamp the rounding noise at the flat-folded limit
    return cell.R * math.sqrt(max(arg, 0.0))


def circumradius(cell: KreslingCell) -> float:
    return cell.R / math.cos(math.pi / cell.N)


def deployed_geometry(spec: CylinderSpec) -> DeployedGeometry:
    cell = spec.cell
    h = cell_height(cell)
    if h <= 0:
        raise GeometryError("cell height is zero (flat-folded); body cannot deploy")
    return DeployedGeometry(
        a=side_length(cell),
        theta_max=max_fold_angle(cell),
        h=h,
        body_height=spec.M * h,
        circumradius=circumradius(cell),
    )


def expansion_metrics(stowed_height: float, deployed_height: float) -> float:
    """Deployed-to-stowed body height ratio (unrounded)."""
    if not (stowed_height > 0 and deployed_height > 0):
        raise ParameterError(
            f"heights must be positive, got stowed={stowed_height!r}, deployed={deployed_height!r}"
        )
    return deployed_height / stowed_height


def format_ratio(ratio: float, sig: int = 2) -> str:
    """Render a ratio as ``'2.5:1'`` with ``sig`` significant figures."""
    return f"{float(f'{ratio:.{sig}g}'):g}:1"


def nesting_check(rotor: CylinderSpec, stator: CylinderSpec) -> NestingReport:
    """Radial clearance of a rotor spinning inside a stator.

    The rotor's vertices (its circumradius) must clear the stator's innermost
    faces (its inscribed radius).
    """
    inscribed_gap = stator.cell.R - circumradius(rotor.cell)
    circum_gap = stator.cell.R - rotor.cell.R
    return NestingReport(inscribed_gap, circum_gap, inscribed_gap > 0)
