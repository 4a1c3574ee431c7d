"""Headline performance figures of a built motor."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError
from .geometry import expansion_metrics, format_ratio

REQUIRED = (
    "T_motor_max_mNm", "volume_deployed_m3", "volume_stowed_m3",
    "mass_total_g", "mass_rotor_g", "mass_stator_g",
)


@dataclass(frozen=True)
class PerformanceReport:
    expansion_ratio: float
    torque_per_volume_deployed: float  # N m / m^3
    torque_per_volume_stowed: float
    torque_per_mass_total: float  # N m / kg
    torque_per_mass_active: float
    output_torque: float | None = None  # N m

    def lines(self) -> list[str]:
        out = [
            f"expansion ratio            {self.expansion_ratio:.4g} ({format_ratio(self.expansion_ratio)})",
            f"torque/volume (deployed)   {self.torque_per_volume_deployed:.4g} N m/m^3",
            f"torque/volume (stowed)     {self.torque_per_volume_stowed:.4g} N m/m^3",
            f"torque/mass (total)        {self.torque_per_mass_total:.4g} N m/kg",
            f"torque/mass (active)       {self.torque_per_mass_active:.4g} N m/kg",
        ]
        if self.output_torque is not None:
            out.append(f"max output torque          {self.output_torque * 1e3:.4g} mN m")
        return out


def performance_metrics(measured: dict, stowed_mm: float, deployed_mm: float) -> PerformanceReport:
    """Torque densities from peak motor torque, volumes and masses.

    ``measured`` uses the config keys (torques in mN m, masses in g,
    volumes in m^3). Active mass is rotor plus stator circuit boards.
    """
    for key in REQUIRED:
        if key not in measured:
            raise ParameterError(f"missing measured field: {key}")
        if not measured[key] > 0:
            raise ParameterError(f"measured field {key} must be positive, got {measured[key]!r}")
    torque = measured["T_motor_max_mNm"] * 1e-3
    active_kg = (measured["mass_rotor_g"] + measured["mass_stator_g"]) * 1e-3
    out_t = measured.get("T_output_max_mNm")
    return PerformanceReport(
        expansion_ratio=expansion_metrics(stowed_mm, deployed_mm),
        torque_per_volume_deployed=torque / measured["volume_deployed_m3"],
        torque_per_volume_stowed=torque / measured["volume_stowed_m3"],
        torque_per_mass_total=torque / (measured["mass_total_g"] * 1e-3),
        torque_per_mass_active=torque / active_kg,
        output_torque=None if out_t is None else out_t * 1e-3,
    )
