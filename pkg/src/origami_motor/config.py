"""JSON project configuration with unit-suffixed keys."""

from __future__ import annotations

import copy
import json
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from scipy.constants import epsilon_0 as EPS0

from .corona import ElectricalParams, RotorBody
from .dynamics import LoadModel
from .errors import ParameterError
from .geometry import CylinderSpec, KreslingCell

log = logging.getLogger(__name__)

CYLINDER_KEYS = {"R_mm", "N", "theta0_deg", "M"}
ELECTRICAL_KEYS = {"sigma_S_per_m", "eps_g_rel", "eps_r_rel", "alpha_rad", "V_onset_kV", "G_mm"}
BODY_KEYS = {"R_mm", "L_mm", "inertia_kg_m2"}
LOAD_KEYS = {"c0_Nm", "c1_Nm_s_per_rad", "c2_Nm_s2_per_rad2"}
HEIGHT_KEYS = {"stowed_mm", "deployed_mm"}
MEASURED_KEYS = {
    "T_motor_max_mNm", "T_output_max_mNm", "volume_deployed_m3", "volume_stowed_m3",
    "mass_total_g", "mass_rotor_g", "mass_stator_g",
}
TOP_KEYS = {"rotor", "stator", "electrical", "body", "load", "voltages_kV", "heights", "measured", "paths"}


class ConfigError(ParameterError):
    pass


@dataclass
class ProjectConfig:
    rotor: CylinderSpec | None = None
    stator: CylinderSpec | None = None
    electrical: ElectricalParams | None = None
    body: RotorBody | None = None
    load: LoadModel | None = None
    voltages: list = field(default_factory=list)  # volts
    heights: dict = field(default_factory=dict)  # mm
    measured: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)


def _check_keys(section: str, data: dict, allowed: set, required: set | None = None) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected an object")
    unknown = sorted(set(data) - allowed)
    if unknown:
        log.warning("ignoring unknown keys in %s: %s", section, ", ".join(unknown))
    missing = sorted((required if required is not None else allowed) - set(data))
    if missing:
        raise ConfigError(f"{section}: missing {', '.join(missing)}")


def _section(name, builder, data):
    try:
        return builder(data)
    except ConfigError:
        raise
    except (ParameterError, TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


def _cylinder(role):
    def build(d):
        _check_keys(role, d, CYLINDER_KEYS)
        cell = KreslingCell.from_degrees(d["R_mm"], d["N"], d["theta0_deg"])
        return CylinderSpec(cell, int(d["M"]), role)
    return build


def _electrical(d):
    _check_keys("electrical", d, ELECTRICAL_KEYS)
    return ElectricalParams(
        sigma=float(d["sigma_S_per_m"]),
        eps_g=float(d["eps_g_rel"]) * EPS0,
        eps_r=float(d["eps_r_rel"]) * EPS0,
        alpha=float(d["alpha_rad"]),
        V_onset=float(d["V_onset_kV"]) * 1e3,
        G=float(d["G_mm"]) / 1e3,
    )


def _body(d):
    _check_keys("body", d, BODY_KEYS)
    return RotorBody(R=float(d["R_mm"]) / 1e3, L=float(d["L_mm"]) / 1e3, inertia=float(d["inertia_kg_m2"]))


def _load(d):
    _check_keys("load", d, LOAD_KEYS)
    return LoadModel(float(d["c0_Nm"]), float(d["c1_Nm_s_per_rad"]), float(d["c2_Nm_s2_per_rad2"]))


def config_from_dict(data: dict) -> ProjectConfig:
    _check_keys("config", data, TOP_KEYS, required=set())
    cfg = ProjectConfig()
    if "rotor" in data:
        cfg.rotor = _section("rotor", _cylinder("rotor"), data["rotor"])
    if "stator" in data:
        cfg.stator = _section("stator", _cylinder("stator"), data["stator"])
    if "electrical" in data:
        cfg.electrical = _section("electrical", _electrical, data["electrical"])
    if "body" in data:
        cfg.body = _section("body", _body, data["body"])
    if "load" in data and data["load"] is not None:
        cfg.load = _section("load", _load, data["load"])
    if "voltages_kV" in data:
        try:
            cfg.voltages = [float(v) * 1e3 for v in data["voltages_kV"]]
        except (TypeError, ValueError):
            raise ConfigError("voltages_kV: expected a list of numbers") from None
    if "heights" in data:
        _check_keys("heights", data["heights"], HEIGHT_KEYS, required=set())
        cfg.heights = {k: float(v) for k, v in data["heights"].items() if k in HEIGHT_KEYS}
    if "measured" in data:
        _check_keys("measured", data["measured"], MEASURED_KEYS, required=set())
        cfg.measured = {k: float(v) for k, v in data["measured"].items() if k in MEASURED_KEYS}
    if "paths" in data:
        if not isinstance(data["paths"], dict):
            raise ConfigError("paths: expected an object")
        cfg.paths = {str(k): str(v) for k, v in data["paths"].items()}
    return cfg


def _scaled(x: float, factor: float) -> float:
    # 15 significant digits undo the binary noise of the unit conversion
    return float(f"{x * factor:.15g}")


def _cyl_dict(spec: CylinderSpec) -> dict:
    return {"R_mm": spec.cell.R, "N": spec.cell.N,
            "theta0_deg": round(math.degrees(spec.cell.theta0), 12), "M": spec.M}


def config_to_dict(cfg: ProjectConfig) -> dict:
    """Inverse of :func:`config_from_dict` for the effective configuration."""
    out: dict = {}
    if cfg.rotor:
        out["rotor"] = _cyl_dict(cfg.rotor)
    if cfg.stator:
        out["stator"] = _cyl_dict(cfg.stator)
    if cfg.electrical:
        e = cfg.electrical
        out["electrical"] = {
            "sigma_S_per_m": e.sigma, "eps_g_rel": _scaled(e.eps_g, 1 / EPS0),
            "eps_r_rel": _scaled(e.eps_r, 1 / EPS0), "alpha_rad": e.alpha,
            "V_onset_kV": _scaled(e.V_onset, 1e-3), "G_mm": _scaled(e.G, 1e3),
        }
    if cfg.body:
        b = cfg.body
        out["body"] = {"R_mm": _scaled(b.R, 1e3), "L_mm": _scaled(b.L, 1e3), "inertia_kg_m2": b.inertia}
    if cfg.load:
        out["load"] = {"c0_Nm": cfg.load.c0, "c1_Nm_s_per_rad": cfg.load.c1,
                       "c2_Nm_s2_per_rad2": cfg.load.c2}
    if cfg.voltages:
        out["voltages_kV"] = [_scaled(v, 1e-3) for v in cfg.voltages]
    if cfg.heights:
        out["heights"] = dict(cfg.heights)
    if cfg.measured:
        out["measured"] = dict(cfg.measured)
    if cfg.paths:
        out["paths"] = dict(cfg.paths)
    return out


def prototype_defaults_dict() -> dict:
    text = resources.files("origami_motor").joinpath("data/prototype.json").read_text(encoding="utf-8")
    return json.loads(text)


def prototype_defaults() -> ProjectConfig:
    return config_from_dict(prototype_defaults_dict())


def load_config(path=None) -> ProjectConfig:
    """Read a config file; ``None`` gives the bundled prototype defaults."""
    if path is None:
        return prototype_defaults()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(copy.deepcopy(data))


def dump_config(cfg: ProjectConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n", encoding="utf-8")
