"""Design, torque modelling and parameter identification for foldable
Kresling-cylinder corona motors."""

from .corona import ElectricalParams, RotorBody, PROTOTYPE_BODY, PROTOTYPE_PARAMS
from .dynamics import LoadModel, OperatingPoint, VoltageSchedule
from .errors import (
    DataQualityError,
    FitError,
    GeometryError,
    OrigamiMotorError,
    ParameterError,
    TraceFormatError,
)
from .geometry import CylinderSpec, DeployedGeometry, KreslingCell
from .traces import KinematicsTrace, SpeedTrace

__all__ = [
    "CylinderSpec", "DataQualityError", "DeployedGeometry", "ElectricalParams", "FitError",
    "GeometryError", "KinematicsTrace", "KreslingCell", "LoadModel", "OperatingPoint",
    "OrigamiMotorError", "PROTOTYPE_BODY", "PROTOTYPE_PARAMS", "ParameterError", "RotorBody",
    "SpeedTrace", "TraceFormatError", "VoltageSchedule",
]
