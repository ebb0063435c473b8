"""Stationary and collapse configurations of planar point vortices."""

from .core import (
    Configuration,
    InvariantSet,
    StationaryClass,
    VortexSystem,
    classify,
    invariants,
    velocity_field,
)
from .errors import (
    AuditViolation,
    BadVorticity,
    CollisionError,
    DimensionError,
    DomainError,
    LNonZero,
    MalformedDiagram,
    NoConvergence,
    StepSizeUnderflow,
    VerificationFailure,
)

__all__ = [
    "Configuration", "InvariantSet", "StationaryClass", "VortexSystem",
    "classify", "invariants", "velocity_field",
    "AuditViolation", "BadVorticity", "CollisionError", "DimensionError", "DomainError",
    "LNonZero", "MalformedDiagram", "NoConvergence", "StepSizeUnderflow", "VerificationFailure",
]
