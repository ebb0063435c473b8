"""Exception hierarchy shared by all modules."""


class VortexError(Exception):
    """Base class for package errors."""


class DomainError(VortexError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class BadVorticity(DomainError):
    """A vorticity is zero or non-finite."""


class CollisionError(DomainError):
    """Two vortices coincide (pairwise distance below the collision epsilon)."""


class DimensionError(DomainError):
    """The number of vortices does not match what the operation requires."""


class LNonZero(DomainError):
    """The total vortex angular momentum L is not zero within tolerance."""


class MalformedDiagram(DomainError):
    """A colored diagram has out-of-range indices or degenerate strokes."""


class VerificationFailure(VortexError):
    """A numerical verification did not pass; ``checks`` holds the offending residuals."""

    def __init__(self, message, checks=None):
        super().__init__(message)
        self.checks = checks or {}


class AuditViolation(VortexError):
    """An empirical count violates one of the Bezout-derived inequalities."""

    def __init__(self, message, violated=None):
        super().__init__(message)
        self.violated = violated or []


class NoConvergence(VortexError):
    """Newton iteration failed everywhere (not raised for an empty but valid result)."""


class StepSizeUnderflow(VortexError):
    """The adaptive integrator could not take a step; ``trajectory`` holds the last good state."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
