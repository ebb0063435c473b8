"""Closed-form five-vortex continuum of collapse configurations.

Vortices of strength (1, 1, -1/2, -1/2, 3/4) sit at ``a, -a, b + ic, -b - ic, 0``
(a parallelogram around a central vortex), with ``b`` and ``c`` fixed by ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Configuration, VortexSystem, invariants, pair_velocity
from .errors import DomainError, VerificationFailure

FAMILY_GAMMAS = (1.0, 1.0, -0.5, -0.5, 0.75)
INNER_EDGE = math.sqrt(11.0 / 3.0) / 2.0
OUTER_EDGE = 1.5

# the two parameter values drawn in the reference figure
FIGURE_LEFT_A = (-49.0 * math.sqrt(33.0) - 9.0) / 300.0
FIGURE_RIGHT_A = (-17.0 * math.sqrt(33.0) - 72.0) / 150.0


@dataclass(frozen=True)
class FamilyParameter:
    a: float
    sign_b: int = 1
    sign_c: int = 1

    def __post_init__(self) -> None:
        if self.sign_b not in (1, -1) or self.sign_c not in (1, -1):
            raise DomainError("sign_b and sign_c must be +1 or -1")
        if not math.isfinite(self.a) or not (INNER_EDGE < abs(self.a) < OUTER_EDGE):
            raise DomainError(
                f"a = {self.a!r} outside (-3/2, -{INNER_EDGE:.6f}) U ({INNER_EDGE:.6f}, 3/2)"
            )

    def offsets(self) -> tuple[float, float]:
        """The coordinates (b, c) of the third vortex."""
        a2 = self.a * self.a
        radicand = (144.0 * a2**3 - 121.0 * a2) / (64.0 * a2 * a2 - 20.0)
        if radicand < 0:
            raise DomainError(f"negative radicand for b at a = {self.a!r}")
        b = self.sign_b * math.sqrt(radicand)
        rest = 2.0 * a2 - b * b
        if rest < 0:
            if rest > -1e-14 * a2:
                rest = 0.0
            else:
                raise DomainError(f"negative radicand for c at a = {self.a!r}")
        return b, self.sign_c * math.sqrt(rest)


def family_system() -> VortexSystem:
    return VortexSystem(np.array(FAMILY_GAMMAS))


def family_configuration(p: FamilyParameter) -> tuple[Configuration, VortexSystem]:
    b, c = p.offsets()
    q = complex(b, c)
    return Configuration(np.array([p.a, -p.a, q, -q, 0.0])), family_system()


def family_lambda(p: FamilyParameter) -> complex:
    a, (b, c) = p.a, p.offsets()
    a2, b2, c2, bc = a * a, b * b, c * c, b * c
    num = complex(-a2 + 5 * b2 - 5 * c2, -10 * bc)
    den = 2 * a2 * complex(b2 - 3 * c2, -4 * bc)
    return num / den


@dataclass(frozen=True)
class FamilyReport:
    parameter: FamilyParameter
    lam: complex
    checks: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.checks.values())


def collapse_checks(config: Configuration, system: VortexSystem, lam: complex) -> dict[str, float]:
    """Residuals of V = lam z and of the necessary collapse conditions.

    All entries are made dimensionless with the configuration diameter and
    the vorticity magnitudes, so a single tolerance applies.
    """
    z = config.positions
    diam = config.diameter
    gabs = float(np.abs(system.gammas).sum())
    inv = invariants(config, system)
    v = pair_velocity(z, system.gammas)
    return {
        "stationarity": float(np.abs(v - lam * z).max()) * diam / gabs,
        "unit_lambda": abs(abs(lam) - 1.0),
        "L": abs(inv.angular_momentum) / system.sum_of_squares,
        "I": abs(inv.angular_impulse) / (gabs * diam**2),
        "S": abs(inv.weighted_sum) / (gabs**2 * diam**2),
        "M": abs(inv.moment) / (gabs * diam),
        # 1 when Γ = 0, tiny otherwise
        "Gamma_nonzero": 1.0 if abs(inv.total_vorticity) <= 1e-12 * gabs else 0.0,
        # 1 for a relative equilibrium, 0 for a genuine collapse constant
        "lambda_not_real": 1.0 if abs(lam.imag) <= 1e-12 * abs(lam) else 0.0,
    }


def verify_collapse(
    config: Configuration, system: VortexSystem, lam: complex, tol: float = 1e-10
) -> dict[str, float]:
    checks = collapse_checks(config, system, lam)
    bad = {k: v for k, v in checks.items() if not v <= tol}
    if bad:
        names = ", ".join(f"{k}={v:.3e}" for k, v in bad.items())
        raise VerificationFailure(f"collapse verification failed: {names}", bad)
    return checks


def verify_family(p: FamilyParameter, tol: float = 1e-10) -> FamilyReport:
    config, system = family_configuration(p)
    lam = family_lambda(p)
    checks = verify_collapse(config, system, lam, tol)
    return FamilyReport(p, lam, checks, tol)


@dataclass(frozen=True)
class SweepRow:
    a: float
    b: float
    c: float
    lam: complex
    residual: float
    positions: np.ndarray


def sweep(
    count: int, sign_b: int = 1, sign_c: int = 1, *, margin: float = 1e-6
) -> list[SweepRow]:
    """Evenly spaced parameters over both interval components (half on each)."""
    half = count // 2
    inner, outer = INNER_EDGE + margin, OUTER_EDGE - margin
    values = np.concatenate([
        -np.linspace(outer, inner, count - half),
        np.linspace(inner, outer, half),
    ])
    rows = []
    for a in values:
        p = FamilyParameter(float(a), sign_b, sign_c)
        config, system = family_configuration(p)
        lam = family_lambda(p)
        b, c = p.offsets()
        residual = collapse_checks(config, system, lam)["stationarity"]
        rows.append(SweepRow(float(a), b, c, lam, residual, config.positions))
    return rows


def shape_signature(config: Configuration) -> np.ndarray:
    """Pairwise distances divided by the first one; unchanged by scaling and rotation."""
    d = config.distances()[np.triu_indices(config.n, 1)]
    return d / d[0]
