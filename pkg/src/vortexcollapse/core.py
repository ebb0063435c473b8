"""Vorticity vectors, configurations, invariants, the velocity field and stationary classes."""

from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .errors import BadVorticity, CollisionError, DimensionError

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

COLLISION_EPS = 1e-12
# relative tolerance for the necessary conditions reported alongside a classification
CONDITION_TOL = 1e-8


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class VortexSystem:
    """N nonzero point-vortex strengths."""

    gammas: FloatArray

    def __post_init__(self) -> None:
        g = np.asarray(self.gammas, dtype=np.float64).ravel()
        if g.size < 2:
            raise DimensionError(f"need at least two vortices, got {g.size}")
        if not np.isfinite(g).all():
            raise BadVorticity("vorticities must be finite")
        if np.any(g == 0.0):
            raise BadVorticity(f"vorticities must be nonzero, got {g.tolist()}")
        object.__setattr__(self, "gammas", _frozen(g.copy()))

    @classmethod
    def of(cls, *gammas: float) -> "VortexSystem":
        return cls(np.array(gammas, dtype=float))

    @property
    def n(self) -> int:
        return int(self.gammas.size)

    @property
    def total_vorticity(self) -> float:
        return float(self.gammas.sum())

    @property
    def angular_momentum(self) -> float:
        """Sum of Γ_j Γ_k over unordered pairs."""
        g = self.gammas
        iu = np.triu_indices(g.size, 1)
        return float(np.outer(g, g)[iu].sum())

    @property
    def sum_of_squares(self) -> float:
        return float(np.dot(self.gammas, self.gammas))

    def __repr__(self) -> str:
        return f"VortexSystem({self.gammas.tolist()})"


@dataclass(frozen=True, eq=False)
class Configuration:
    """Positions of N vortices in the complex plane."""

    positions: ComplexArray

    def __post_init__(self) -> None:
        z = np.asarray(self.positions, dtype=np.complex128).ravel()
        if not np.isfinite(z).all():
            raise ValueError("positions contain non-finite values")
        object.__setattr__(self, "positions", _frozen(z.copy()))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "Configuration":
        xy = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(xy[:, 0] + 1j * xy[:, 1])

    @property
    def n(self) -> int:
        return int(self.positions.size)

    def distances(self) -> FloatArray:
        z = self.positions
        return np.abs(z[:, None] - z[None, :])

    @property
    def diameter(self) -> float:
        return float(self.distances().max()) if self.n > 1 else 0.0

    @property
    def min_distance(self) -> float:
        d = self.distances()
        iu = np.triu_indices(self.n, 1)
        return float(d[iu].min())

    def is_collision_free(self, eps: float = COLLISION_EPS) -> bool:
        diam = self.diameter
        return diam > 0 and self.min_distance > eps * diam

    def scaled(self, factor: complex, shift: complex = 0.0) -> "Configuration":
        return Configuration(factor * self.positions + shift)


@dataclass(frozen=True)
class InvariantSet:
    total_vorticity: float
    angular_momentum: float
    moment: complex
    angular_impulse: float
    weighted_sum: float


def _check_lengths(config: Configuration, system: VortexSystem) -> None:
    if config.n != system.n:
        raise DimensionError(f"{config.n} positions but {system.n} vorticities")


def velocity_field(
    config: Configuration, system: VortexSystem, eps: float = COLLISION_EPS
) -> ComplexArray:
    """V_n = sum over j != n of Γ_j / conj(z_n - z_j); motion is dz/dt = -i V."""
    _check_lengths(config, system)
    if not config.is_collision_free(eps):
        raise CollisionError(
            f"min distance {config.min_distance:.3e} below {eps:g} x diameter"
        )
    return pair_velocity(config.positions, system.gammas)


def pair_velocity(z: ComplexArray, gammas: FloatArray) -> ComplexArray:
    """Unchecked velocity kernel shared with the integrator."""
    dz = z[:, None] - z[None, :]
    np.fill_diagonal(dz, 1.0)
    terms = gammas[None, :] / np.conj(dz)
    np.fill_diagonal(terms, 0.0)
    return terms.sum(axis=1)


def invariants(config: Configuration, system: VortexSystem) -> InvariantSet:
    _check_lengths(config, system)
    g, z = system.gammas, config.positions
    iu = np.triu_indices(g.size, 1)
    r2 = np.abs(z[:, None] - z[None, :]) ** 2
    return InvariantSet(
        total_vorticity=system.total_vorticity,
        angular_momentum=system.angular_momentum,
        moment=complex(np.dot(g, z)),
        angular_impulse=float(np.dot(g, np.abs(z) ** 2)),
        weighted_sum=float((np.outer(g, g) * r2)[iu].sum()),
    )


StationaryKind = Literal[
    "equilibrium", "rigid_translation", "relative_equilibrium", "collapse", "non_stationary"
]


@dataclass(frozen=True)
class StationaryClass:
    """Outcome of :func:`classify`.

    ``velocity`` is set for rigid translations, ``lam`` and ``center`` for
    relative equilibria (real ``lam``) and collapse (complex ``lam``).
    """

    kind: StationaryKind
    velocity: complex | None = None
    lam: complex | None = None
    center: complex | None = None
    residual: float = 0.0
    checks: dict[str, float] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    @property
    def is_stationary(self) -> bool:
        return self.kind != "non_stationary"


def classify(
    config: Configuration, system: VortexSystem, tol: float = 1e-9
) -> StationaryClass:
    """Decide which stationary class, if any, a configuration belongs to.

    Tolerances are relative to ``max |V_n|`` so that the answer does not
    change when the configuration is scaled or rotated.
    """
    v = velocity_field(config, system)
    z = config.positions
    vmax = float(np.abs(v).max())
    inv = invariants(config, system)
    # velocity scale for a configuration of this size, used only to detect V = 0
    natural = float(np.abs(system.gammas).sum()) / config.diameter
    notes: list[str] = []

    if vmax <= tol * natural:
        if abs(inv.angular_momentum) > CONDITION_TOL * system.sum_of_squares:
            notes.append("equilibrium with L != 0")
        return _emit(StationaryClass("equilibrium", residual=vmax / natural, warnings=tuple(notes)))

    spread = float(np.abs(v - v.mean()).max())
    if spread <= tol * vmax:
        if abs(inv.total_vorticity) > CONDITION_TOL * np.abs(system.gammas).sum():
            notes.append("rigid translation with total vorticity != 0")
        return _emit(
            StationaryClass(
                "rigid_translation", velocity=complex(v.mean()), residual=spread / vmax,
                warnings=tuple(notes),
            )
        )

    # V_n = lam * z_n + c, c = -lam * z0, solved as a complex linear least-squares problem
    design = np.column_stack([z, np.ones_like(z)])
    (lam, c), *_ = np.linalg.lstsq(design, v, rcond=None)
    residual = float(np.abs(design @ np.array([lam, c]) - v).max())
    if residual > tol * vmax or abs(lam) == 0.0:
        return StationaryClass("non_stationary", residual=residual / vmax)
    lam = complex(lam)
    center = complex(-c / lam)

    if abs(lam.imag) <= tol * abs(lam):
        return StationaryClass(
            "relative_equilibrium", lam=complex(lam.real), center=center,
            residual=residual / vmax,
        )

    size2 = config.diameter**2
    gabs = float(np.abs(system.gammas).sum())
    checks = {
        "S": inv.weighted_sum / (gabs**2 * size2),
        "I": _centered_impulse(z, center, system) / (gabs * size2),
        "L": inv.angular_momentum / system.sum_of_squares,
        "Gamma": inv.total_vorticity / gabs,
    }
    for key in ("S", "I", "L"):
        if abs(checks[key]) > CONDITION_TOL:
            notes.append(f"collapse with {key} != 0")
    if abs(checks["Gamma"]) <= CONDITION_TOL:
        notes.append("collapse with total vorticity 0")
    return _emit(
        StationaryClass(
            "collapse", lam=lam, center=center, residual=residual / vmax,
            checks=checks, warnings=tuple(notes),
        )
    )


def _centered_impulse(z: ComplexArray, center: complex, system: VortexSystem) -> float:
    return float(np.dot(system.gammas, np.abs(z - center) ** 2))


def _emit(result: StationaryClass) -> StationaryClass:
    for note in result.warnings:
        warnings.warn(note, RuntimeWarning, stacklevel=3)
    return result
