"""Time integration of dz_n/dt = -i V_n and the exact self-similar collapse law."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from .core import Configuration, VortexSystem, pair_velocity, velocity_field
from .errors import DomainError, StepSizeUnderflow, VerificationFailure

COLLISION_APPROACH = 1e-6


def hamiltonian(z: NDArray, gammas: NDArray) -> float:
    """H = -sum_{j<k} Γ_j Γ_k log r_jk."""
    iu = np.triu_indices(z.size, 1)
    r = np.abs(z[:, None] - z[None, :])[iu]
    return float(-(np.outer(gammas, gammas)[iu] * np.log(r)).sum())


def _min_distance(z: NDArray) -> float:
    iu = np.triu_indices(z.size, 1)
    return float(np.abs(z[:, None] - z[None, :])[iu].min())


@dataclass(frozen=True)
class Trajectory:
    """Accepted integrator steps with the conserved quantities logged at each."""

    times: NDArray
    states: NDArray  # (steps, N) complex positions
    hamiltonian: NDArray
    moment: NDArray
    impulse: NDArray
    min_distance: NDArray
    status: Literal["completed", "collision_approach"] = "completed"
    events: list[tuple[str, float]] = field(default_factory=list)

    def configuration(self, k: int = -1) -> Configuration:
        return Configuration(self.states[k])

    @property
    def final_time(self) -> float:
        return float(self.times[-1])


def _log(times, states, gammas) -> dict[str, NDArray]:
    return {
        "hamiltonian": np.array([hamiltonian(z, gammas) for z in states]),
        "moment": states @ gammas,
        "impulse": (np.abs(states) ** 2) @ gammas,
        "min_distance": np.array([_min_distance(z) for z in states]),
    }


def integrate(
    config0: Configuration,
    system: VortexSystem,
    t_end: float,
    rel_tol: float = 1e-12,
    *,
    t0: float = 0.0,
    crossing_fractions: tuple[float, ...] = (),
    collision_fraction: float = COLLISION_APPROACH,
    max_step: float = np.inf,
) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) integration from ``t0`` to ``t_end``.

    Stops early with status ``"collision_approach"`` once the minimum pairwise
    distance falls below ``collision_fraction`` times the initial diameter.
    Each value ``f`` in ``crossing_fractions`` records an event named
    ``"crossing:f"`` when the minimum distance falls to ``f`` times its
    initial value.
    """
    velocity_field(config0, system)  # validates lengths and collisions
    gammas = system.gammas
    y0 = config0.positions.copy()
    diam0 = config0.diameter
    dmin0 = config0.min_distance
    halt = collision_fraction * diam0

    def rhs(_t, z):
        return -1j * pair_velocity(z, gammas)

    def approach(_t, z):
        return _min_distance(z) - halt

    approach.terminal = True
    approach.direction = -1
    events = [approach]
    for frac in crossing_fractions:
        def crossing(_t, z, level=frac * dmin0):
            return _min_distance(z) - level
        crossing.direction = -1
        events.append(crossing)

    sol = solve_ivp(
        rhs, (t0, t_end), y0, method="RK45", rtol=rel_tol,
        atol=rel_tol * 1e-6 * diam0, events=events, max_step=max_step,
    )
    states = sol.y.T
    log = _log(sol.t, states, gammas)
    status = "collision_approach" if sol.status == 1 else "completed"
    found = []
    if sol.t_events is not None:
        for t in sol.t_events[0]:
            found.append(("collision_approach", float(t)))
        for frac, ts in zip(crossing_fractions, sol.t_events[1:]):
            found.extend((f"crossing:{frac:g}", float(t)) for t in ts)
    traj = Trajectory(sol.t.copy(), states, status=status, events=found, **log)
    if sol.status == -1:
        raise StepSizeUnderflow(sol.message, traj)
    return traj


def collapse_time(lam: complex) -> float | None:
    """Forward collapse time of a self-similar solution, or None if it never collapses."""
    lam = complex(lam)
    if lam.imag < 0:
        return -1.0 / (2.0 * lam.imag)
    return None


def growth_mode(lam: complex) -> Literal["collapse", "expansion", "rigid"]:
    """How the size of a self-similar solution evolves forward in time."""
    lam = complex(lam)
    if lam.imag < 0:
        return "collapse"
    if lam.imag > 0:
        return "expansion"
    return "rigid"


def scale_factor(lam: complex, t: float) -> complex:
    """s(t) solving ds/dt * conj(s) = -i lam with s(0) = 1."""
    lam = complex(lam)
    radial = 1.0 + 2.0 * lam.imag * t
    if radial <= 0.0:
        raise DomainError(f"t = {t!r} is at or past the collapse time {collapse_time(lam)!r}")
    if lam.imag == 0.0:
        phase = -lam.real * t
    else:
        phase = -lam.real / (2.0 * lam.imag) * math.log(radial)
    return math.sqrt(radial) * complex(math.cos(phase), math.sin(phase))


def self_similar_oracle(
    config0: Configuration,
    lam: complex,
    t: float,
    system: VortexSystem | None = None,
    *,
    check_tol: float = 1e-8,
) -> Configuration:
    """Exact position at time ``t`` of a stationary configuration with ``V = lam (z - z0)``.

    When ``system`` is given the stationarity of ``config0`` is checked first
    and the centre ``z0`` is taken as the centre of vorticity; otherwise the
    origin is used.
    """
    z = config0.positions
    center = 0j
    if system is not None:
        v = velocity_field(config0, system)
        total = system.total_vorticity
        center = complex(np.dot(system.gammas, z) / total) if total != 0 else 0j
        err = float(np.abs(v - lam * (z - center)).max())
        if err > check_tol * float(np.abs(v).max()):
            raise VerificationFailure("initial configuration is not stationary for this lambda",
                                      {"stationarity": err})
    s = scale_factor(lam, t)
    return Configuration(center + s * (z - center))

