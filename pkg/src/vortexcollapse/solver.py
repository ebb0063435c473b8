"""Complexified normalized central-configuration systems and a multistart Newton solver.

A candidate is a doubled state ``(z, w, lam)``. It solves the normalized
system when

    lam * z_n = sum_j Γ_j / (w_n - w_j)
    w_n       = lam * sum_j Γ_j / (z_n - z_j)
    z_2 - z_1 = w_2 - w_1

and it is a real configuration when ``w = conj(z)``; then ``|lam| = 1`` and the
positions ``z`` satisfy ``V_n = lam * z_n``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from numpy.typing import NDArray

from .core import Configuration, VortexSystem
from .errors import DimensionError

ComplexArray = NDArray[np.complex128]

NEWTON_TARGET = 1e-11
COLLISION_FRACTION = 1e-8
REALITY_TOL = 1e-8
MAX_ITER = 60


@dataclass(frozen=True, eq=False)
class CentralCandidate:
    z: ComplexArray
    w: ComplexArray
    lam: complex
    residual: float = float("nan")

    def __post_init__(self) -> None:
        z = np.asarray(self.z, dtype=np.complex128).ravel()
        w = np.asarray(self.w, dtype=np.complex128).ravel()
        if z.shape != w.shape:
            raise DimensionError(f"z has {z.size} entries, w has {w.size}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "lam", complex(self.lam))

    @classmethod
    def from_configuration(cls, config: Configuration, lam: complex) -> "CentralCandidate":
        z = config.positions
        return cls(z, np.conj(z), lam)

    @property
    def n(self) -> int:
        return int(self.z.size)

    @property
    def size(self) -> float:
        return float(max(np.abs(self.z).max(), np.abs(self.w).max()))

    def is_real(self, tol: float = REALITY_TOL) -> bool:
        return float(np.abs(self.w - np.conj(self.z)).max()) <= tol * max(self.size, 1e-300)

    def is_collinear(self, tol: float = REALITY_TOL) -> bool:
        """True for the ``z = w`` branch, which at ``lam = +-1`` holds the collinear solutions."""
        return float(np.abs(self.w - self.z).max()) <= tol * max(self.size, 1e-300)

    def min_separation(self) -> float:
        iu = np.triu_indices(self.n, 1)
        dz = np.abs(self.z[:, None] - self.z[None, :])[iu]
        dw = np.abs(self.w[:, None] - self.w[None, :])[iu]
        return float(min(dz.min(), dw.min()))

    def is_trivial(self, tol: float = COLLISION_FRACTION, scale: float = 1.0) -> bool:
        """Zero solution, or two coinciding vortices in either coordinate set."""
        return self.size <= tol * scale or self.min_separation() <= tol * scale

    def negated(self) -> "CentralCandidate":
        return CentralCandidate(-self.z, -self.w, self.lam, self.residual)

    def configuration(self) -> Configuration:
        return Configuration(self.z)

    def vector(self) -> ComplexArray:
        return np.concatenate([self.z, self.w])


# ---------------------------------------------------------------------------
# quartic (four-vortex) system


_PAIRS = tuple(combinations(range(4), 2))
_COMPLEMENT = {p: tuple(m for m in range(4) if m not in p) for p in _PAIRS}


def _others(s: int) -> list[int]:
    return [k for k in range(4) if k != s]


def _quartic_parts(z: ComplexArray, w: ComplexArray, g: NDArray) -> dict[str, ComplexArray]:
    """Polynomial building blocks; leading axes of z and w broadcast."""
    prod_z = np.stack([np.prod(z[..., _others(s)], axis=-1) for s in range(4)], -1)
    prod_w = np.stack([np.prod(w[..., _others(s)], axis=-1) for s in range(4)], -1)
    pair_sum_z = sum(g[j] * g[k] * (z[..., j] + z[..., k]) for j, k in _PAIRS)
    pair_sum_w = sum(g[j] * g[k] * (w[..., j] + w[..., k]) for j, k in _PAIRS)
    comp_z = sum(g[j] * g[k] * np.prod(z[..., list(_COMPLEMENT[(j, k)])], -1) for j, k in _PAIRS)
    comp_w = sum(g[j] * g[k] * np.prod(w[..., list(_COMPLEMENT[(j, k)])], -1) for j, k in _PAIRS)
    return {
        "M_z": (g * z).sum(-1),
        "M_w": (g * w).sum(-1),
        "I": (g * z * w).sum(-1),
        "normalization": z[..., 1] - z[..., 0] - w[..., 1] + w[..., 0],
        "F_z": (g * z * z * w).sum(-1),
        "f_z": pair_sum_z,
        "F_w": (g * z * w * w).sum(-1),
        "f_w": pair_sum_w,
        "G_z": (g * w * prod_z).sum(-1),
        "g_z": comp_z,
        "G_w": (g * z * prod_w).sum(-1),
        "g_w": comp_w,
    }


def quartic_residuals(z: ComplexArray, w: ComplexArray, g: NDArray, lam: complex) -> ComplexArray:
    """The eight nonconstant residual combinations stacked on the last axis."""
    p = _quartic_parts(z, w, g)
    return np.stack(
        [
            p["M_z"], p["M_w"], p["I"], p["normalization"],
            p["F_z"] - lam * p["f_z"],
            lam * p["F_w"] - p["f_w"],
            p["G_z"] + lam * p["g_z"],
            lam * p["G_w"] + p["g_w"],
        ],
        -1,
    )


RESIDUAL_NAMES = (
    "M_z", "M_w", "I", "normalization",
    "F_z - lam f_z", "lam F_w - f_w", "G_z + lam g_z", "lam G_w + g_w",
)


@dataclass(frozen=True)
class SystemEvaluation:
    """Components of the four-vortex polynomial system at one candidate."""

    lam: complex
    M_z: complex
    M_w: complex
    L: float
    I: complex
    normalization: complex
    F_z: complex
    f_z: complex
    F_w: complex
    f_w: complex
    G_z: complex
    g_z: complex
    G_w: complex
    g_w: complex
    size: float
    gamma_max: float

    def residuals(self) -> dict[str, complex]:
        lam = self.lam
        return dict(zip(RESIDUAL_NAMES, (
            self.M_z, self.M_w, self.I, self.normalization,
            self.F_z - lam * self.f_z, lam * self.F_w - self.f_w,
            self.G_z + lam * self.g_z, lam * self.G_w + self.g_w,
        )))

    @property
    def residual_norm(self) -> float:
        """Largest residual, each divided by the natural size of its terms.

        With ``r = max(|z|, |w|)`` and ``γ = max|Γ|`` a component built from
        terms of degree ``(a, b)`` in ``(r, γ)`` is divided by the sum of
        ``r^a γ^b`` over its terms; the result is invariant under scaling.
        """
        r, gm = self.size, self.gamma_max
        if r == 0.0:
            return abs(self.L) / gm**2
        weights = (
            r * gm, r * gm, r * r * gm, r,
            r**3 * gm + r * gm**2, r**3 * gm + r * gm**2,
            r**4 * gm + r**2 * gm**2, r**4 * gm + r**2 * gm**2,
        )
        values = [abs(v) / s for v, s in zip(self.residuals().values(), weights)]
        return float(max(max(values), abs(self.L) / gm**2))


def _require_four(system: VortexSystem, cand: CentralCandidate) -> None:
    if system.n != 4 or cand.n != 4:
        raise DimensionError("the quartic system is defined for four vortices only")


def evaluate_system(cand: CentralCandidate, system: VortexSystem) -> SystemEvaluation:
    _require_four(system, cand)
    p = _quartic_parts(cand.z, cand.w, system.gammas)
    return SystemEvaluation(
        lam=cand.lam, L=system.angular_momentum, size=cand.size,
        gamma_max=float(np.abs(system.gammas).max()),
        **{k: complex(v) for k, v in p.items()},
    )


def quartic_jacobian(z: ComplexArray, w: ComplexArray, g: NDArray, lam: complex) -> ComplexArray:
    """Complex Jacobian (8 x 8) of :func:`quartic_residuals` w.r.t. ``(z, w)``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    jac = np.zeros((8, 8), dtype=complex)
    zs, ws = slice(0, 4), slice(4, 8)
    gamma = g.sum()
    jac[0, zs] = g
    jac[1, ws] = g
    jac[2, zs] = g * w
    jac[2, ws] = g * z
    jac[3, :] = [-1, 1, 0, 0, 1, -1, 0, 0]
    lin = g * (gamma - g)  # derivative of the pair sums
    jac[4, zs] = 2 * g * z * w - lam * lin
    jac[4, ws] = g * z * z
    jac[5, zs] = lam * g * w * w
    jac[5, ws] = lam * 2 * g * z * w - lin
    jac[6, zs] = _d_weighted_products(w, z, g) + lam * _d_complement_products(z, g)
    jac[6, ws] = g * np.array([np.prod(z[_others(s)]) for s in range(4)])
    jac[7, zs] = lam * g * np.array([np.prod(w[_others(s)]) for s in range(4)])
    jac[7, ws] = lam * _d_weighted_products(z, w, g) + _d_complement_products(w, g)
    return jac


def _d_weighted_products(u: ComplexArray, v: ComplexArray, g: NDArray) -> ComplexArray:
    """d/dv_m of sum_s Γ_s u_s prod_{k != s} v_k."""
    out = np.zeros(4, dtype=complex)
    for m in range(4):
        for s in _others(m):
            rest = [k for k in range(4) if k not in (s, m)]
            out[m] += g[s] * u[s] * np.prod(v[rest])
    return out


def _d_complement_products(v: ComplexArray, g: NDArray) -> ComplexArray:
    """d/dv_m of sum over pairs {j,k} of Γ_j Γ_k times the product of the other two v's."""
    out = np.zeros(4, dtype=complex)
    for (j, k), (a, b) in _COMPLEMENT.items():
        out[a] += g[j] * g[k] * v[b]
        out[b] += g[j] * g[k] * v[a]
    return out


def jacobian(cand: CentralCandidate, system: VortexSystem, *, real: bool = True) -> NDArray:
    """Analytic Jacobian of the eight nonconstant residuals of the quartic system.

    With ``real=True`` rows are ``[Re R, Im R]`` and columns are
    ``[Re z, Re w, Im z, Im w]``, i.e. a 16 x 16 real matrix; the residuals are
    holomorphic in ``(z, w)`` so this is the usual ``[[A, -B], [B, A]]`` block form.
    """
    _require_four(system, cand)
    jc = quartic_jacobian(cand.z, cand.w, system.gammas, cand.lam)
    if not real:
        return jc
    return np.block([[jc.real, -jc.imag], [jc.imag, jc.real]])


# ---------------------------------------------------------------------------
# rational system, any N


def rational_residual(z: ComplexArray, w: ComplexArray, g: NDArray, lam: complex) -> ComplexArray:
    """Residuals of the rational normalized system, shape ``(..., 2N + 1)``."""
    n = z.shape[-1]
    eye = np.eye(n, dtype=bool)
    dz = np.where(eye, 1.0, z[..., :, None] - z[..., None, :])
    dw = np.where(eye, 1.0, w[..., :, None] - w[..., None, :])
    gj = np.where(eye, 0.0, g[None, :])
    ez = lam * z - (gj / dw).sum(-1)
    ew = w - lam * (gj / dz).sum(-1)
    en = (z[..., 1] - z[..., 0]) - (w[..., 1] - w[..., 0])
    return np.concatenate([ez, ew, en[..., None]], -1)


def rational_system(
    z: ComplexArray, w: ComplexArray, g: NDArray, lam: complex
) -> tuple[ComplexArray, ComplexArray]:
    """Residual and complex Jacobian for a batch ``z, w`` of shape ``(B, N)``."""
    batch, n = z.shape
    eye = np.eye(n, dtype=bool)
    dz = np.where(eye, 1.0, z[:, :, None] - z[:, None, :])
    dw = np.where(eye, 1.0, w[:, :, None] - w[:, None, :])
    gj = np.where(eye, 0.0, g[None, :])[None]
    ez = lam * z - (gj / dw).sum(-1)
    ew = w - lam * (gj / dz).sum(-1)
    en = (z[:, 1] - z[:, 0]) - (w[:, 1] - w[:, 0])
    res = np.concatenate([ez, ew, en[:, None]], 1)

    jac = np.zeros((batch, 2 * n + 1, 2 * n), dtype=complex)
    inv_w = gj / dw**2
    inv_z = gj / dz**2
    idx = np.arange(n)
    jac[:, idx, idx] = lam
    jac[:, :n, n:] = -inv_w
    jac[:, idx, n + idx] = inv_w.sum(-1)
    jac[:, n + idx, n + idx] = 1.0
    jac[:, n:2 * n, :n] = -lam * inv_z
    jac[:, n + idx, idx] = lam * inv_z.sum(-1)
    jac[:, 2 * n, [0, 1, n, n + 1]] = [-1.0, 1.0, 1.0, -1.0]
    return res, jac


def rational_residual_norm(cand: CentralCandidate, system: VortexSystem) -> float:
    return float(np.abs(rational_residual(cand.z, cand.w, system.gammas, cand.lam)).max())


def stationarity_residual(cand: CentralCandidate, system: VortexSystem) -> float:
    """max_n |V_n - lam z_n| for the physical configuration ``z`` (meaningful for real candidates)."""
    from .core import pair_velocity

    v = pair_velocity(cand.z, system.gammas)
    return float(np.abs(v - cand.lam * cand.z).max())


# ---------------------------------------------------------------------------
# Newton multistart


@dataclass(frozen=True)
class SolutionSet:
    candidates: tuple[CentralCandidate, ...] = ()
    lambda_grid: tuple[complex, ...] = ()
    per_lambda_counts: dict[complex, int] = field(default_factory=dict)
    complex_counts: dict[complex, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.candidates)

    def real(self) -> list[CentralCandidate]:
        return [c for c in self.candidates if c.is_real()]

    def at(self, lam: complex, tol: float = 1e-12) -> list[CentralCandidate]:
        return [c for c in self.candidates if abs(c.lam - lam) <= tol]


def solution_scale(system: VortexSystem) -> float:
    """Typical size of a normalized solution: |z| |w| is of order sum |Γ|."""
    return float(np.sqrt(np.abs(system.gammas).sum()))


def _seeds(rng: np.random.Generator, starts: int, n: int, scale: float, real_fraction: float):
    n_real = int(round(starts * real_fraction))
    z = (rng.standard_normal((starts, n)) + 1j * rng.standard_normal((starts, n))) * (scale / np.sqrt(2))
    w = (rng.standard_normal((starts, n)) + 1j * rng.standard_normal((starts, n))) * (scale / np.sqrt(2))
    w[:n_real] = np.conj(z[:n_real])
    is_real = np.zeros(starts, dtype=bool)
    is_real[:n_real] = True
    return np.concatenate([z, w], 1), is_real


def _project_real(x: ComplexArray, n: int) -> ComplexArray:
    z = 0.5 * (x[:, :n] + np.conj(x[:, n:]))
    return np.concatenate([z, np.conj(z)], 1)


def newton(
    x: ComplexArray,
    gammas: NDArray,
    lam: complex,
    *,
    real_rows: NDArray | None = None,
    target: float = NEWTON_TARGET,
    max_iter: int = MAX_ITER,
    scale: float = 1.0,
) -> tuple[ComplexArray, NDArray]:
    """Damped Gauss-Newton on the rational system for a batch of starts.

    Starts that converge, stall or blow up leave the active set early.
    Rows flagged in ``real_rows`` are kept on the real subspace ``w = conj z``
    (the iteration maps that subspace into itself when ``|lam| = 1``).
    Returns the final iterates and their residual max-norms divided by ``scale``.
    """
    x = np.array(x, dtype=complex)
    batch, two_n = x.shape
    n = two_n // 2
    if real_rows is None:
        real_rows = np.zeros(batch, dtype=bool)
    resid = np.full(batch, np.inf)
    active = np.arange(batch)
    eye = np.eye(two_n)
    for _ in range(max_iter + 1):
        if active.size == 0:
            break
        xa = x[active]
        f, jac = rational_system(xa[:, :n], xa[:, n:], gammas, lam)
        fmax = np.abs(f).max(1)
        resid[active] = fmax / scale
        keep = (fmax > target * scale) & np.isfinite(fmax) & (np.abs(xa).max(1) < 1e8 * scale)
        if _ == max_iter:
            break
        active, xa, f, jac = active[keep], xa[keep], f[keep], jac[keep]
        if active.size == 0:
            break
        jh = np.conj(np.swapaxes(jac, 1, 2))
        normal = jh @ jac
        mu = 1e-12 * np.trace(normal, axis1=1, axis2=2).real
        with np.errstate(all="ignore"):
            step = np.linalg.solve(normal + mu[:, None, None] * eye, (jh @ f[..., None]))[..., 0]
        r0 = np.linalg.norm(f, axis=1)
        t = np.ones(active.size)
        improved = np.zeros(active.size, dtype=bool)
        trial = xa - step
        pending = np.arange(active.size)
        for _bt in range(12):
            cand = trial[pending]
            rows = real_rows[active[pending]]
            if rows.any():
                cand[rows] = _project_real(cand[rows], n)
            with np.errstate(all="ignore"):
                rn = np.linalg.norm(rational_residual(cand[:, :n], cand[:, n:], gammas, lam), axis=1)
            ok = np.isfinite(rn) & (rn <= (1 - 1e-4 * t[pending]) * r0[pending])
            trial[pending[ok]] = cand[ok]
            improved[pending[ok]] = True
            pending = pending[~ok]
            if pending.size == 0:
                break
            t[pending] *= 0.5
            trial[pending] = xa[pending] - t[pending, None] * step[pending]
        x[active[improved]] = trial[improved]
        active = active[improved]
    return x, resid


def _collect(x, resid, system, lam, tol, scale) -> list[CentralCandidate]:
    n = system.n
    ok = resid <= tol
    found = []
    for row in x[ok]:
        cand = CentralCandidate(row[:n], row[n:], lam)
        if cand.is_trivial(COLLISION_FRACTION, scale):
            continue
        res = rational_residual_norm(cand, system) / scale
        found.append(CentralCandidate(cand.z, cand.w, lam, res))
    return found


def solve_fixed_lambda(
    system: VortexSystem,
    lam: complex,
    starts: int = 2000,
    seed: int | np.random.SeedSequence = 0,
    tol: float = 1e-10,
    *,
    real_fraction: float = 0.5,
    dedup_tol: float = 1e-6,
) -> SolutionSet:
    """Multistart Newton for the normalized system at a fixed ``lam``.

    Half of the starts (``real_fraction``) are seeded on the real subspace
    ``w = conj z``; the rest are independent complex Gaussians. Trivial and
    colliding limits are discarded and the survivors deduplicated modulo sign.
    """
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-12:
        warnings.warn(f"|lam| = {abs(lam):.15g}; normalized solutions need |lam| = 1", RuntimeWarning)
    scale = solution_scale(system)
    rng = np.random.default_rng(seed)
    x0, real_rows = _seeds(rng, starts, system.n, scale, real_fraction)
    x, resid = newton(x0, system.gammas, lam, real_rows=real_rows, scale=scale)
    found = _collect(x, resid, system, lam, tol, scale)
    unique = dedup(SolutionSet(tuple(found)), dedup_tol * scale).candidates
    if abs(abs(lam) - 1.0) <= 1e-12:
        # on the unit circle (z, w) -> (conj w, conj z) maps solutions to solutions;
        # images of complex solutions seed a second, short Newton pass
        mirrors = np.array([np.concatenate([np.conj(c.w), np.conj(c.z)])
                            for c in unique if not c.is_real()]).reshape(-1, 2 * system.n)
        if mirrors.size:
            xm, rm = newton(mirrors, system.gammas, lam, scale=scale)
            extra = _collect(xm, rm, system, lam, tol, scale)
            unique = dedup(SolutionSet(tuple(unique) + tuple(extra)), dedup_tol * scale).candidates
    real = sum(1 for c in unique if c.is_real())
    return SolutionSet(unique, (lam,), {lam: real}, {lam: len(unique)})


def lambda_grid(grid_size: int) -> list[complex]:
    k = np.arange(grid_size)
    grid = np.exp(2j * np.pi * k / grid_size)
    # snap the exact axis points so that +-1 and +-i are recognisable
    grid = np.where(np.abs(grid.real) < 1e-15, 1j * np.sign(grid.imag), grid)
    grid = np.where(np.abs(grid.imag) < 1e-15, np.sign(grid.real) + 0j, grid)
    return [complex(v) for v in grid]


def scan_lambda(
    system: VortexSystem,
    grid_size: int = 64,
    starts: int = 2000,
    seed: int = 0,
    tol: float = 1e-10,
    **kwargs,
) -> SolutionSet:
    """Solve on ``grid_size`` equally spaced points of the unit circle.

    ``per_lambda_counts`` holds real collapse counts (orbit representatives)
    and is zero at ``lam = +-1``, where real solutions are relative equilibria.
    """
    if grid_size < 4:
        raise ValueError("grid_size must be at least 4")
    grid = lambda_grid(grid_size)
    children = np.random.SeedSequence(seed).spawn(grid_size)
    candidates: list[CentralCandidate] = []
    real_counts: dict[complex, int] = {}
    all_counts: dict[complex, int] = {}
    for lam, child in zip(grid, children):
        part = solve_fixed_lambda(system, lam, starts, child, tol, **kwargs)
        candidates.extend(part.candidates)
        real_counts[lam] = 0 if lam.imag == 0 else part.per_lambda_counts[lam]
        all_counts[lam] = part.complex_counts[lam]
    return SolutionSet(tuple(candidates), tuple(grid), real_counts, all_counts)


# ---------------------------------------------------------------------------
# deduplication


def _canonical_sign(v: ComplexArray, tol: float) -> int:
    for entry in v:
        if abs(entry) > tol:
            if entry.real > tol or (abs(entry.real) <= tol and entry.imag > 0):
                return 1
            return -1
    return 1


def _fold_rotation(cand: CentralCandidate) -> CentralCandidate:
    """Send ``lam`` in the left half-plane to ``-lam`` via ``(z, w) -> (iz, iw)``."""
    lam = cand.lam
    if lam.real < 0 or (lam.real == 0 and lam.imag < 0):
        return CentralCandidate(1j * cand.z, 1j * cand.w, -lam, cand.residual)
    return cand


def dedup(solutions: SolutionSet, tol: float = 1e-6, *, fold_rotation: bool = False) -> SolutionSet:
    """Keep one representative per orbit of ``(z, w) -> (-z, -w)``.

    Two candidates merge when their ``lam`` agree within ``tol`` and their
    stacked ``(z, w)`` vectors agree in max-norm within ``tol`` up to sign.
    With ``fold_rotation`` real candidates at ``-lam`` are first mapped onto
    ``lam`` by ``(z, w) -> (iz, iw)`` so that the two counts are pooled.
    """
    items = list(solutions.candidates)
    if fold_rotation:
        items = [_fold_rotation(c) for c in items]
    canon = []
    for c in items:
        sign = _canonical_sign(c.vector(), tol)
        canon.append(c if sign > 0 else c.negated())
    order = sorted(range(len(canon)), key=lambda i: _sort_key(canon[i]))
    kept: list[CentralCandidate] = []
    kept_vec: list[ComplexArray] = []
    for i in order:
        c = canon[i]
        v = c.vector()
        duplicate = False
        for k, u in zip(kept, kept_vec):
            if abs(k.lam - c.lam) > tol or u.shape != v.shape:
                continue
            if min(np.abs(u - v).max(), np.abs(u + v).max()) <= tol:
                duplicate = True
                break
        if not duplicate:
            kept.append(c)
            kept_vec.append(v)
    return SolutionSet(
        tuple(kept), solutions.lambda_grid,
        dict(solutions.per_lambda_counts), dict(solutions.complex_counts),
    )


def _sort_key(c: CentralCandidate) -> tuple:
    v = c.vector()
    return (round(c.lam.real, 9), round(c.lam.imag, 9), *np.round(v.real, 6), *np.round(v.imag, 6))
