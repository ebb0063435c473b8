"""Two-colored singularity diagrams on four vertices and their vorticity predicates.

Each problematic diagram carries a relation the four vorticities must obey
for the diagram to be realised. Relations are evaluated on every relabeling
of the vertices; a diagram is admissible when some labeling passes all of
them. Vorticities are divided by ``max |Γ|`` first, so every verdict is
unchanged by ``Γ -> κΓ``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Callable, Iterable

import numpy as np
from numpy.typing import NDArray

from .core import VortexSystem
from .errors import DimensionError, LNonZero, MalformedDiagram

ROOT3_RATIO = math.sqrt(3.0) - 2.0
DEFAULT_TOL = 1e-9
LABELINGS = np.array(list(permutations(range(4))))


# ---------------------------------------------------------------------------
# diagram structure


Edge = frozenset


def _edges(spec: Iterable) -> frozenset:
    out = set()
    for item in spec:
        pair = frozenset(int(c) for c in (str(item) if isinstance(item, (str, int)) else item))
        out.add(pair)
    return frozenset(out)


@dataclass(frozen=True)
class ColoredDiagram:
    """Strokes and circles of both colors; vertices are numbered 1..4."""

    z_strokes: frozenset = frozenset()
    w_strokes: frozenset = frozenset()
    z_circles: frozenset = frozenset()
    w_circles: frozenset = frozenset()
    n_vertices: int = 4

    def __post_init__(self) -> None:
        for name in ("z_strokes", "w_strokes"):
            strokes = frozenset(frozenset(s) for s in getattr(self, name))
            for s in strokes:
                if len(s) != 2:
                    raise MalformedDiagram(f"{name}: stroke {sorted(s)} needs two distinct endpoints")
                if not all(1 <= v <= self.n_vertices for v in s):
                    raise MalformedDiagram(f"{name}: stroke {sorted(s)} has an index outside 1..{self.n_vertices}")
            object.__setattr__(self, name, strokes)
        for name in ("z_circles", "w_circles"):
            circles = frozenset(int(v) for v in getattr(self, name))
            if not all(1 <= v <= self.n_vertices for v in circles):
                raise MalformedDiagram(f"{name}: index outside 1..{self.n_vertices}")
            object.__setattr__(self, name, circles)

    @classmethod
    def parse(cls, z: str = "", w: str = "", zc: str = "", wc: str = "") -> "ColoredDiagram":
        """Compact form: ``parse(z="12,34", w="14,23", zc="1234", wc="1234")``."""
        def strokes(text):
            return frozenset(frozenset(int(c) for c in tok.strip()) for tok in text.split(",") if tok.strip())
        return cls(strokes(z), strokes(w), frozenset(int(c) for c in zc), frozenset(int(c) for c in wc))

    def strokes(self, color: str) -> frozenset:
        return self.z_strokes if color == "z" else self.w_strokes

    def circles(self, color: str) -> frozenset:
        return self.z_circles if color == "z" else self.w_circles


ALL_PAIRS = "12,13,14,23,24,34"

PROBLEMATIC: dict[str, ColoredDiagram] = {
    "I": ColoredDiagram.parse(z="12", w="34", zc="12", wc="34"),
    "II": ColoredDiagram.parse(z=ALL_PAIRS, w=ALL_PAIRS),
    "III": ColoredDiagram.parse(z="12,34", w="14,23", zc="1234", wc="1234"),
    "i": ColoredDiagram.parse(z=ALL_PAIRS, w="12,13,23", wc="123"),
    "iv": ColoredDiagram.parse(z=ALL_PAIRS, w=ALL_PAIRS, wc="123"),
    "vi": ColoredDiagram.parse(z=ALL_PAIRS, w="12,34", wc="1234"),
    "ix": ColoredDiagram.parse(z=ALL_PAIRS, w=ALL_PAIRS, wc="1234"),
}
DIAGRAM_IDS = tuple(PROBLEMATIC)


@dataclass(frozen=True)
class RuleReport:
    violations: tuple[str, ...]
    unevaluated: tuple[str, ...] = (
        "Rule II: not checkable structurally (needs closeness data)",
        "Rule III: not checkable structurally (needs closeness data)",
        "Rule IV: not checkable structurally (needs closeness data)",
        "Rule V: not checkable structurally (needs closeness data)",
    )

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_rules(d: ColoredDiagram) -> RuleReport:
    """Check the structural rules (I and VI) for both colors."""
    if not isinstance(d, ColoredDiagram):
        raise MalformedDiagram(f"expected a ColoredDiagram, got {type(d).__name__}")
    found: list[str] = []
    for color in ("z", "w"):
        strokes, circles = d.strokes(color), d.circles(color)
        degree = {v: sum(v in s for s in strokes) for v in range(1, d.n_vertices + 1)}
        if not strokes:
            found.append(f"Rule I ({color}): no {color}-stroke in the diagram")
        for s in sorted(strokes, key=sorted):
            for v in sorted(s):
                if degree[v] < 2 and v not in circles:
                    found.append(f"Rule I ({color}): bare end at vertex {v} of stroke {_name(s)}")
        for v in sorted(circles):
            if degree[v] == 0:
                found.append(f"Rule I ({color}): isolated {color}-circle at vertex {v}")
        for a, b in combinations(sorted(strokes, key=sorted), 2):
            shared = a & b
            if len(shared) == 1:
                closing = frozenset((a | b) - shared)
                if closing not in strokes:
                    found.append(
                        f"Rule VI ({color}): strokes {_name(a)} and {_name(b)} without {_name(closing)}"
                    )
    return RuleReport(tuple(found))


def _name(s: frozenset) -> str:
    return "".join(str(v) for v in sorted(s))


# ---------------------------------------------------------------------------
# predicates on arrays of shape (..., 4)


@dataclass(frozen=True)
class Constraint:
    name: str
    satisfied: bool
    residual: float


def _equal(lhs, rhs, tol):
    res = np.abs(lhs - rhs) / (np.abs(lhs) + np.abs(rhs) + 1.0)
    return res <= tol, res


def _nonzero(terms: tuple, tol):
    """A sum of terms is nonzero beyond rounding; residual is the relative size of the sum."""
    total = sum(terms)
    size = sum(np.abs(t) for t in terms)
    rel = np.abs(total) / size
    return rel > tol, rel


def _negative(x, tol):
    return x < -tol, x


Predicate = Callable[[NDArray, float], dict[str, tuple[NDArray, NDArray]]]


def _pred_I(g, tol):
    g1, g2, g3, g4 = np.moveaxis(g, -1, 0)
    return {
        "G1+G2 != 0": _nonzero((g1, g2), tol),
        "G3+G4 != 0": _nonzero((g3, g4), tol),
        "|G1 G2| = |G3 G4|  (c^2 = -G1G2/(G3G4), |c| = 1)": _equal(np.abs(g1 * g2), np.abs(g3 * g4), tol),
    }


def _pred_equal(g, tol):
    g1, g2, g3, g4 = np.moveaxis(g, -1, 0)
    return {
        "G1 = G2": _equal(g1, g2, tol),
        "G2 = G3": _equal(g2, g3, tol),
        "G3 = -G4": _equal(g3, -g4, tol),
    }


def _pred_III(g, tol):
    g1, g2, g3, g4 = np.moveaxis(g, -1, 0)
    return {
        "G1 G3 = G2 G4": _equal(g1 * g3, g2 * g4, tol),
        "G1 G3 < 0": _negative(g1 * g3, tol),
        "G1+G2 != 0": _nonzero((g1, g2), tol),
        "G2+G3 != 0": _nonzero((g2, g3), tol),
        "G3+G4 != 0": _nonzero((g3, g4), tol),
        "G1+G4 != 0": _nonzero((g1, g4), tol),
    }


def _pred_vi(g, tol):
    g1, g2, g3, g4 = np.moveaxis(g, -1, 0)
    ok_a, res_a = _equal(g3, ROOT3_RATIO * g1, tol)
    ok_b, res_b = _equal(g3, g1 / ROOT3_RATIO, tol)
    return {
        "G1 = G2": _equal(g1, g2, tol),
        "G3 = G4": _equal(g3, g4, tol),
        "G3 = (sqrt3-2)^(+-1) G1": (ok_a | ok_b, np.minimum(res_a, res_b)),
    }


def _pred_none(g, tol):
    return {}


PREDICATES: dict[str, Predicate] = {
    "I": _pred_I,
    "II": _pred_equal,
    "III": _pred_III,
    "i": _pred_equal,
    "iv": _pred_equal,
    "vi": _pred_vi,
    "ix": _pred_none,
}

NOTES = {"ix": "no vorticity relation; distances scale as r_kl ~ t^(-q)"}


def normalized(gammas: NDArray) -> NDArray:
    g = np.asarray(gammas, dtype=float)
    return g / np.abs(g).max(axis=-1, keepdims=True)


def _orbit(g: NDArray) -> NDArray:
    """All relabelings: shape (..., 24, 4)."""
    return g[..., LABELINGS]


def orbit_satisfied(pred: Predicate, g: NDArray, tol: float) -> NDArray:
    """For each vorticity vector, does some labeling satisfy every relation of ``pred``?"""
    parts = pred(_orbit(normalized(g)), tol)
    if not parts:
        return np.ones(np.shape(g)[:-1], dtype=bool)
    every = np.logical_and.reduce([ok for ok, _ in parts.values()])
    return every.any(axis=-1)


def _four(system: VortexSystem) -> NDArray:
    if system.n != 4:
        raise DimensionError(f"diagram predicates need four vortices, got {system.n}")
    return system.gammas


def angular_momentum_zero(g: NDArray, tol: float) -> tuple[NDArray, NDArray]:
    g = normalized(g)
    iu = np.triu_indices(4, 1)
    pair = g[..., iu[0]] * g[..., iu[1]]
    return _equal(pair.sum(-1), 0.0, tol)


def _require_l_zero(g: NDArray, tol: float) -> None:
    ok, res = angular_momentum_zero(g, tol)
    if not bool(ok):
        raise LNonZero(f"L = sum G_j G_k is not zero (relative residual {float(res):.3e})")


@dataclass(frozen=True)
class DiagramVerdict:
    id: str
    admissible: bool
    constraints: tuple[Constraint, ...]
    labeling: tuple[int, ...]
    survives: bool | None = None
    note: str = ""


def diagram_constraints(
    diagram_id: str, system: VortexSystem, tol: float = DEFAULT_TOL, *, require_l_zero: bool = True
) -> DiagramVerdict:
    """Evaluate a diagram's relations on every labeling; report the best one.

    The labeling is given as the vertex order used, 1-based: ``(2, 1, 3, 4)``
    means diagram vertex 1 carries Γ_2.
    """
    if diagram_id not in PREDICATES:
        raise KeyError(f"unknown diagram {diagram_id!r}; choose from {DIAGRAM_IDS}")
    g = _four(system)
    if require_l_zero:
        _require_l_zero(g, tol)
    orbit = _orbit(normalized(g))
    parts = PREDICATES[diagram_id](orbit, tol)
    note = NOTES.get(diagram_id, "")
    if not parts:
        return DiagramVerdict(diagram_id, True, (), (1, 2, 3, 4), note=note)
    oks = np.array([ok for ok, _ in parts.values()])  # (relations, 24)
    failures = (~oks).sum(0)
    best = int(np.argmin(failures))
    constraints = tuple(
        Constraint(name, bool(ok[best]), float(res[best])) for name, (ok, res) in parts.items()
    )
    labeling = tuple(int(i) + 1 for i in LABELINGS[best])
    return DiagramVerdict(diagram_id, bool(failures[best] == 0), constraints, labeling, note=note)


# ---------------------------------------------------------------------------
# propositions on sub-configurations


@dataclass(frozen=True)
class PropositionResult:
    name: str
    vertices: tuple[int, ...]
    satisfied: bool
    residual: float


def proposition_checks(
    system: VortexSystem,
    *,
    circled_pairs: Iterable[tuple[int, int]] = (),
    close_isolated_pairs: Iterable[tuple[int, int]] = (),
    triangles: Iterable[tuple[int, int, int]] = (),
    quads: Iterable[tuple[int, int, int, int]] = (),
    tol: float = DEFAULT_TOL,
) -> list[PropositionResult]:
    """Vorticity conditions attached to sub-diagram shapes (vertices are 1-based).

    * ``circled_pairs``: a stroke with both ends circled needs Γ_k + Γ_l != 0.
    * ``close_isolated_pairs``: an isolated stroke whose ends are close needs Γ_k + Γ_l = 0.
    * ``triangles``: an isolated uncircled triangle needs 1/Γ_1 + 1/Γ_2 + 1/Γ_3 = 0
      or Γ_1Γ_2 + Γ_2Γ_3 + Γ_3Γ_1 = 0.
    * ``quads``: a fully stroked four-vertex sub-diagram needs its pair-product sum to vanish.
    """
    g = normalized(system.gammas)
    out: list[PropositionResult] = []

    def pick(vs):
        idx = [v - 1 for v in vs]
        if any(i < 0 or i >= g.size for i in idx) or len(set(idx)) != len(idx):
            raise ValueError(f"invalid vertex subset {vs}")
        return g[idx]

    for vs in circled_pairs:
        a, b = pick(vs)
        ok, res = _nonzero((a, b), tol)
        out.append(PropositionResult("pair_sum_nonzero", tuple(vs), bool(ok), float(res)))
    for vs in close_isolated_pairs:
        a, b = pick(vs)
        ok, res = _equal(a, -b, tol)
        out.append(PropositionResult("isolated_pair_zero_sum", tuple(vs), bool(ok), float(res)))
    for vs in triangles:
        a, b, c = pick(vs)
        ok1, res1 = _equal(1 / a + 1 / b, -1 / c, tol)
        ok2, res2 = _equal(a * b + b * c, -c * a, tol)
        out.append(PropositionResult(
            "triangle_relation", tuple(vs), bool(ok1 or ok2), float(min(res1, res2))
        ))
    for vs in quads:
        sub = pick(vs)
        ok, res = angular_momentum_zero(sub, tol)
        out.append(PropositionResult("quad_angular_momentum", tuple(vs), bool(ok), float(res)))
    return out


# ---------------------------------------------------------------------------
# scenario split and survivor lists


SURVIVORS = {
    "generic": ("III", "ix"),
    "equal": ("II", "iv", "ix"),
    "sqrt3-2": ("III", "vi", "ix"),
}


def _pred_root3_scenario(g, tol):
    g1, g2, g3, g4 = np.moveaxis(g, -1, 0)
    return {
        "G1 = G2": _equal(g1, g2, tol),
        "G3 = G4": _equal(g3, g4, tol),
        "G3 = (sqrt3-2) G1": _equal(g3, ROOT3_RATIO * g1, tol),
    }


def scenario_flags(g: NDArray, tol: float = DEFAULT_TOL) -> tuple[NDArray, NDArray]:
    """Boolean arrays: the equal case and the (sqrt3-2) case, up to relabeling."""
    return orbit_satisfied(_pred_equal, g, tol), orbit_satisfied(_pred_root3_scenario, g, tol)


def scenario(system: VortexSystem, tol: float = DEFAULT_TOL) -> str:
    equal, root3 = scenario_flags(_four(system), tol)
    if equal and root3:
        raise AssertionError("vorticities fall in two scenarios at once")
    return "equal" if equal else "sqrt3-2" if root3 else "generic"


@dataclass(frozen=True)
class AdmissibilityReport:
    scenario: str
    survivors: tuple[str, ...]
    diagrams: tuple[DiagramVerdict, ...] = field(default_factory=tuple)

    def admissible_ids(self) -> set[str]:
        return {d.id for d in self.diagrams if d.admissible}

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "survivors": list(self.survivors),
            "diagrams": [
                {
                    "id": d.id,
                    "admissible": d.admissible,
                    "survives": d.survives,
                    "labeling": list(d.labeling),
                    "note": d.note,
                    "constraints": [
                        {"name": c.name, "satisfied": c.satisfied, "residual": c.residual}
                        for c in d.constraints
                    ],
                }
                for d in self.diagrams
            ],
        }


def narrowed_admissibility(system: VortexSystem, tol: float = DEFAULT_TOL) -> AdmissibilityReport:
    """Scenario, the diagrams that survive the case analysis, and every raw predicate verdict."""
    g = _four(system)
    _require_l_zero(g, tol)
    case = scenario(system, tol)
    survivors = SURVIVORS[case]
    verdicts = []
    for did in DIAGRAM_IDS:
        v = diagram_constraints(did, system, tol, require_l_zero=False)
        verdicts.append(DiagramVerdict(v.id, v.admissible, v.constraints, v.labeling, did in survivors, v.note))
    return AdmissibilityReport(case, survivors, tuple(verdicts))


# ---------------------------------------------------------------------------
# consistency checks used on random samples


def excluded_diagram_relations(g: NDArray, tol: float = DEFAULT_TOL) -> tuple[NDArray, NDArray]:
    """The two relations left over from the excluded diagram viii, as relative residuals.

    Only labelings that pair vertices {1,2} against {3,4} matter; the minimum
    over the three pairings is returned for each relation jointly.
    """
    g = normalized(g)
    best = None
    for p in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)):
        g1, g2, g3, g4 = (g[..., i] for i in p)
        s12, s34 = g1 + g2, g3 + g4
        r1 = s12 * (g3**2 + g4**2) - (g1**2 + g2**2) * s34
        r2 = g1 * g2 * s12**2 + g3 * g4 * s34**2 - s12**2 * s34**2
        score = np.maximum(np.abs(r1), np.abs(r2))
        best = score if best is None else np.minimum(best, score)
    return best <= tol, best


def contradiction_flags(g: NDArray, tol: float = DEFAULT_TOL) -> dict[str, NDArray]:
    """Relation conjunctions that no L = 0 vorticity vector can satisfy."""
    gn = _orbit(normalized(g))
    g1, g2, g3, g4 = np.moveaxis(gn, -1, 0)
    plus, _ = _equal(g1 * g3, g2 * g4, tol)
    minus, _ = _equal(g1 * g3, -g2 * g4, tol)
    p12, _ = _equal(g1 * g2, g3 * g4, tol)
    p14, _ = _equal(g1 * g4, g2 * g3, tol)
    equal, root3 = scenario_flags(g, tol)
    viii, _ = excluded_diagram_relations(g, tol)
    return {
        "opposite_products": (plus & minus).any(-1),
        "three_product_equalities": (plus & p12 & p14).any(-1),
        "two_scenarios": equal & root3,
        "diagram_viii_relations": viii,
    }


def random_zero_momentum(rng: np.random.Generator, count: int) -> NDArray:
    """Random vorticity vectors with L = 0: three free entries, the fourth solved for."""
    out = np.empty((0, 4))
    while out.shape[0] < count:
        g = rng.uniform(-1.0, 1.0, size=(2 * count, 3))
        s = g.sum(1)
        e2 = g[:, 0] * g[:, 1] + g[:, 0] * g[:, 2] + g[:, 1] * g[:, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            g4 = -e2 / s
        ok = (np.abs(s) > 1e-3) & (np.abs(g).min(1) > 1e-3) & (np.abs(g4) > 1e-3) & (np.abs(g4) < 1e3)
        out = np.vstack([out, np.column_stack([g[ok], g4[ok]])])
    return out[:count]
