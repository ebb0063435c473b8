import math
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexcollapse import DimensionError, LNonZero, MalformedDiagram, VortexSystem
from vortexcollapse.diagrams import (
    DIAGRAM_IDS, PROBLEMATIC, ColoredDiagram, contradiction_flags, diagram_constraints,
    excluded_diagram_relations, narrowed_admissibility, proposition_checks,
    random_zero_momentum, scenario, scenario_flags, validate_rules,
)

R = math.sqrt(3) - 2
EQUAL = VortexSystem.of(1, 1, 1, -1)
ROOT3 = VortexSystem.of(1, 1, R, R)


def _generic():
    g1, g2, g3 = 1.0, 2.0, 0.7
    return VortexSystem.of(g1, g2, g3, -(g1 * g2 + g1 * g3 + g2 * g3) / (g1 + g2 + g3))


def test_problematic_diagrams_pass_structural_rules():
    for d in PROBLEMATIC.values():
        assert validate_rules(d).ok
    assert len(validate_rules(PROBLEMATIC["I"]).unevaluated) == 4


def test_rule_one_bare_stroke():
    report = validate_rules(ColoredDiagram.parse(z="12", w="34", wc="34"))
    assert any(v.startswith("Rule I (z): bare end") for v in report.violations)


def test_rule_one_isolated_circle():
    report = validate_rules(ColoredDiagram.parse(z="12", w="34", zc="123", wc="34"))
    assert "Rule I (z): isolated z-circle at vertex 3" in report.violations


def test_rule_six_open_triangle():
    report = validate_rules(ColoredDiagram.parse(z="12,23", w="12,23,13", zc="13"))
    assert report.violations == ("Rule VI (z): strokes 12 and 23 without 13",)


def test_malformed_diagrams():
    with pytest.raises(MalformedDiagram):
        ColoredDiagram.parse(z="15")
    with pytest.raises(MalformedDiagram):
        ColoredDiagram(z_strokes=frozenset({frozenset({2})}))
    with pytest.raises(MalformedDiagram):
        ColoredDiagram.parse(z="12", zc="7")


def test_equal_case_predicates():
    admissible = {d for d in DIAGRAM_IDS if diagram_constraints(d, EQUAL).admissible}
    assert {"II", "i", "iv", "ix"} <= admissible
    assert "vi" not in admissible
    assert diagram_constraints("ix", EQUAL).note


def test_root3_case_predicates():
    assert abs(ROOT3.angular_momentum) <= 1e-12
    assert diagram_constraints("vi", ROOT3).admissible
    assert VortexSystem.of(1 / R, 1 / R, 1, 1).angular_momentum == pytest.approx(0, abs=1e-12)
    assert diagram_constraints("vi", VortexSystem.of(1 / R, 1 / R, 1, 1)).admissible


def test_generic_case_predicates():
    system = _generic()
    verdicts = {d: diagram_constraints(d, system) for d in DIAGRAM_IDS}
    assert {d for d, v in verdicts.items() if v.admissible} == {"ix"}
    # the best labeling for III still reports why it fails
    assert not all(c.satisfied for c in verdicts["III"].constraints)


def test_diagram_errors():
    with pytest.raises(DimensionError):
        diagram_constraints("I", VortexSystem.of(1, 1, -0.5))
    with pytest.raises(LNonZero):
        diagram_constraints("I", VortexSystem.of(1, 2, 3, 4))
    with pytest.raises(LNonZero):
        narrowed_admissibility(VortexSystem.of(1, 2, 3, 4))


def test_proposition_examples():
    tri = proposition_checks(VortexSystem.of(1, 1, -0.5, 2), triangles=[(1, 2, 3)])
    assert tri[0].satisfied
    pair = proposition_checks(VortexSystem.of(1, -1, 2, 3), circled_pairs=[(1, 2)])
    assert not pair[0].satisfied
    close = proposition_checks(VortexSystem.of(1, -1, 2, 3), close_isolated_pairs=[(1, 2)])
    assert close[0].satisfied
    quad = proposition_checks(EQUAL, quads=[(1, 2, 3, 4)])
    assert quad[0].satisfied and quad[0].residual == 0.0
    with pytest.raises(ValueError):
        proposition_checks(EQUAL, triangles=[(1, 1, 2)])


def test_narrowed_survivor_lists():
    assert narrowed_admissibility(EQUAL).survivors == ("II", "iv", "ix")
    assert narrowed_admissibility(ROOT3).survivors == ("III", "vi", "ix")
    assert narrowed_admissibility(_generic()).survivors == ("III", "ix")
    assert scenario(EQUAL) == "equal" and scenario(ROOT3) == "sqrt3-2"
    report = narrowed_admissibility(EQUAL)
    assert [d.id for d in report.diagrams if d.survives] == ["II", "iv", "ix"]
    assert report.to_dict()["scenario"] == "equal"


def _zero_momentum_vectors():
    rng = np.random.default_rng(7)
    yield from random_zero_momentum(rng, 15)
    yield EQUAL.gammas
    yield ROOT3.gammas
    yield np.array([1 / R, 1 / R, 1, 1])


@pytest.mark.parametrize("g", list(_zero_momentum_vectors()))
def test_permutation_equivariance(g):
    base = narrowed_admissibility(VortexSystem(g))
    for perm in list(permutations(range(4)))[::5]:
        other = narrowed_admissibility(VortexSystem(g[list(perm)]))
        assert other.scenario == base.scenario
        assert other.admissible_ids() == base.admissible_ids()


@pytest.mark.parametrize("kappa", [2.0, -3.0, 0.1])
@pytest.mark.parametrize("g", list(_zero_momentum_vectors())[-6:])
def test_scale_invariance(g, kappa):
    a = narrowed_admissibility(VortexSystem(g))
    b = narrowed_admissibility(VortexSystem(kappa * g))
    assert a.scenario == b.scenario and a.admissible_ids() == b.admissible_ids()
    for x, y in zip(a.diagrams, b.diagrams):
        assert [c.satisfied for c in x.constraints] == [c.satisfied for c in y.constraints]


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_scenarios_partition_zero_momentum_vectors(g1, g2, g3):
    s = g1 + g2 + g3
    if min(abs(g1), abs(g2), abs(g3)) < 1e-3 or abs(s) < 1e-3:
        return
    g4 = -(g1 * g2 + g1 * g3 + g2 * g3) / s
    if abs(g4) < 1e-3:
        return
    g = np.array([g1, g2, g3, g4])
    equal, root3 = scenario_flags(g)
    assert not (equal and root3)
    assert not any(bool(v) for v in contradiction_flags(g).values())


def test_contradictions_absent_on_special_vectors():
    for g in (EQUAL.gammas, ROOT3.gammas):
        flags = contradiction_flags(g)
        assert not any(bool(v) for v in flags.values())


def test_excluded_diagram_relations_fail_on_zero_momentum_samples():
    rng = np.random.default_rng(3)
    ok, residual = excluded_diagram_relations(random_zero_momentum(rng, 2000))
    assert not ok.any()
    assert residual.min() > 0
