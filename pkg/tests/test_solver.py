import numpy as np
import pytest

from vortexcollapse import Configuration, DimensionError, VortexSystem, classify, invariants
from vortexcollapse.families import FIGURE_LEFT_A, FamilyParameter, family_configuration, family_lambda
from vortexcollapse.solver import (
    CentralCandidate, SolutionSet, dedup, evaluate_system, jacobian, lambda_grid,
    quartic_jacobian, rational_residual, scan_lambda, solve_fixed_lambda, stationarity_residual,
)

G4 = VortexSystem.of(1, 1, 1, -1)


def _random_candidate(rng, n=4):
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    return CentralCandidate(z, w, np.exp(1j * rng.uniform(0, 2 * np.pi)))


def test_zero_candidate_is_trivial_solution():
    cand = CentralCandidate(np.zeros(4), np.zeros(4), 1j)
    ev = evaluate_system(cand, G4)
    assert all(v == 0 for v in ev.residuals().values())
    assert ev.residual_norm == 0.0
    assert cand.is_trivial()


def test_colliding_candidate_flagged_trivial():
    cand = CentralCandidate([1, 1, 2, 3], [0.5, 1, 1.5, 2], 1)
    assert cand.is_trivial()


def test_quartic_form_needs_four_vortices():
    cand = CentralCandidate(np.ones(3), np.ones(3), 1)
    with pytest.raises(DimensionError):
        evaluate_system(cand, VortexSystem.of(1, 1, 1))
    with pytest.raises(DimensionError):
        jacobian(cand, VortexSystem.of(1, 1, 1))


def test_quartic_combinations_equal_cleared_rational_residuals(rng):
    """F/G combinations are weighted sums of the rational residuals (independent route)."""
    g = np.array([1.0, 2.0, 0.7, -1.3])
    system = VortexSystem(g)
    for _ in range(20):
        cand = _random_candidate(rng)
        z, w, lam = cand.z, cand.w, cand.lam
        r = rational_residual(z, w, g, lam)
        ez, ew = r[:4], r[4:8]
        prod_z = np.array([np.prod(np.delete(z, s)) for s in range(4)])
        prod_w = np.array([np.prod(np.delete(w, s)) for s in range(4)])
        res = evaluate_system(cand, system).residuals()
        assert res["F_z - lam f_z"] == pytest.approx(np.sum(g * z**2 * ew), rel=1e-10)
        assert res["lam F_w - f_w"] == pytest.approx(np.sum(g * w**2 * ez), rel=1e-10)
        assert res["G_z + lam g_z"] == pytest.approx(np.sum(g * prod_z * ew), rel=1e-10)
        assert res["lam G_w + g_w"] == pytest.approx(np.sum(g * prod_w * ez), rel=1e-10)
        assert abs(res["F_z - lam f_z"]) > 1e-6


def test_jacobian_matches_central_differences(rng):
    h = 1e-7
    for _ in range(10):
        cand = _random_candidate(rng)
        jac = jacobian(cand, G4)
        x = np.concatenate([cand.z.real, cand.w.real, cand.z.imag, cand.w.imag])

        def f(x):
            c = CentralCandidate(x[:4] + 1j * x[8:12], x[4:8] + 1j * x[12:], cand.lam)
            r = np.array(list(evaluate_system(c, G4).residuals().values()))
            return np.concatenate([r.real, r.imag])

        fd = np.column_stack([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(16)])
        assert np.abs(jac - fd).max() <= 1e-6


def test_jacobian_at_origin_keeps_only_linear_rows():
    cand = CentralCandidate(np.zeros(4), np.zeros(4), np.exp(0.4j))
    jc = jacobian(cand, G4, real=False)
    assert np.all(jc[[2, 6, 7]] == 0)  # I and the quartic rows
    assert np.any(jc[0] != 0) and np.any(jc[1] != 0) and np.any(jc[3] != 0)


def test_cubic_row_partials_scale_quadratically(rng):
    cand = _random_candidate(rng)
    base = quartic_jacobian(cand.z, cand.w, G4.gammas, 0.0)
    doubled = quartic_jacobian(2 * cand.z, 2 * cand.w, G4.gammas, 0.0)
    assert doubled[4, :4] == pytest.approx(4 * base[4, :4], rel=1e-13)


def test_real_family_point_solves_both_forms():
    p = FamilyParameter(FIGURE_LEFT_A)
    config, system = family_configuration(p)
    cand = CentralCandidate.from_configuration(config, family_lambda(p))
    assert cand.is_real()
    assert np.abs(rational_residual(cand.z, cand.w, system.gammas, cand.lam)[:-1]).max() < 1e-10
    assert stationarity_residual(cand, system) < 1e-10


def _check_real_collapse(result, system, lam):
    for cand in result.real():
        assert stationarity_residual(cand, system) <= 1e-9
        c = classify(Configuration(cand.z), system)
        assert c.kind == "collapse" and c.lam == pytest.approx(lam, abs=1e-8)
        inv = invariants(Configuration(cand.z), system)
        assert abs(inv.angular_impulse) < 1e-9 and abs(inv.weighted_sum) < 1e-9
        assert abs(inv.total_vorticity) > 1e-9


def test_three_vortex_collapse_found_inside_arc():
    system = VortexSystem.of(1, 1, -0.5)
    lam = np.exp(0.2j)
    result = solve_fixed_lambda(system, lam, starts=2000, seed=0)
    assert len(result.real()) >= 1
    _check_real_collapse(result, system, lam)


@pytest.mark.xfail(strict=True, reason="arg(lam) = pi/3 lies outside the arc |arg lam| < asin(1/3) "
                   "swept by real three-vortex collapse configurations with these strengths")
def test_three_vortex_collapse_at_sixty_degrees():
    system = VortexSystem.of(1, 1, -0.5)
    result = solve_fixed_lambda(system, np.exp(1j * np.pi / 3), starts=10_000, seed=0)
    assert len(result.real()) >= 1


def _triangle_arc():
    """Oracle: every S = 0 triangle of (1, 1, -1/2) collapses; collect arg of normalized lam.

    With z = (0, 1, x + iy), S = 0 is the circle (x - 1/2)^2 + y^2 = 3/4.
    """
    system = VortexSystem.of(1, 1, -0.5)
    args = []
    for t in np.linspace(0.01, np.pi - 0.01, 400):
        z3 = 0.5 + np.sqrt(0.75) * np.exp(1j * t)
        c = classify(Configuration([0, 1, z3]), system)
        assert c.kind == "collapse"
        args.append(np.angle(c.lam))
    return np.array(args)


def test_real_solutions_match_triangle_arc():
    arc = np.abs(_triangle_arc())
    assert arc.max() == pytest.approx(np.arcsin(1 / 3), abs=1e-4)
    system = VortexSystem.of(1, 1, -0.5)
    inside = solve_fixed_lambda(system, np.exp(0.33j), starts=1000, seed=2)
    outside = solve_fixed_lambda(system, np.exp(0.35j), starts=1000, seed=2)
    assert len(inside.real()) >= 1 and len(outside.real()) == 0
    assert len(outside) >= 1  # complex solutions persist


def test_converged_candidates_satisfy_the_quartic_system():
    lam = np.exp(0.3j)
    result = solve_fixed_lambda(G4, lam, starts=600, seed=3)
    assert len(result) > 0
    for cand in result.candidates:
        assert evaluate_system(cand, G4).residual_norm <= 1e-9
        if cand.is_real():
            assert stationarity_residual(cand, G4) <= 1e-9
    assert len(result) <= 98


def test_solutions_are_deterministic():
    a = solve_fixed_lambda(G4, np.exp(0.7j), starts=200, seed=11)
    b = solve_fixed_lambda(G4, np.exp(0.7j), starts=200, seed=11)
    assert len(a) == len(b)
    for x, y in zip(a.candidates, b.candidates):
        assert np.array_equal(x.vector(), y.vector())


def test_counts_symmetric_under_conjugation_and_negation():
    system = VortexSystem.of(1, 1, -0.5)
    lam = np.exp(2j * np.pi * 3 / 16)
    counts = {}
    for mu in (lam, np.conj(lam), -lam):
        r = solve_fixed_lambda(system, mu, starts=1500, seed=1)
        counts[mu] = (len(r), r.per_lambda_counts[mu])
    assert len(set(c[0] for c in counts.values())) == 1
    # real solutions pair under conjugation only (rotation by i makes them complex)
    assert counts[lam][1] == counts[np.conj(lam)][1]


def test_five_vortex_family_lambda_has_solutions():
    p = FamilyParameter(FIGURE_LEFT_A)
    _, system = family_configuration(p)
    result = solve_fixed_lambda(system, family_lambda(p), starts=400, seed=0)
    assert len(result.real()) >= 1


def test_dedup_merges_sign_pairs_and_respects_threshold():
    z = np.array([1.0, -0.3 + 0.2j, 0.1j])
    w = np.array([0.5, 0.2, -1j])
    a = CentralCandidate(z, w, 1j)
    assert len(dedup(SolutionSet((a, a.negated())), 1e-8)) == 1
    assert len(dedup(SolutionSet(()))) == 0
    tol = 1e-6
    b = CentralCandidate(z + np.array([2 * tol, 0, 0]), w, 1j)
    assert len(dedup(SolutionSet((a, b)), tol)) == 2
    c = CentralCandidate(z + np.array([0.5 * tol, 0, 0]), w, 1j)
    assert len(dedup(SolutionSet((a, c)), tol)) == 1


def test_dedup_is_order_independent(rng):
    cands = [_random_candidate(rng, 3) for _ in range(5)]
    cands = cands + [c.negated() for c in cands]
    one = dedup(SolutionSet(tuple(cands)))
    two = dedup(SolutionSet(tuple(reversed(cands))))
    assert [c.vector().tolist() for c in one.candidates] == [c.vector().tolist() for c in two.candidates]


def test_rotation_fold_pools_opposite_lambdas():
    p = FamilyParameter(FIGURE_LEFT_A)
    config, _ = family_configuration(p)
    lam = family_lambda(p)
    a = CentralCandidate.from_configuration(config, lam)
    b = CentralCandidate(1j * a.z, 1j * a.w, -lam)
    assert len(dedup(SolutionSet((a, b)))) == 2
    assert len(dedup(SolutionSet((a, b)), fold_rotation=True)) == 1


def test_lambda_grid_and_scan_tally():
    grid = lambda_grid(8)
    assert grid[0] == 1 and grid[2] == 1j and grid[4] == -1 and grid[6] == -1j
    result = scan_lambda(VortexSystem.of(1, 1, -0.5), grid_size=8, starts=200, seed=0)
    assert result.per_lambda_counts[1] == 0 and result.per_lambda_counts[-1] == 0
    assert len(result.lambda_grid) == 8
    with pytest.raises(ValueError):
        scan_lambda(VortexSystem.of(1, 1, -0.5), grid_size=3)


def test_warns_off_unit_circle():
    with pytest.warns(RuntimeWarning):
        solve_fixed_lambda(VortexSystem.of(1, 1, -0.5), 2.0, starts=10)
