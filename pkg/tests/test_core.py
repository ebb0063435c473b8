import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import loop_velocity
from vortexcollapse import (
    BadVorticity, CollisionError, Configuration, DimensionError, VortexSystem,
    classify, invariants, velocity_field,
)
from vortexcollapse.families import FIGURE_LEFT_A, FamilyParameter, family_configuration, family_lambda


def test_two_equal_vortices_hand_values():
    v = velocity_field(Configuration([-1, 1]), VortexSystem.of(1, 1))
    assert v == pytest.approx([-0.5, 0.5], abs=1e-15)


def test_opposite_pair_translates():
    # V_1 = Γ_2 / conj(z_1 - z_2) = -1 / -2 and V_2 = Γ_1 / conj(z_2 - z_1) = 1 / 2
    v = velocity_field(Configuration([-1, 1]), VortexSystem.of(1, -1))
    assert v == pytest.approx([0.5, 0.5], abs=1e-15)


def test_family_point_velocity_is_lambda_times_position():
    p = FamilyParameter(FIGURE_LEFT_A)
    config, system = family_configuration(p)
    v = velocity_field(config, system)
    assert np.abs(v - family_lambda(p) * config.positions).max() <= 1e-10


def test_velocity_agrees_with_loop_oracle(rng):
    for n in range(2, 7):
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        g = rng.uniform(0.2, 2.0, n) * rng.choice([-1, 1], n)
        v = velocity_field(Configuration(z), VortexSystem(g))
        assert np.abs(v - loop_velocity(z, g)).max() <= 1e-12 * (1 + np.abs(v).max())


def test_angular_momentum_examples():
    assert VortexSystem.of(1, 1, 1, -1).angular_momentum == 0.0
    assert VortexSystem.of(1, 1, -0.5, -0.5, 0.75).angular_momentum == pytest.approx(0.0, abs=1e-15)
    # brute-force pair sum as an independent route
    g = [1, 1, -0.5, -0.5, 0.75]
    assert sum(g[j] * g[k] for j in range(5) for k in range(j + 1, 5)) == 0.0


def test_invalid_inputs():
    with pytest.raises(BadVorticity):
        VortexSystem.of(1, 0, 2)
    with pytest.raises(DimensionError):
        VortexSystem.of(1)
    with pytest.raises(DimensionError):
        velocity_field(Configuration([0, 1, 2]), VortexSystem.of(1, 1))
    with pytest.raises(CollisionError):
        velocity_field(Configuration([0, 1, 1]), VortexSystem.of(1, 1, 1))


def test_classify_equilateral_triangle():
    z = np.exp(2j * np.pi * np.arange(3) / 3)
    c = classify(Configuration(z), VortexSystem.of(1, 1, 1))
    assert c.kind == "relative_equilibrium"
    assert c.lam.imag == 0.0 and c.lam.real != 0.0
    assert abs(c.center) < 1e-12


def test_classify_translation():
    c = classify(Configuration([-1, 1]), VortexSystem.of(1, -1))
    assert c.kind == "rigid_translation"
    assert c.velocity == pytest.approx(0.5)
    assert not c.warnings


def test_classify_family_collapse():
    config, system = family_configuration(FamilyParameter(FIGURE_LEFT_A))
    c = classify(config, system)
    assert c.kind == "collapse"
    assert abs(abs(c.lam) - 1) < 1e-12 and c.lam.imag != 0
    assert all(abs(c.checks[k]) < 1e-12 for k in ("S", "I", "L"))
    assert not c.warnings


def test_classify_generic_is_non_stationary():
    c = classify(Configuration([0, 1, 3j, 2 + 2j]), VortexSystem.of(1, 2, 3, 4))
    assert c.kind == "non_stationary"


def test_equilibrium_detected():
    # Γ = (2, -1, 2) at -1, 0, 1 is at rest, and L = -2 + 4 - 2 = 0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        c = classify(Configuration([-1, 0, 1]), VortexSystem.of(2, -1, 2))
    assert c.kind == "equilibrium"


def test_necessary_condition_violation_is_a_warning():
    # an absurdly loose tolerance calls a rotating pair "at rest", though L = 1
    with pytest.warns(RuntimeWarning, match="L != 0"):
        c = classify(Configuration([-1, 1]), VortexSystem.of(1, 1), tol=10.0)
    assert c.kind == "equilibrium"


def _random_setup(data, n):
    xs = data.draw(st.lists(st.floats(-3, 3), min_size=2 * n, max_size=2 * n))
    gs = data.draw(st.lists(st.floats(0.1, 3), min_size=n, max_size=n))
    signs = data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=n, max_size=n))
    z = np.array(xs[:n]) + 1j * np.array(xs[n:])
    config = Configuration(z)
    if not config.is_collision_free(1e-3):
        return None
    return config, VortexSystem(np.array(gs) * np.array(signs))


@settings(max_examples=200, deadline=None)
@given(st.data(), st.integers(2, 6))
def test_weighted_sum_identities(data, n):
    setup = _random_setup(data, n)
    if setup is None:
        return
    config, system = setup
    inv = invariants(config, system)
    s_alt = inv.total_vorticity * inv.angular_impulse - abs(inv.moment) ** 2
    assert abs(inv.weighted_sum - s_alt) <= 1e-12 * (1 + abs(inv.weighted_sum)) * 10
    lhs = inv.total_vorticity**2 - 2 * inv.angular_momentum
    assert abs(lhs - system.sum_of_squares) <= 1e-14 * system.sum_of_squares * 10
    assert lhs > 0


@settings(max_examples=100, deadline=None)
@given(st.data(), st.integers(2, 6), st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 2 * math.pi))
def test_velocity_translation_and_rotation(data, n, ax, ay, theta):
    setup = _random_setup(data, n)
    if setup is None:
        return
    config, system = setup
    v = velocity_field(config, system)
    shifted = velocity_field(config.scaled(1.0, complex(ax, ay)), system)
    rot = np.exp(1j * theta)
    turned = velocity_field(config.scaled(rot), system)
    scale = 1 + np.abs(v).max()
    assert np.abs(shifted - v).max() <= 1e-12 * scale
    assert np.abs(turned - rot * v).max() <= 1e-13 * scale


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 5), st.floats(0, 2 * math.pi), st.floats(-3, 3), st.floats(-3, 3))
def test_classify_is_invariant_under_similarity(r, theta, sx, sy):
    config, system = family_configuration(FamilyParameter(FIGURE_LEFT_A))
    base = classify(config, system)
    b = r * np.exp(1j * theta)
    moved = classify(config.scaled(b, complex(sx, sy)), system)
    assert moved.kind == base.kind == "collapse"
    assert moved.lam == pytest.approx(base.lam / abs(b) ** 2, rel=1e-9)
    assert moved.center == pytest.approx(complex(sx, sy), abs=1e-9 * (1 + abs(complex(sx, sy))))
