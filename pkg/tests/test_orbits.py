import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from rspin.holonomy import arf
from rspin.orbits import (
    TwistGenerator,
    arf_orbit_separator,
    dehn_twist,
    lambdas_from_R,
    o0_order,
    o0_order_snf,
    orbit_count_formula,
    orbit_enumerate,
    sl2z_normal_form,
    sl2z_reducer,
    twist_generators,
)
from rspin.plcw import INFINITE, SpinSurfaceParams, existence_check, is_admissible, standard_surface

seeds = st.integers(0, 2**32 - 1)


@st.composite
def structures(draw, r_max=6, g_max=3, b_max=3):
    r = draw(st.integers(1, r_max))
    g = draw(st.integers(0, g_max))
    b = draw(st.integers(1 if g == 0 else 0, b_max))
    head = draw(st.lists(st.integers(0, r - 1), min_size=max(b - 1, 0), max_size=max(b - 1, 0)))
    if b:
        last = (2 - 2 * g - b - sum(head)) % r
        R = head + [last]
    else:
        R = []
        if (2 - 2 * g) % r:
            g, r = 1, r
    lam = lambdas_from_R(R, r)
    draw_z = lambda n: tuple(draw(st.integers(0, r - 1)) for _ in range(n))
    return SpinSurfaceParams.incoming(g, r, draw_z(g), draw_z(g), draw_z(b), lam)


@given(structures(), st.data())
@settings(max_examples=80, deadline=None)
def test_twist_then_inverse_is_identity(p, data):
    gens = twist_generators(p.g, p.b)
    if not gens:
        return
    tw = data.draw(st.sampled_from(gens))
    k = data.draw(st.integers(-5, 5))
    assert dehn_twist(dehn_twist(p, tw, k), tw, -k) == p
    q = p
    for _ in range(3):
        q = dehn_twist(q, tw)
    assert q == dehn_twist(p, tw, 3)


@given(structures(), st.data())
@settings(max_examples=60, deadline=None)
def test_twists_keep_structures_admissible(p, data):
    gens = twist_generators(p.g, p.b)
    if not gens:
        return
    q = dehn_twist(p, data.draw(st.sampled_from(gens)))
    assert q.labels == p.labels
    assert is_admissible(standard_surface(q))


def test_twist_index_errors():
    with pytest.raises(ValueError):
        TwistGenerator("x")
    with pytest.raises(ValueError):
        dehn_twist(SpinSurfaceParams(1, 3, (0,), (0,)), TwistGenerator("d", 0))


def test_boundary_twist_example():
    p = SpinSurfaceParams.incoming(0, 5, (), (), (3, 0, 0), (3, 0, 1))
    q = dehn_twist(p, TwistGenerator("boundary", 0))
    assert q.u[0] == 1


@pytest.mark.parametrize(
    "g, b, r, lam, expected",
    [
        (2, 0, 2, (), 2),
        (2, 1, 3, (1,), 1),
        (1, 0, 6, (), 4),
        (0, 2, 4, (3, 3), 2),
        (1, 2, 2, (1, 1), 2),
        (2, 0, 1, (), 1),
    ],
)
def test_orbit_examples(g, b, r, lam, expected):
    R = [l - 1 for l in lam]
    assert orbit_enumerate(g, b, r, R).brute_force_count == expected
    assert orbit_count_formula(g, b, r, lambdas=lam) == expected


def test_orbit_report_representatives():
    rep = orbit_enumerate(1, 1, 4, [3])
    assert rep.agreement
    assert len(rep.representatives) == rep.brute_force_count
    for p in rep.representatives:
        assert existence_check(p.g, p.b, p.R, p.r)


def test_infinite_cases():
    assert orbit_count_formula(1, 0, 0, R=[]) == INFINITE
    assert orbit_count_formula(1, 2, 0, lambdas=(0, 0)) == INFINITE
    assert orbit_count_formula(1, 2, 0, lambdas=(3, -3)) == 4
    assert o0_order(0, [0, 0]) == INFINITE
    assert orbit_count_formula(2, 1, 0, R=[-3]) == 2
    with pytest.raises(ValueError):
        orbit_count_formula(2, 0, 0, R=[])
    with pytest.raises(ValueError):
        orbit_enumerate(1, 0, 0, [])
    with pytest.raises(ValueError):
        orbit_count_formula(2, 0, 3, R=[])


@given(st.integers(1, 12), st.integers(2, 4), st.data())
@settings(max_examples=120, deadline=None)
def test_genus_zero_formula_matches_smith_form(r, b, data):
    head = data.draw(st.lists(st.integers(0, r - 1), min_size=b - 1, max_size=b - 1))
    R = head + [(2 - b - sum(head)) % r]
    assert o0_order(r, R) == o0_order_snf(r, R)


@given(st.integers(2, 4), st.lists(st.integers(-6, 6), min_size=1, max_size=3))
@settings(max_examples=80, deadline=None)
def test_genus_zero_formula_matches_smith_form_r0(b, head):
    head = (head * 3)[: b - 1]
    R = head + [2 - b - sum(head)]
    assert o0_order(0, R) == o0_order_snf(0, R)


@given(st.integers(0, 30), st.integers(-50, 50), st.integers(-50, 50))
def test_sl2z_reducer(r, s, t):
    d, M = sl2z_reducer(r, s, t)
    (a, b), (c, e) = M
    assert a * e - b * c == 1
    x, y = a * s + b * t, c * s + e * t
    if r:
        assert r % d == 0
        assert x % r == 0 and (y - d) % r == 0
        assert d == math.gcd(r, s, t)
    else:
        assert (x, y) == (0, d)


def test_sl2z_normal_form_classes():
    # in Z_6^2 the orbits are labelled by the divisors 1, 2, 3, 6
    forms = {sl2z_normal_form(6, s, t) for s in range(6) for t in range(6)}
    assert forms == {1, 2, 3, 6}


@given(st.sampled_from([2, 4, 6]), seeds)
@settings(max_examples=40, deadline=None)
def test_arf_separator_is_the_arf_sign(r, seed):
    rng = random.Random(seed)
    g = rng.randint(1, 2)
    p = SpinSurfaceParams(g, r, [rng.randrange(r) for _ in range(g)], [rng.randrange(r) for _ in range(g)])
    if not existence_check(g, 0, (), r):
        return
    assert arf_orbit_separator(p) == (-1) ** arf(p)


def test_arf_separator_preconditions():
    with pytest.raises(ValueError):
        arf_orbit_separator(SpinSurfaceParams(1, 3, (0,), (0,)))
    with pytest.raises(ValueError):
        arf_orbit_separator(SpinSurfaceParams.incoming(0, 2, (), (), (0, 0), (0, 2)))
    assert arf_orbit_separator(SpinSurfaceParams.incoming(0, 2, (), (), (0, 0), (1, 1))) in (1, -1)
