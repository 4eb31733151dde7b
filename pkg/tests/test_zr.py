import math

import pytest
from hypothesis import given, strategies as st

from rspin.zr import CyclicInt, ModulusMismatch, divisors, factorize, gcd_nonneg, reduce_mod

moduli = st.integers(min_value=0, max_value=30)
ints = st.integers(min_value=-10**6, max_value=10**6)


@given(moduli, ints, ints, ints)
def test_ring_laws(r, a, b, c):
    x, y, z = CyclicInt(a, r), CyclicInt(b, r), CyclicInt(c, r)
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0
    assert -(-x) == x
    assert x + 0 == x and 1 * x == x


@given(st.integers(min_value=1, max_value=30), ints)
def test_values_are_reduced(r, a):
    x = CyclicInt(a, r)
    assert 0 <= x.value < r
    assert x.value == a % r
    assert x == a + 7 * r


@given(ints)
def test_modulus_zero_is_the_integers(a):
    assert CyclicInt(a, 0).value == a
    assert reduce_mod(a, 0) == a


def test_mixing_moduli_is_an_error():
    with pytest.raises(ModulusMismatch):
        CyclicInt(1, 3) + CyclicInt(1, 4)
    with pytest.raises(ModulusMismatch):
        CyclicInt(1, 3) == CyclicInt(1, 4)
    with pytest.raises(ValueError):
        CyclicInt(1, -2)


def test_plain_ints_coerce():
    assert 5 + CyclicInt(3, 4) == CyclicInt(0, 4)
    assert 1 - CyclicInt(3, 4) == CyclicInt(2, 4)
    assert int(CyclicInt(-1, 6)) == 5
    assert str(CyclicInt(-1, 6)) == "5"


@given(st.lists(ints, max_size=5))
def test_gcd_nonneg_matches_math(args):
    assert gcd_nonneg(*args) == (math.gcd(*args) if args else 0)


def test_gcd_edge_cases():
    assert (gcd_nonneg(5, 0), gcd_nonneg(0, 0), gcd_nonneg(4, 6), gcd_nonneg(-4)) == (5, 0, 2, 4)


@given(st.integers(min_value=1, max_value=5000))
def test_factorize_round_trip(n):
    f = factorize(n)
    assert math.prod(p ** e for p, e in f.items()) == n
    assert all(all(p % q for q in range(2, int(p ** 0.5) + 1)) for p in f)


@given(st.integers(min_value=1, max_value=2000))
def test_divisors(n):
    ds = divisors(n)
    assert list(ds) == [d for d in range(1, n + 1) if n % d == 0]
    assert ds.count() == len(ds)
    assert n in ds and 1 in ds


def test_divisors_of_zero():
    ds = divisors(0)
    assert not ds.is_finite
    assert ds.count() == math.inf
    assert 12 in ds and -1 not in ds
    with pytest.raises(OverflowError):
        len(ds)
    with pytest.raises(ValueError):
        divisors(-1)
