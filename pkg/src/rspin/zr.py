"""Arithmetic in Z_r, where r = 0 stands for the integers.

The conventions follow the usual ideal-theoretic reading: ``gcd(a, b)`` is the
non-negative generator of the ideal (a, b), so ``gcd(a, 0) == a`` for a >= 0
and ``gcd(0, 0) == 0``; every non-negative integer divides 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd as _gcd
from typing import Iterator, List, Union

__all__ = [
    "CyclicInt",
    "ModulusMismatch",
    "gcd_nonneg",
    "divisors",
    "DivisorSet",
    "factorize",
    "reduce_mod",
]


class ModulusMismatch(ValueError):
    """Raised when two elements of different rings Z_r, Z_r' are combined."""


def reduce_mod(value: int, r: int) -> int:
    """Canonical representative of ``value`` in Z_r (identity for r = 0)."""
    if r < 0:
        raise ValueError("modulus must be non-negative")
    return value % r if r else value


def gcd_nonneg(*args: int) -> int:
    """Non-negative generator of the ideal generated by ``args``.

    >>> gcd_nonneg(5, 0), gcd_nonneg(0, 0), gcd_nonneg(4, 6), gcd_nonneg(-4)
    (5, 0, 2, 4)
    """
    return reduce(_gcd, (abs(a) for a in args), 0)


def factorize(n: int) -> dict:
    """Prime factorisation of a positive integer by trial division."""
    if n <= 0:
        raise ValueError("factorize expects a positive integer")
    out: dict = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class DivisorSet:
    """Divisors of r. For r = 0 this is the (infinite) set of all n >= 0."""

    modulus: int
    finite: tuple = ()

    @property
    def is_finite(self) -> bool:
        return self.modulus != 0

    def __len__(self) -> int:
        if not self.is_finite:
            raise OverflowError("0 has infinitely many divisors")
        return len(self.finite)

    def __iter__(self) -> Iterator[int]:
        if not self.is_finite:
            raise OverflowError("0 has infinitely many divisors")
        return iter(self.finite)

    def __contains__(self, d: object) -> bool:
        if not isinstance(d, int):
            return False
        if not self.is_finite:
            return d >= 0
        return d in self.finite

    def count(self) -> Union[int, float]:
        """Number of divisors, ``math.inf`` for r = 0."""
        return len(self.finite) if self.is_finite else float("inf")


def divisors(r: int) -> DivisorSet:
    """All positive divisors of r > 0 in ascending order; a marker for r = 0."""
    if r < 0:
        raise ValueError("divisors expects a non-negative integer")
    if r == 0:
        return DivisorSet(0)
    small: List[int] = []
    large: List[int] = []
    d = 1
    while d * d <= r:
        if r % d == 0:
            small.append(d)
            if d * d != r:
                large.append(r // d)
        d += 1
    return DivisorSet(r, tuple(small + large[::-1]))


class CyclicInt:
    """An element of Z_r; r = 0 means an unbounded integer.

    Values are stored reduced to ``0 <= value < r`` when r > 0. Combining
    elements of different moduli raises :class:`ModulusMismatch`; plain Python
    ints are coerced into the ring of the other operand.
    """

    __slots__ = ("_r", "_v")

    def __init__(self, value: int, modulus: int):
        if modulus < 0:
            raise ValueError("modulus must be non-negative")
        self._r = int(modulus)
        self._v = reduce_mod(int(value), self._r)

    @property
    def modulus(self) -> int:
        return self._r

    @property
    def value(self) -> int:
        return self._v

    def _coerce(self, other) -> "CyclicInt":
        if isinstance(other, CyclicInt):
            if other._r != self._r:
                raise ModulusMismatch(f"Z_{self._r} vs Z_{other._r}")
            return other
        if isinstance(other, int):
            return CyclicInt(other, self._r)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CyclicInt(self._v + o._v, self._r)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CyclicInt(self._v - o._v, self._r)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CyclicInt(o._v - self._v, self._r)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CyclicInt(self._v * o._v, self._r)

    __rmul__ = __mul__

    def __neg__(self):
        return CyclicInt(-self._v, self._r)

    def __eq__(self, other) -> bool:
        if isinstance(other, CyclicInt):
            if other._r != self._r:
                raise ModulusMismatch(f"Z_{self._r} vs Z_{other._r}")
            return self._v == other._v
        if isinstance(other, int):
            return self._v == reduce_mod(other, self._r)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._r, self._v))

    def __int__(self) -> int:
        return self._v

    def __index__(self) -> int:
        return self._v

    def __repr__(self) -> str:
        return f"CyclicInt({self._v}, {self._r})"

    def __str__(self) -> str:
        return str(self._v)
