"""Dehn twists on the one-face parameters and mapping class group orbits.

Parameters are the ``(s, t, u)`` of :class:`~rspin.plcw.SpinSurfaceParams`.
Twist generators are indexed from 0. The twists change parameters by
increments that only depend on parameters they leave alone, so the k-th power
of a twist is the same substitution with every increment multiplied by k.

Orbits are counted twice: by a breadth-first search over all isomorphism
classes (with ``u_b = 0`` as the deck-transformation normal form) and by
closed formulas. For genus 0 the order of the relation group is also computed
from a Smith normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .plcw import INFINITE, SpinSurfaceParams, existence_check
from .zr import divisors, factorize, gcd_nonneg, reduce_mod

__all__ = [
    "TwistGenerator",
    "OrbitReport",
    "twist_generators",
    "dehn_twist",
    "orbit_enumerate",
    "orbit_count_formula",
    "o0_order",
    "o0_order_snf",
    "sl2z_normal_form",
    "sl2z_reducer",
    "arf_orbit_separator",
    "lambdas_from_R",
]

Count = Union[int, float]

KINDS = ("boundary", "h", "a", "b", "f", "d")


@dataclass(frozen=True)
class TwistGenerator:
    """A Dehn twist along one of the standard loops.

    ``boundary`` (index j), ``h`` (i < j), ``a``/``b`` (handle i), ``f``
    (boundary j, runs through the first handle) and ``d`` (handles i, i+1).
    """

    kind: str
    i: int = 0
    j: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown twist kind {self.kind!r}")

    def check(self, g: int, b: int) -> None:
        k, i, j = self.kind, self.i, self.j
        ok = {
            "boundary": 0 <= i < b,
            "h": 0 <= i < j < b,
            "a": 0 <= i < g,
            "b": 0 <= i < g,
            "f": g >= 1 and 0 <= j < b,
            "d": 0 <= i and i + 1 < g,
        }[k]
        if not ok:
            raise ValueError(f"twist {self} does not exist on a surface with g={g}, b={b}")

    def __str__(self) -> str:
        if self.kind == "h":
            return f"h[{self.i},{self.j}]"
        if self.kind == "f":
            return f"f[{self.j}]"
        return f"{self.kind}[{self.i}]"


def twist_generators(g: int, b: int) -> List[TwistGenerator]:
    """The standard generating set of twists on the surface of genus g with b boundary circles."""
    gens = [TwistGenerator("boundary", j) for j in range(b)]
    gens += [TwistGenerator("h", i, j) for i in range(b) for j in range(i + 1, b)]
    gens += [TwistGenerator("a", i) for i in range(g)]
    gens += [TwistGenerator("b", i) for i in range(g)]
    if g >= 1:
        gens += [TwistGenerator("f", 0, j) for j in range(b)]
    gens += [TwistGenerator("d", i) for i in range(g - 1)]
    return gens


def _increments(tw: TwistGenerator, s, t, R) -> Tuple[dict, dict, dict]:
    """Additive changes (ds, dt, du) of one twist; works on ints and arrays."""
    k, i, j = tw.kind, tw.i, tw.j
    if k == "boundary":
        return {}, {}, {i: -R[i]}
    if k == "h":
        c = R[i] + R[j] + 1
        return {}, {}, {i: c, j: c}
    if k == "a":
        return {i: -t[i]}, {}, {}
    if k == "b":
        return {}, {i: -s[i]}, {}
    if k == "f":
        c = s[0] + 1 + R[j]
        return {}, {0: -c}, {j: c}
    c = s[i + 1] - s[i] + 1
    return {}, {i: c, i + 1: -c}, {}


def dehn_twist(p: SpinSurfaceParams, tw: TwistGenerator, power: int = 1) -> SpinSurfaceParams:
    """Parameters of the surface after ``power`` Dehn twists along ``tw``."""
    tw.check(p.g, p.b)
    ds, dt, du = _increments(tw, p.s, p.t, p.R)
    s = [x + power * ds.get(n, 0) for n, x in enumerate(p.s)]
    t = [x + power * dt.get(n, 0) for n, x in enumerate(p.t)]
    u = [x + power * du.get(n, 0) for n, x in enumerate(p.u)]
    return p.replace(s=tuple(s), t=tuple(t), u=tuple(u))


# ---------------------------------------------------------------------------
# brute force


@dataclass
class OrbitReport:
    g: int
    b: int
    r: int
    R: Tuple[int, ...]
    brute_force_count: Count
    formula_count: Count
    representatives: List[SpinSurfaceParams]

    @property
    def agreement(self) -> bool:
        return self.brute_force_count == self.formula_count


class _StateSpace:
    """Isomorphism classes as integers: coordinates (s, t, u_1..u_{b-1}) in Z_r."""

    def __init__(self, g: int, b: int, r: int, R: Sequence[int]):
        self.g, self.b, self.r = g, b, r
        self.R = [reduce_mod(x, r) for x in R]
        self.ncoord = 2 * g + max(b - 1, 0)
        self.size = r ** self.ncoord

    def decode(self, idx: np.ndarray) -> np.ndarray:
        cols = []
        for _ in range(self.ncoord):
            cols.append(idx % self.r)
            idx = idx // self.r
        return np.stack(cols[::-1], axis=0) if cols else np.zeros((0, len(idx)), dtype=np.int64)

    def encode(self, coords: np.ndarray) -> np.ndarray:
        idx = np.zeros(coords.shape[1], dtype=np.int64)
        for row in coords:
            idx = idx * self.r + row % self.r
        return idx

    def split(self, coords):
        g = self.g
        s = list(coords[:g])
        t = list(coords[g:2 * g])
        u = list(coords[2 * g:])
        if self.b:
            u.append(np.zeros(coords.shape[1:], dtype=np.int64))
        return s, t, u

    def successor(self, idx: np.ndarray, tw: TwistGenerator) -> np.ndarray:
        """Image of every state in ``idx`` under one twist, renormalised to u_b = 0."""
        s, t, u = self.split(self.decode(idx))
        ds, dt, du = _increments(tw, s, t, self.R)
        s = [x + ds.get(n, 0) for n, x in enumerate(s)]
        t = [x + dt.get(n, 0) for n, x in enumerate(t)]
        u = [x + du.get(n, 0) for n, x in enumerate(u)]
        if self.b:
            last = u[-1]
            u = [x - last for x in u[:-1]]
        coords = np.stack([np.broadcast_to(np.asarray(x), idx.shape) for x in s + t + u], axis=0) if self.ncoord else np.zeros((0, len(idx)), dtype=np.int64)
        return self.encode(coords)

    def params(self, idx: int, labels: Sequence[Tuple[str, int]]) -> SpinSurfaceParams:
        s, t, u = self.split(self.decode(np.array([idx]))[:, 0] if self.ncoord else np.zeros(0, dtype=np.int64))
        return SpinSurfaceParams(self.g, self.r, tuple(int(x) for x in s), tuple(int(x) for x in t), tuple(int(x) for x in u), tuple(labels))


def orbit_components(g: int, b: int, r: int, R: Sequence[int]) -> Tuple[np.ndarray, List[int]]:
    """Orbit label of every class (by BFS) and one representative index per orbit.

    Frontiers are expanded for all generators at once; both a twist and its
    inverse are followed so that each search covers exactly one orbit.
    """
    space = _StateSpace(g, b, r, R)
    n = space.size
    gens = twist_generators(g, b)
    all_idx = np.arange(n, dtype=np.int64)
    forward = [space.successor(all_idx, tw) for tw in gens]
    backward = []
    for f in forward:
        inv = np.empty_like(f)
        inv[f] = all_idx
        backward.append(inv)
    neighbours = forward + backward
    label = np.full(n, -1, dtype=np.int64)
    reps: List[int] = []
    for seed in range(n):
        if label[seed] >= 0:
            continue
        orbit = len(reps)
        reps.append(seed)
        label[seed] = orbit
        frontier = np.array([seed], dtype=np.int64)
        while frontier.size:
            nxt = np.unique(np.concatenate([nb[frontier] for nb in neighbours]))
            nxt = nxt[label[nxt] < 0]
            label[nxt] = orbit
            frontier = nxt
    return label, reps


def _labels_in(R: Sequence[int], r: int) -> Tuple[Tuple[str, int], ...]:
    return tuple(("in", reduce_mod(x + 1, r)) for x in R)


def orbit_enumerate(g: int, b: int, r: int, R: Sequence[int]) -> OrbitReport:
    """Count orbits by exhaustive search; all boundary circles are taken incoming."""
    R = tuple(R)
    if len(R) != b:
        raise ValueError("one R per boundary circle")
    if r == 0:
        raise ValueError("r = 0 has infinitely many classes; use orbit_count_formula")
    if not existence_check(g, b, R, r):
        raise ValueError("no r-spin structure with these boundary labels")
    labels = _labels_in(R, r)
    if g == 0 and b == 0:
        reps = [SpinSurfaceParams(0, r)]
        return OrbitReport(g, b, r, R, 1, orbit_count_formula(g, b, r, R), reps)
    space = _StateSpace(g, b, r, R)
    _, reps = orbit_components(g, b, r, R)
    return OrbitReport(
        g, b, r, tuple(reduce_mod(x, r) for x in R), len(reps),
        orbit_count_formula(g, b, r, R), [space.params(i, labels) for i in reps],
    )


# ---------------------------------------------------------------------------
# closed forms


def lambdas_from_R(R: Sequence[int], r: int) -> Tuple[int, ...]:
    """Incoming labels lambda = R + 1."""
    return tuple(reduce_mod(x + 1, r) for x in R)


def orbit_count_formula(g: int, b: int, r: int, R: Optional[Sequence[int]] = None, *, lambdas: Optional[Sequence[int]] = None) -> Count:
    """Number of orbits from the closed forms, for incoming boundary.

    Give either ``R`` or the labels ``lambdas`` (with R = lambda - 1).
    Returns ``INFINITE`` where the orbit set is infinite.
    """
    if (R is None) == (lambdas is None):
        raise ValueError("give exactly one of R and lambdas")
    if R is None:
        R = [l - 1 for l in lambdas]
    R = [reduce_mod(x, r) for x in R]
    if len(R) != b:
        raise ValueError("one R per boundary circle")
    if g == 0 and b == 0:
        if r not in (1, 2):
            raise ValueError("no r-spin structure on the sphere for this r")
        return 1
    if not existence_check(g, b, R, r):
        raise ValueError("no r-spin structure with these boundary labels")
    if g == 0:
        return o0_order(r, R)
    if g == 1:
        lam = [x + 1 for x in R]
        gp = gcd_nonneg(r, *lam)
        if gp == 0:
            return INFINITE
        n = divisors(gp).count()
        if r % 2 == 0 and any(x % 2 for x in lam):
            n *= 2
        return n
    return 2 if r % 2 == 0 else 1


def _o0_prime_power(p: int, alpha: int, R: Sequence[int]) -> int:
    q = p ** alpha
    I = [x for x in R if x % p == 0]
    rest = [x + 1 for x in R if x % p]
    if len(I) == 2:
        return gcd_nonneg(q, *I, *rest)
    if p == 2 and len(I) > 2 and len(I) % 2 == 0:
        return 2
    return 1


def o0_order(r: int, R: Sequence[int]) -> Count:
    """Number of orbits on the sphere with b = len(R) incoming holes."""
    b = len(R)
    R = [reduce_mod(x, r) for x in R]
    if not existence_check(0, b, R, r):
        raise ValueError("no r-spin structure with these boundary labels")
    if b <= 1:
        return 1
    if r > 0:
        out = 1
        for p, alpha in factorize(r).items():
            out *= _o0_prime_power(p, alpha, R)
        return out
    zeros = [i for i, x in enumerate(R) if x == 0]
    if not zeros:
        prod = 1
        for x in R:
            prod *= x
        return o0_order(abs(prod), R)
    if b == 2:
        return INFINITE
    i0 = zeros[0]
    rest = [x for k, x in enumerate(R) if k != i0]
    terms = []
    for a in range(len(rest)):
        terms.append(rest[a] * (rest[a] + 1))
        for c in range(len(rest)):
            if c != a:
                terms.append(2 * (rest[a] + 1) * (rest[c] + 1))
    order = gcd_nonneg(*terms)
    # Z_0 is the integers
    return order if order else INFINITE


def o0_relations(r: int, R: Sequence[int]) -> List[List[int]]:
    """Rows generating the relation lattice of the genus-0 orbit group inside Z^b."""
    b = len(R)
    rows = []
    for i in range(b):
        rows.append([R[i] if k == i else 0 for k in range(b)])
    for i in range(b):
        for j in range(i + 1, b):
            c = R[i] + R[j] + 1
            rows.append([c if k in (i, j) else 0 for k in range(b)])
    rows.append([1] * b)
    if r:
        rows += [[r if k == i else 0 for k in range(b)] for i in range(b)]
    return rows


def o0_order_snf(r: int, R: Sequence[int]) -> Count:
    """Order of Z^b / (relations) from the Smith normal form of the relation matrix."""
    import sympy
    from sympy.matrices.normalforms import invariant_factors

    b = len(R)
    if b == 0:
        return 1
    R = [reduce_mod(x, r) for x in R]
    M = sympy.Matrix(o0_relations(r, R))
    facs = [abs(int(x)) for x in invariant_factors(M, domain=sympy.ZZ) if x != 0]
    if len(facs) < b:
        return INFINITE
    out = 1
    for x in facs:
        out *= x
    return out


# ---------------------------------------------------------------------------
# SL(2, Z) on pairs


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, x, y) with x a + y b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def sl2z_reducer(r: int, s: int, t: int) -> Tuple[int, Tuple[Tuple[int, int], Tuple[int, int]]]:
    """A divisor d of r and M in SL(2, Z) with M (s, t) = (0, d) mod r."""
    if r < 0:
        raise ValueError("r must be non-negative")
    g, u, v = _xgcd(s, t)
    if g == 0:
        A = ((1, 0), (0, 1))
    else:
        A = ((t // g, -s // g), (u, v))
    d, x, y = _xgcd(r, g)
    if d == 0:
        return 0, A
    B = ((g // d, -r // d), (x, y))
    M = tuple(tuple(sum(B[i][k] * A[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    return d, M


def sl2z_normal_form(r: int, s: int, t: int) -> int:
    """The divisor d of r with (s, t) in the SL(2, Z)-orbit of (0, d) in Z_r^2."""
    return sl2z_reducer(r, s, t)[0]


# ---------------------------------------------------------------------------
# Arf sign


def arf_orbit_separator(p: SpinSurfaceParams) -> int:
    """The sign 2^{g-1} Z_Cl(p)(theta^lambda_1 x ... x theta^lambda_b)."""
    from .holonomy import clifford_value

    if p.r % 2:
        raise ValueError("the Arf sign needs r even")
    if any(dr != "in" for dr, _ in p.boundary):
        raise ValueError("all boundary circles must be incoming")
    if p.g < 1 and not any(l % 2 for l in p.labels):
        raise ValueError("need g >= 1, or a boundary circle with odd label")
    val = clifford_value(p) * Fraction(2) ** (p.g - 1)
    if val not in (1, -1):
        raise ArithmeticError(f"expected a sign, got {val}")
    return int(val)
