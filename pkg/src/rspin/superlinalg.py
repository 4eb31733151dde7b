"""Exact super linear algebra over the rationals.

A :class:`SuperSpace` is a finite basis with a parity attached to every basis
vector. A :class:`SuperMap` is a parity-even matrix with exact rational entries
between two such spaces. Tensor products use the lexicographic product basis
(first factor slowest), and the symmetric braiding carries the Koszul sign
``(-1)^{|v||w|}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd as _gcd
from typing import Iterable, List, Sequence, Tuple

import numpy as np

__all__ = [
    "SuperSpace",
    "SuperMap",
    "NotIdempotent",
    "ShapeMismatch",
    "UNIT",
    "qarray",
    "compose",
    "tensor",
    "tensor_spaces",
    "identity",
    "braiding",
    "permutation_map",
    "split_idempotent",
    "koszul_sign",
    "koszul_sign_tensor",
    "int_matmul",
]


class ShapeMismatch(ValueError):
    pass


class NotIdempotent(ValueError):
    pass


def qarray(rows, shape=None) -> np.ndarray:
    """Object array of Fractions from nested sequences (or zeros of ``shape``)."""
    if rows is None:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    arr = np.array(rows, dtype=object)
    if shape is not None:
        arr = arr.reshape(shape)
    flat = arr.reshape(-1)
    for i, x in enumerate(flat):
        flat[i] = Fraction(x)
    return arr


@dataclass(frozen=True)
class SuperSpace:
    parities: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parities", tuple(int(p) % 2 for p in self.parities))

    @classmethod
    def of(cls, even: int, odd: int = 0) -> "SuperSpace":
        return cls((0,) * even + (1,) * odd)

    @property
    def dim(self) -> int:
        return len(self.parities)

    @property
    def even_dim(self) -> int:
        return self.parities.count(0)

    @property
    def odd_dim(self) -> int:
        return self.parities.count(1)

    def __repr__(self) -> str:
        return f"SuperSpace({self.even_dim}|{self.odd_dim})"


UNIT = SuperSpace((0,))


def tensor_spaces(*spaces: SuperSpace) -> SuperSpace:
    par: Tuple[int, ...] = (0,)
    for V in spaces:
        par = tuple((a + b) % 2 for a in par for b in V.parities)
    return SuperSpace(par)


_I64_SAFE = 1 << 62
_F64_EXACT = 1 << 53


def _as_int_array(a: np.ndarray) -> np.ndarray:
    """Downcast an integer object array to int64 when every entry fits."""
    if a.dtype != object:
        return a
    if a.size == 0:
        return a.astype(np.int64)
    lo, hi = min(a.flat), max(a.flat)
    if -_I64_SAFE < lo and hi < _I64_SAFE:
        return a.astype(np.int64)
    return a


def _absmax(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(max(abs(int(a.max())), abs(int(a.min()))))


def int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer matrix product, in int64 when no overflow is possible."""
    inner = a.shape[-1]
    if a.dtype != object and b.dtype != object:
        bound = _absmax(a) * _absmax(b) * max(inner, 1)
        if bound < _F64_EXACT:
            # BLAS in double precision is exact below 2^53
            return (a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
        if bound < _I64_SAFE:
            return a @ b
    return _as_int_array(a.astype(object) @ b.astype(object))


def int_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype != object and b.dtype != object and _absmax(a) * _absmax(b) < _I64_SAFE:
        return np.kron(a, b)
    return _as_int_array(np.kron(a.astype(object), b.astype(object)))


def _normalise(num: np.ndarray, den: int) -> Tuple[np.ndarray, int]:
    if den < 0:
        num, den = -num, -den
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den == 1:
        return num, 1
    g = den
    for x in num.flat:
        g = _gcd(g, int(x))
        if g == 1:
            return num, den
    return _as_int_array(num // g), den // g


def _from_fractions(m: np.ndarray) -> Tuple[np.ndarray, int]:
    den = 1
    for x in m.flat:
        den = den * x.denominator // _gcd(den, x.denominator)
    num = np.empty(m.shape, dtype=object)
    flat = num.reshape(-1)
    for i, x in enumerate(m.flat):
        flat[i] = x.numerator * (den // x.denominator)
    return _as_int_array(num), den


class SuperMap:
    """Parity-even linear map ``source -> target`` with exact entries.

    ``matrix[i, j]`` is the coefficient of target basis vector i in the image
    of source basis vector j. Internally the matrix is ``num / den`` with an
    integer array ``num`` and a positive integer ``den`` in lowest terms.
    """

    __slots__ = ("source", "target", "num", "den", "_frac")

    def __init__(self, source: SuperSpace, target: SuperSpace, matrix, check: bool = True):
        m = matrix if isinstance(matrix, np.ndarray) and matrix.dtype == object else qarray(matrix)
        m = m.reshape(target.dim, source.dim)
        num, den = _from_fractions(m)
        self._set(source, target, num, den)
        if check:
            self._check_parity()

    def _set(self, source, target, num, den):
        self.source = source
        self.target = target
        self.num, self.den = _normalise(num, den)
        self._frac = None

    @classmethod
    def from_ints(cls, source: SuperSpace, target: SuperSpace, num: np.ndarray, den: int = 1, check: bool = False) -> "SuperMap":
        self = cls.__new__(cls)
        self._set(source, target, _as_int_array(np.asarray(num).reshape(target.dim, source.dim)), int(den))
        if check:
            self._check_parity()
        return self

    def _check_parity(self):
        tp = np.array(self.target.parities, dtype=np.int64).reshape(-1, 1)
        sp = np.array(self.source.parities, dtype=np.int64).reshape(1, -1)
        if np.any((tp != sp) & (self.num != 0)):
            raise ValueError("super linear maps must be parity-even")

    @property
    def matrix(self) -> np.ndarray:
        """The matrix as an object array of Fractions (computed once)."""
        if self._frac is None:
            out = np.empty(self.num.shape, dtype=object)
            flat = out.reshape(-1)
            for i, x in enumerate(self.num.flat):
                flat[i] = Fraction(int(x), self.den)
            self._frac = out
        return self._frac

    @classmethod
    def zero(cls, source: SuperSpace, target: SuperSpace) -> "SuperMap":
        return cls.from_ints(source, target, np.zeros((target.dim, source.dim), dtype=np.int64))

    def __matmul__(self, other: "SuperMap") -> "SuperMap":
        return compose(self, other)

    def _combine(self, other: "SuperMap", sign: int) -> "SuperMap":
        if self.source != other.source or self.target != other.target:
            raise ShapeMismatch("cannot add maps of different shape")
        g = _gcd(self.den, other.den)
        den = self.den // g * other.den
        a = int_scale(self.num, den // self.den)
        b = int_scale(other.num, den // other.den)
        return SuperMap.from_ints(self.source, self.target, _as_int_array(a.astype(object) + sign * b.astype(object)), den)

    def __add__(self, other: "SuperMap") -> "SuperMap":
        return self._combine(other, 1)

    def __sub__(self, other: "SuperMap") -> "SuperMap":
        return self._combine(other, -1)

    def scale(self, c) -> "SuperMap":
        c = Fraction(c)
        return SuperMap.from_ints(self.source, self.target, int_scale(self.num, c.numerator), self.den * c.denominator)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.den == other.den
            and bool(np.array_equal(self.num, other.num))
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return not np.any(self.num)

    def power(self, n: int) -> "SuperMap":
        if self.source != self.target:
            raise ShapeMismatch("power of a non-endomorphism")
        if n < 0:
            return inverse(self).power(-n)
        out = identity(self.source)
        base = self
        while n:
            if n & 1:
                out = compose(out, base)
            n >>= 1
            if n:
                base = compose(base, base)
        return out

    def apply(self, vec: Sequence) -> np.ndarray:
        return self.matrix.dot(qarray(list(vec)))

    def __repr__(self) -> str:
        return f"SuperMap({self.source} -> {self.target})"


def int_scale(a: np.ndarray, c: int) -> np.ndarray:
    if c == 1:
        return a
    if a.dtype != object and _absmax(a) * abs(c) < _I64_SAFE:
        return a * c
    return _as_int_array(a.astype(object) * c)


def compose(f: SuperMap, g: SuperMap) -> SuperMap:
    """``f o g``."""
    if g.target != f.source:
        raise ShapeMismatch(f"cannot compose {f} after {g}")
    return SuperMap.from_ints(g.source, f.target, int_matmul(f.num, g.num), f.den * g.den)


def tensor(*maps: SuperMap) -> SuperMap:
    """Tensor product of even maps (no Koszul sign is needed for even maps)."""
    if not maps:
        return identity(UNIT)
    m = maps[0].num
    den = maps[0].den
    for f in maps[1:]:
        m = int_kron(m, f.num)
        den *= f.den
    return SuperMap.from_ints(
        tensor_spaces(*(f.source for f in maps)),
        tensor_spaces(*(f.target for f in maps)),
        m,
        den,
    )


def identity(V: SuperSpace) -> SuperMap:
    return SuperMap.from_ints(V, V, np.eye(V.dim, dtype=np.int64))


def koszul_sign(parities: Sequence[int], perm: Sequence[int]) -> int:
    """Sign of moving homogeneous vectors of the given parities into the
    order ``perm`` (``perm[k]`` is the old slot placed at new slot k)."""
    s = 0
    n = len(perm)
    for a in range(n):
        for b in range(a + 1, n):
            if perm[a] > perm[b]:
                s += parities[perm[a]] * parities[perm[b]]
    return -1 if s % 2 else 1


def koszul_sign_tensor(parities: Sequence[Sequence[int]], perm: Sequence[int]) -> np.ndarray:
    """Koszul signs of :func:`koszul_sign` for every basis tuple at once.

    Returns an int64 array of shape ``(len(parities[0]), len(parities[1]), ...)``
    indexed by the *old* slot order.
    """
    n = len(parities)
    shape = tuple(len(p) for p in parities)
    pos = {old: new for new, old in enumerate(perm)}
    axes = []
    for k, par in enumerate(parities):
        sh = [1] * n
        sh[k] = len(par)
        axes.append(np.asarray(par, dtype=np.int64).reshape(sh))
    total = np.zeros(shape, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            if pos[i] > pos[j]:
                total = total + axes[i] * axes[j]
    return 1 - 2 * (total % 2)


def permutation_map(spaces: Sequence[SuperSpace], perm: Sequence[int]) -> SuperMap:
    """The symmetric-monoidal isomorphism ``V_0 x ... x V_{n-1} -> V_perm[0] x ...``."""
    spaces = list(spaces)
    n = len(spaces)
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation")
    src = tensor_spaces(*spaces)
    tgt = tensor_spaces(*(spaces[p] for p in perm))
    dims = [V.dim for V in spaces]
    sign = koszul_sign_tensor([V.parities for V in spaces], perm)
    cols = np.arange(src.dim).reshape(dims) if n else np.zeros((), dtype=np.int64)
    rows = np.arange(tgt.dim)
    # source index of each target basis vector
    src_of_tgt = np.transpose(cols, perm).reshape(-1) if n else np.zeros(1, dtype=np.int64)
    sgn = np.transpose(sign, perm).reshape(-1) if n else np.ones(1, dtype=np.int64)
    m = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    m[rows, src_of_tgt] = sgn
    return SuperMap.from_ints(src, tgt, m)


def braiding(V: SuperSpace, W: SuperSpace) -> SuperMap:
    """``c_{V,W}: V x W -> W x V``, ``v x w -> (-1)^{|v||w|} w x v``."""
    return permutation_map([V, W], [1, 0])


def _rref(m: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    a = m.copy()
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = next((i for i in range(r, rows) if a[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] / a[r, c]
        for i in range(rows):
            if i != r and a[i, c] != 0:
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def inverse(f: SuperMap) -> SuperMap:
    if f.source.dim != f.target.dim:
        raise ShapeMismatch("only square maps can be inverted")
    n = f.source.dim
    aug = np.concatenate([f.matrix, identity(f.source).matrix], axis=1)
    red, piv = _rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("map is not invertible")
    return SuperMap(f.target, f.source, red[:, n:], check=False)


def rank(m: np.ndarray) -> int:
    return len(_rref(m)[1])


def split_idempotent(P: SuperMap) -> Tuple[SuperMap, SuperMap]:
    """Rank factorisation ``P = iota o pi`` with ``pi o iota = id``.

    The splitting object has an even and an odd part, each spanned by the
    pivot columns of the corresponding parity block, so the basis is
    deterministic.
    """
    if P.source != P.target:
        raise ShapeMismatch("idempotents are endomorphisms")
    if compose(P, P) != P:
        raise NotIdempotent("P o P != P")
    V = P.source
    cols: List[np.ndarray] = []
    rows: List[np.ndarray] = []
    par: List[int] = []
    for parity in (0, 1):
        idx = [i for i, p in enumerate(V.parities) if p == parity]
        if not idx:
            continue
        block = P.matrix[np.ix_(idx, idx)]
        red, piv = _rref(block)
        for k, c in enumerate(piv):
            col = qarray(None, (V.dim,))
            col[idx] = block[:, c]
            row = qarray(None, (V.dim,))
            row[idx] = red[k]
            cols.append(col)
            rows.append(row)
            par.append(parity)
    Z = SuperSpace(tuple(par))
    if par:
        iota_m = np.stack(cols, axis=1)
        pi_m = np.stack(rows, axis=0)
    else:
        iota_m = qarray(None, (V.dim, 0))
        pi_m = qarray(None, (0, V.dim))
    iota = SuperMap(Z, V, iota_m, check=False)
    pi = SuperMap(V, Z, pi_m, check=False)
    return iota, pi


def basis_vector(V: SuperSpace, i: int) -> SuperMap:
    """The map ``k -> V`` picking the i-th basis vector (must be even)."""
    m = qarray(None, (V.dim, 1))
    m[i, 0] = Fraction(1)
    return SuperMap(SuperSpace((V.parities[i],)), V, m, check=False)


def vector_map(V: SuperSpace, coeffs: Iterable) -> SuperMap:
    """An even vector ``k -> V`` given by its coefficients."""
    return SuperMap(UNIT, V, qarray(list(coeffs), (V.dim, 1)))
