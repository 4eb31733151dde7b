"""Frobenius algebras in super vector spaces and their Z_r-graded centre.

Everything is derived from the four structure maps: the window element
``tau = mu o Delta o eta``, the Nakayama automorphism

    N = (id x (eps o mu)) o (c x id) o (id x (Delta o eta)),

the idempotents

    P_lam = (tau^{-1} . -) o mu o c o (id x N^{1 - lam}) o Delta,

their splittings ``Z_lam``, and the induced structure maps on the graded
centre. The registry at the bottom collects the algebras used in tests.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .superlinalg import (
    UNIT,
    SuperMap,
    SuperSpace,
    braiding,
    compose,
    identity,
    inverse,
    permutation_map,
    qarray,
    split_idempotent,
    tensor,
    tensor_spaces,
)
from .zr import gcd_nonneg, reduce_mod

__all__ = [
    "FrobeniusAlgebra",
    "GradedCenter",
    "AxiomReport",
    "AlgebraError",
    "check_axioms",
    "frobenius_from_form",
    "nakayama",
    "nakayama_power",
    "window_element",
    "window_inverse",
    "p_lambda",
    "graded_center",
    "clifford_algebra",
    "phi",
    "tensor_algebras",
    "REGISTRY",
    "registry_algebra",
    "algebra_to_json",
    "algebra_from_json",
]


class AlgebraError(ValueError):
    """An algebra does not satisfy a precondition (tau invertible, N^r = id, ...)."""


@dataclass
class FrobeniusAlgebra:
    space: SuperSpace
    mu: SuperMap
    eta: SuperMap
    Delta: SuperMap
    eps: SuperMap
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        A = self.space
        AA = tensor_spaces(A, A)
        if (self.mu.source, self.mu.target) != (AA, A):
            raise ValueError("mu must map A x A -> A")
        if (self.eta.source, self.eta.target) != (UNIT, A):
            raise ValueError("eta must map k -> A")
        if (self.Delta.source, self.Delta.target) != (A, AA):
            raise ValueError("Delta must map A -> A x A")
        if (self.eps.source, self.eps.target) != (A, UNIT):
            raise ValueError("eps must map A -> k")

    @property
    def dim(self) -> int:
        return self.space.dim

    def cached(self, key, make):
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = make()
        with self._lock:
            return self._cache.setdefault(key, value)

    # small conveniences used throughout
    def id(self) -> SuperMap:
        return identity(self.space)

    def copairing(self) -> SuperMap:
        return self.cached("copairing", lambda: compose(self.Delta, self.eta))

    def left_mult(self, x: SuperMap) -> SuperMap:
        """``y -> x y`` for an even vector ``x: k -> A``."""
        return compose(self.mu, tensor(x, self.id()))

    def right_mult(self, x: SuperMap) -> SuperMap:
        return compose(self.mu, tensor(self.id(), x))

    def multi_mult(self, n: int) -> SuperMap:
        """``mu^{(n)}: A^{x n} -> A`` with ``mu^{(1)} = id`` and ``mu^{(0)} = eta``."""
        if n == 0:
            return self.eta
        out = self.id()
        for k in range(1, n):
            out = compose(self.mu, tensor(out, self.id()))
        return out


@dataclass
class AxiomReport:
    ok: bool
    failures: List[str]

    def __bool__(self) -> bool:
        return self.ok


def check_axioms(A: FrobeniusAlgebra) -> AxiomReport:
    """Unit, counit, (co)associativity and both Frobenius relations, exactly."""
    I = A.id()
    mu, eta, Delta, eps = A.mu, A.eta, A.Delta, A.eps
    fails: List[str] = []

    def need(name, lhs, rhs):
        if lhs != rhs:
            fails.append(name)

    need("left unit", compose(mu, tensor(eta, I)), I)
    need("right unit", compose(mu, tensor(I, eta)), I)
    need("left counit", compose(tensor(eps, I), Delta), I)
    need("right counit", compose(tensor(I, eps), Delta), I)
    need("associativity", compose(mu, tensor(mu, I)), compose(mu, tensor(I, mu)))
    need("coassociativity", compose(tensor(Delta, I), Delta), compose(tensor(I, Delta), Delta))
    mid = compose(Delta, mu)
    need("Frobenius (left)", compose(tensor(I, mu), tensor(Delta, I)), mid)
    need("Frobenius (right)", compose(tensor(mu, I), tensor(I, Delta)), mid)
    return AxiomReport(not fails, fails)


def frobenius_from_form(space: SuperSpace, mu: SuperMap, eta: SuperMap, eps: SuperMap, name: str = "") -> FrobeniusAlgebra:
    """Complete an algebra with a non-degenerate form ``eps o mu`` to a Frobenius algebra.

    The copairing ``sum c_ij e_i x e_j`` is the inverse of the Gram matrix
    ``B_ij = eps(e_i e_j)`` and ``Delta(x) = sum c_ij (x e_i) x e_j``.
    """
    d = space.dim
    gram = compose(eps, mu).matrix.reshape(d, d)
    B = SuperMap(SuperSpace((0,) * d), SuperSpace((0,) * d), gram, check=False)
    c = inverse(B).matrix
    kappa = SuperMap(UNIT, tensor_spaces(space, space), c.reshape(d * d, 1))
    Delta = compose(tensor(mu, identity(space)), tensor(identity(space), kappa))
    return FrobeniusAlgebra(space, mu, eta, Delta, eps, name)


def nakayama(A: FrobeniusAlgebra) -> SuperMap:
    def make():
        I = A.id()
        step = tensor(I, A.copairing())
        step = compose(tensor(braiding(A.space, A.space), I), step)
        return compose(tensor(I, compose(A.eps, A.mu)), step)

    return A.cached("N", make)


def nakayama_power(A: FrobeniusAlgebra, n: int) -> SuperMap:
    return A.cached(("N^", n), lambda: nakayama(A).power(n))


def window_element(A: FrobeniusAlgebra) -> SuperMap:
    return A.cached("tau", lambda: compose(A.mu, A.copairing()))


def window_inverse(A: FrobeniusAlgebra) -> SuperMap:
    def make():
        L = A.left_mult(window_element(A))
        try:
            Linv = inverse(L)
        except ZeroDivisionError:
            raise AlgebraError("window element is not invertible") from None
        return compose(Linv, A.eta)

    return A.cached("tau^-1", make)


def tau_mult(A: FrobeniusAlgebra, power: int = 1) -> SuperMap:
    """Left multiplication by ``tau`` (power 1) or ``tau^{-1}`` (power -1)."""
    if power == 1:
        return A.cached("L_tau", lambda: A.left_mult(window_element(A)))
    if power == -1:
        return A.cached("L_tau^-1", lambda: A.left_mult(window_inverse(A)))
    raise ValueError("power must be +1 or -1")


def nakayama_order(A: FrobeniusAlgebra, bound: int = 64) -> Optional[int]:
    N = nakayama(A)
    I = A.id()
    M = I
    for k in range(1, bound + 1):
        M = compose(N, M)
        if M == I:
            return k
    return None


def check_modulus(A: FrobeniusAlgebra, r: int) -> None:
    """Raise :class:`AlgebraError` unless tau is invertible and ``N^r = id``."""
    window_inverse(A)
    if r > 0 and nakayama_power(A, r) != A.id():
        raise AlgebraError(f"Nakayama automorphism does not satisfy N^{r} = id")


def p_lambda(A: FrobeniusAlgebra, lam: int) -> SuperMap:
    def make():
        I = A.id()
        m = compose(tensor(I, nakayama_power(A, 1 - lam)), A.Delta)
        m = compose(braiding(A.space, A.space), m)
        m = compose(A.mu, m)
        return compose(tau_mult(A, -1), m)

    return A.cached(("P", lam), make)


def phi(A: FrobeniusAlgebra, s: int, t: int) -> SuperMap:
    """Handle operator: comultiply twice, twist the two new legs by ``N^{s+1}``
    and ``N^{t+1}``, exchange them, and multiply the three factors back."""
    def make():
        I = A.id()
        m = compose(tensor(I, A.Delta), A.Delta)
        m = compose(tensor(I, nakayama_power(A, s + 1), nakayama_power(A, t + 1)), m)
        m = compose(tensor(I, braiding(A.space, A.space)), m)
        return compose(A.multi_mult(3), m)

    return A.cached(("phi", s, t), make)


class GradedCenter:
    """Components ``Z_lam`` of the Z_r-graded centre, computed on demand.

    Degrees are reduced mod r (for r = 0 they are arbitrary integers, so the
    family is only ever materialised on the requested finite set of degrees).
    """

    def __init__(self, A: FrobeniusAlgebra, r: int, degrees: Optional[Iterable[int]] = None):
        check_modulus(A, r)
        self.A = A
        self.r = r
        self._lock = threading.Lock()
        self._split: Dict[int, Tuple[SuperMap, SuperMap]] = {}
        if degrees is not None:
            for lam in degrees:
                self.split(lam)

    def _deg(self, lam: int) -> int:
        return reduce_mod(lam, self.r)

    @property
    def degrees(self) -> List[int]:
        return sorted(self._split)

    def split(self, lam: int) -> Tuple[SuperMap, SuperMap]:
        lam = self._deg(lam)
        with self._lock:
            if lam in self._split:
                return self._split[lam]
        pair = split_idempotent(p_lambda(self.A, lam))
        with self._lock:
            return self._split.setdefault(lam, pair)

    def space(self, lam: int) -> SuperSpace:
        return self.iota(lam).source

    def iota(self, lam: int) -> SuperMap:
        return self.split(lam)[0]

    def pi(self, lam: int) -> SuperMap:
        return self.split(lam)[1]

    def N(self, lam: int, power: int = 1) -> SuperMap:
        base = compose(self.pi(lam), compose(nakayama(self.A), self.iota(lam)))
        return base.power(power)

    def mu(self, l1: int, l2: int) -> SuperMap:
        return compose(self.pi(l1 + l2), compose(self.A.mu, tensor(self.iota(l1), self.iota(l2))))

    def eta(self) -> SuperMap:
        return compose(self.pi(0), self.A.eta)

    def Delta(self, l1: int, l2: int) -> SuperMap:
        m = compose(tau_mult(self.A, 1), self.iota(l1 + l2 - 2))
        m = compose(self.A.Delta, m)
        return compose(tensor(self.pi(l1), self.pi(l2)), m)

    def eps(self) -> SuperMap:
        return compose(self.A.eps, compose(tau_mult(self.A, -1), self.iota(2)))

    def order_bound(self, lam: int) -> int:
        """``gcd(1 - lam, r)``, the exponent with ``N_lam^exp = id``."""
        return gcd_nonneg(1 - lam, self.r)


def graded_center(A: FrobeniusAlgebra, r: int, degrees: Optional[Iterable[int]] = None) -> GradedCenter:
    if degrees is None:
        if r == 0:
            raise AlgebraError("for r = 0 pass an explicit finite set of degrees")
        degrees = range(r)
    return GradedCenter(A, r, degrees)


# ---------------------------------------------------------------------------
# concrete algebras


def _mult_map(space: SuperSpace, table: Dict[Tuple[int, int], Dict[int, Fraction]]) -> SuperMap:
    d = space.dim
    m = qarray(None, (d, d * d))
    for (i, j), out in table.items():
        for k, c in out.items():
            m[k, i * d + j] = Fraction(c)
    return SuperMap(tensor_spaces(space, space), space, m)


def _vec(space: SuperSpace, coeffs) -> SuperMap:
    return SuperMap(UNIT, space, qarray(list(coeffs), (space.dim, 1)))


def _covec(space: SuperSpace, coeffs) -> SuperMap:
    return SuperMap(space, UNIT, qarray(list(coeffs), (1, space.dim)))


def clifford_algebra(r: int = 2) -> FrobeniusAlgebra:
    """``Cl = k + k theta`` with theta odd, ``theta^2 = 1``, ``eps(1) = 2``."""
    if r % 2:
        raise AlgebraError("the Clifford algebra needs r even")
    V = SuperSpace((0, 1))
    mu = _mult_map(V, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (1, 1): {0: 1}})
    return frobenius_from_form(V, mu, _vec(V, [1, 0]), _covec(V, [2, 0]), "cl")


def ground_field(scale: Fraction = Fraction(1)) -> FrobeniusAlgebra:
    V = SuperSpace((0,))
    mu = _mult_map(V, {(0, 0): {0: 1}})
    return frobenius_from_form(V, mu, _vec(V, [1]), _covec(V, [scale]), "k")


def product_algebra(weights: Sequence[Fraction] = (1, 2)) -> FrobeniusAlgebra:
    """``k x ... x k`` with ``eps(e_i) = weights[i]``."""
    n = len(weights)
    V = SuperSpace((0,) * n)
    mu = _mult_map(V, {(i, i): {i: 1} for i in range(n)})
    return frobenius_from_form(V, mu, _vec(V, [1] * n), _covec(V, weights), "k^" + str(n))


def twisted_matrix_algebra(D: Sequence[Sequence[int]], name: str = "") -> FrobeniusAlgebra:
    """``Mat_n(Q)`` with the form ``a -> tr(D a)`` for an invertible D.

    The Nakayama automorphism is conjugation by D, so its order is the order
    of D modulo scalars. The window element is ``tr(D^{-1}) * 1``.
    """
    n = len(D)
    V = SuperSpace((0,) * (n * n))
    table = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                table[(i * n + j, j * n + k)] = {i * n + k: 1}
    mu = _mult_map(V, table)
    eta = _vec(V, [1 if i == j else 0 for i in range(n) for j in range(n)])
    # tr(D E_ij) = D_ji
    eps = _covec(V, [D[j][i] for i in range(n) for j in range(n)])
    return frobenius_from_form(V, mu, eta, eps, name or f"mat{n}")


def _clifford2_product(a: int, b: int) -> Tuple[int, int]:
    # basis monomials are bitmasks over two anticommuting generators squaring to 1
    sign = -1 if (a & 2) and (b & 1) else 1
    return sign, a ^ b


def twisted_clifford2(u: Sequence[int] = (1, 0, 0, 1), name: str = "") -> FrobeniusAlgebra:
    """Clifford algebra on two odd generators t1, t2 (basis 1, t1, t2, t1 t2)
    with the form ``a -> [coefficient of 1 in u a]``.

    For ``u = 1 + t1 t2`` the Nakayama automorphism has order 4; for
    ``u = 2 + t1 t2`` it has infinite order.
    """
    V = SuperSpace((0, 1, 1, 0))
    table = {}
    for a in range(4):
        for b in range(4):
            sgn, m = _clifford2_product(a, b)
            table[(a, b)] = {m: sgn}
    mu = _mult_map(V, table)
    eps = []
    for b in range(4):
        tot = 0
        for a, c in enumerate(u):
            sgn, m = _clifford2_product(a, b)
            if c and m == 0:
                tot += c * sgn
        eps.append(tot)
    return frobenius_from_form(V, mu, _vec(V, [1, 0, 0, 0]), _covec(V, eps), name or "cl2")


def tensor_algebras(A: FrobeniusAlgebra, B: FrobeniusAlgebra) -> FrobeniusAlgebra:
    """Graded tensor product of Frobenius algebras."""
    VA, VB = A.space, B.space
    V = tensor_spaces(VA, VB)
    mid = permutation_map([VA, VB, VA, VB], [0, 2, 1, 3])
    mu = compose(tensor(A.mu, B.mu), mid)
    comid = permutation_map([VA, VA, VB, VB], [0, 2, 1, 3])
    Delta = compose(comid, tensor(A.Delta, B.Delta))
    return FrobeniusAlgebra(V, mu, tensor(A.eta, B.eta), Delta, tensor(A.eps, B.eps), f"{A.name}*{B.name}")


REGISTRY = {
    "cl": clifford_algebra,
    "k": ground_field,
    "kxk": product_algebra,
    # non-symmetric, super, N of order 4
    "cl2": lambda: twisted_clifford2((1, 0, 0, 1), "cl2"),
    # non-symmetric, even, N of order 2
    "mat3": lambda: twisted_matrix_algebra([[1, 0, 0], [0, 1, 0], [0, 0, -1]], "mat3"),
    # non-symmetric, even, N of order 3 (D = 1 + 1 + companion of x^2 + x + 1)
    "mat4": lambda: twisted_matrix_algebra(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, -1], [0, 0, 1, -1]], "mat4"
    ),
    # non-symmetric, super, N of infinite order (only usable for r = 0)
    "cl2inf": lambda: twisted_clifford2((2, 0, 0, 1), "cl2inf"),
}

_registry_cache: Dict[str, FrobeniusAlgebra] = {}
_registry_lock = threading.Lock()


def registry_algebra(name: str) -> FrobeniusAlgebra:
    with _registry_lock:
        if name not in _registry_cache:
            _registry_cache[name] = REGISTRY[name]()
        return _registry_cache[name]


# ---------------------------------------------------------------------------
# JSON


def _q(x) -> Fraction:
    return Fraction(x) if not isinstance(x, float) else Fraction(str(x))


def _qstr(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def algebra_to_json(A: FrobeniusAlgebra) -> dict:
    d = A.dim
    mu = A.mu.matrix.reshape(d, d, d)
    De = A.Delta.matrix.reshape(d, d, d)
    return {
        "name": A.name,
        "parities": list(A.space.parities),
        "mu": [[[_qstr(mu[k, i, j]) for j in range(d)] for i in range(d)] for k in range(d)],
        "eta": [_qstr(x) for x in A.eta.matrix[:, 0]],
        "Delta": [[[_qstr(De[i, j, k]) for k in range(d)] for j in range(d)] for i in range(d)],
        "eps": [_qstr(x) for x in A.eps.matrix[0, :]],
    }


def algebra_from_json(data: dict) -> FrobeniusAlgebra:
    """Inverse of :func:`algebra_to_json`.

    ``mu[k][i][j]`` is the coefficient of e_k in e_i e_j and ``Delta[i][j][k]``
    that of e_i x e_j in Delta(e_k). Entries are ints or strings "p/q". If
    ``Delta`` is omitted it is derived from the form ``eps o mu``.
    """
    V = SuperSpace(tuple(data["parities"]))
    d = V.dim
    mu = qarray([[[_q(x) for x in row] for row in mat] for mat in data["mu"]], (d, d, d))
    mu_map = SuperMap(tensor_spaces(V, V), V, mu.reshape(d, d * d))
    eta = SuperMap(UNIT, V, qarray([_q(x) for x in data["eta"]], (d, 1)))
    eps = SuperMap(V, UNIT, qarray([_q(x) for x in data["eps"]], (1, d)))
    name = data.get("name", "")
    if "Delta" not in data:
        return frobenius_from_form(V, mu_map, eta, eps, name)
    De = qarray([[[_q(x) for x in row] for row in mat] for mat in data["Delta"]], (d, d, d))
    Delta = SuperMap(V, tensor_spaces(V, V), De.reshape(d * d, d))
    return FrobeniusAlgebra(V, mu_map, eta, Delta, eps, name)


def load_algebra(path: str) -> FrobeniusAlgebra:
    with open(path) as fh:
        return algebra_from_json(json.load(fh))
