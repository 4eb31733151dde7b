"""State-sum evaluation of r-spin bordisms.

Given a Frobenius algebra A (tau invertible, N^r = id) and a marked
decomposition of a surface, the state sum places

* a copairing ``(id x N^{s+1}) Delta eta`` on every inner edge, legs on the
  left and right side of the edge,
* ``N^{-s-1}`` on incoming boundary edges (the input leg becomes the side
  leg), and a copairing on outgoing edges with one leg as output,
* ``tau^{-1}`` on one side leg per vertex not on an outgoing circle,
* ``eps o mu^{(n)}`` on every n-gon, reading its sides counterclockwise
  from the marked one,

and contracts. Inputs are embedded by ``iota_lambda`` and outputs projected
by ``pi_mu``.

Two engines are provided. :func:`evaluate` keeps a single integer tensor,
introduces edges in a planned order (see :func:`plan_contraction`), and
multiplies side legs as soon as they are adjacent on their face. :func:`evaluate_dense` builds every
intermediate map of the construction explicitly and is only usable on
small inputs; it serves as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .frobenius import (
    AlgebraError,
    FrobeniusAlgebra,
    GradedCenter,
    check_modulus,
    nakayama_power,
    phi,
    tau_mult,
    window_inverse,
)
from .plcw import MarkedPLCW, SpinSurfaceParams, admissibility_violations, standard_surface
from .superlinalg import (
    UNIT,
    SuperMap,
    SuperSpace,
    compose,
    identity,
    koszul_sign_tensor,
    permutation_map,
    tensor,
    tensor_spaces,
)
from .zr import reduce_mod

__all__ = [
    "Bordism",
    "EvaluationTrace",
    "StateSumError",
    "evaluate",
    "evaluate_dense",
    "plan_contraction",
    "build_trace",
    "evaluate_generator",
    "evaluate_connected_closed_form",
    "pants_mult",
    "pants_comult",
    "cup",
    "cap",
    "cylinder",
]

_F64_EXACT = 1 << 53
_I64_SAFE = 1 << 62


class StateSumError(ValueError):
    pass


@dataclass(frozen=True)
class Bordism:
    """A decomposition plus the order in which boundary circles meet object slots.

    ``beta_in[x]`` is the position (among incoming circles) of the circle
    attached to input slot x; likewise for ``beta_out``. ``None`` means the
    identity.
    """

    surface: MarkedPLCW
    beta_in: Optional[Tuple[int, ...]] = None
    beta_out: Optional[Tuple[int, ...]] = None

    @property
    def in_labels(self) -> Tuple[int, ...]:
        labels = [b.label for b in self.surface.incoming()]
        order = self.beta_in or tuple(range(len(labels)))
        return tuple(labels[k] for k in order)

    @property
    def out_labels(self) -> Tuple[int, ...]:
        labels = [b.label for b in self.surface.outgoing()]
        order = self.beta_out or tuple(range(len(labels)))
        return tuple(labels[k] for k in order)


# ---------------------------------------------------------------------------
# trace: sides, edge sides, the bijection between them, vertex assignment


@dataclass
class EvaluationTrace:
    S: List[Tuple[int, int]]  # (face, k) with k = 0 the marked side
    E: List[Tuple[int, str]]  # (edge, "l" | "r")
    Phi: Dict[Tuple[int, str], Tuple[int, int]]
    V: Dict[int, Tuple[int, str]]
    in_edges: List[int]
    out_edges: List[int]
    plan: List[tuple] = field(default_factory=list)
    max_legs: int = 0


def build_trace(d: MarkedPLCW, V: Optional[Dict[int, Tuple[int, str]]] = None) -> EvaluationTrace:
    S: List[Tuple[int, int]] = []
    Phi: Dict[Tuple[int, str], Tuple[int, int]] = {}
    for f, face in enumerate(d.faces):
        n = len(face)
        for k in range(n):
            sd = face.sides[(face.marked + k) % n]
            S.append((f, k))
            Phi[(sd.edge, "l" if sd.coherent else "r")] = (f, k)
    E = sorted(Phi, key=lambda ex: (ex[0], ex[1]))
    out_vertices = {b.vertex for b in d.outgoing()}
    if V is None:
        V = {}
        for v in d.vertices:
            if v in out_vertices:
                continue
            for ex in E:
                e = d.edges[ex[0]]
                if v in (e.start, e.end):
                    V[v] = ex
                    break
    else:
        V = dict(V)
        for v in d.vertices:
            if v in out_vertices:
                if v in V:
                    raise StateSumError("vertices on outgoing circles get no tau^{-1}")
                continue
            if v not in V:
                raise StateSumError(f"vertex {v} has no assigned edge side")
            ex = V[v]
            if ex not in Phi or v not in (d.edges[ex[0]].start, d.edges[ex[0]].end):
                raise StateSumError(f"edge side {ex} is not next to vertex {v}")
    return EvaluationTrace(
        S=S,
        E=E,
        Phi=Phi,
        V=V,
        in_edges=[b.edge for b in d.incoming()],
        out_edges=[b.edge for b in d.outgoing()],
    )


def _edge_side(d: MarkedPLCW, e: int) -> str:
    (f, k), = d.occurrences(e)
    return "l" if d.faces[f].sides[k].coherent else "r"


# ---------------------------------------------------------------------------
# contraction planning


def plan_contraction(d: MarkedPLCW, trace: Optional[EvaluationTrace] = None, order: Optional[Sequence[int]] = None) -> EvaluationTrace:
    """Choose the order in which edges are introduced and record all steps.

    Steps are tuples:
    ``("in", e)`` incoming edge (leg already present), ``("edge", e)``,
    ``("merge", leg_a, leg_b)``, ``("eps", leg)``. Legs are named by
    ``("side", f, a, b)`` for the product of sides a..b of face f, or
    ``("out", e)``.

    Without ``order`` several candidate orders are simulated (sweeps through
    the faces side by side from every starting face, and a greedy choice)
    and the one with the fewest simultaneously open legs is kept.
    """
    if trace is None:
        trace = build_trace(d)
    remaining = [e for e in range(len(d.edges)) if e not in trace.in_edges]
    if order is not None:
        if sorted(order) != sorted(remaining):
            raise ValueError("order must list every non-incoming edge once")
        plan, peak = _simulate(d, trace, list(order))
    else:
        best = None
        for cand in _candidate_orders(d, trace, remaining):
            plan, peak = _simulate(d, trace, cand)
            if best is None or peak < best[1]:
                best = (plan, peak)
        plan, peak = best
    trace.plan = plan
    trace.max_legs = peak
    return trace


def _side_legs(trace: EvaluationTrace, e: int) -> List[tuple]:
    out = []
    for x in ("l", "r"):
        if (e, x) in trace.Phi:
            f, k = trace.Phi[(e, x)]
            out.append(("side", f, k, k))
    return out


def _settle(legs: List[tuple], sizes: List[int], plan_out: Optional[list]) -> None:
    """Multiply adjacent segments and close complete faces until stable."""
    changed = True
    while changed:
        changed = False
        for a in legs:
            if a[0] != "side":
                continue
            if a[2] == 0 and a[3] == sizes[a[1]] - 1:
                legs.remove(a)
                if plan_out is not None:
                    plan_out.append(("eps", a))
                changed = True
                break
            nxt = next((b for b in legs if b[0] == "side" and b[1] == a[1] and b[2] == a[3] + 1), None)
            if nxt is not None:
                legs[legs.index(a)] = ("side", a[1], a[2], nxt[3])
                legs.remove(nxt)
                if plan_out is not None:
                    plan_out.append(("merge", a, nxt))
                changed = True
                break


def _simulate(d: MarkedPLCW, trace: EvaluationTrace, order: List[Optional[int]]) -> Tuple[list, int]:
    sizes = [len(f) for f in d.faces]
    legs: List[tuple] = []
    plan: List[tuple] = []
    for e in trace.in_edges:
        legs.extend(_side_legs(trace, e))
        plan.append(("in", e))
    _settle(legs, sizes, plan)
    peak = len(legs)
    for e in order:
        new = _side_legs(trace, e)
        if e in trace.out_edges:
            new.append(("out", e))
        legs.extend(new)
        plan.append(("edge", e))
        peak = max(peak, len(legs))
        _settle(legs, sizes, plan)
    return plan, peak


def _candidate_orders(d: MarkedPLCW, trace: EvaluationTrace, remaining: List[int]):
    rem = set(remaining)
    inv = {fk: ex[0] for ex, fk in trace.Phi.items()}
    for f0 in range(len(d.faces)):
        seen: List[int] = []
        faces = [f0] + [f for f in range(len(d.faces)) if f != f0]
        for f in faces:
            for k in range(len(d.faces[f])):
                e = inv[(f, k)]
                if e in rem and e not in seen:
                    seen.append(e)
        yield seen
    # greedy: fewest open legs after each step
    sizes = [len(f) for f in d.faces]
    legs: List[tuple] = []
    for e in trace.in_edges:
        legs.extend(_side_legs(trace, e))
    _settle(legs, sizes, None)
    left = list(remaining)
    chosen: List[int] = []
    while left:
        best = None
        for cand in left:
            trial = legs + _side_legs(trace, cand) + ([("out", cand)] if cand in trace.out_edges else [])
            _settle(trial, sizes, None)
            score = (len(trial), cand)
            if best is None or score < best[0]:
                best = (score, cand)
        e = best[1]
        left.remove(e)
        chosen.append(e)
        legs = legs + _side_legs(trace, e) + ([("out", e)] if e in trace.out_edges else [])
        _settle(legs, sizes, None)
    yield chosen


# ---------------------------------------------------------------------------
# integer tensor engine


def _absmax(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(max(abs(int(a.max())), abs(int(a.min()))))


def _tdot(a: np.ndarray, b: np.ndarray, axes) -> np.ndarray:
    """Exact tensordot of integer arrays."""
    ax_a, ax_b = axes
    inner = 1
    for k in ax_b:
        inner *= b.shape[k]
    if a.dtype != object and b.dtype != object:
        bound = _absmax(a) * _absmax(b) * max(inner, 1)
        if bound < _F64_EXACT:
            return np.rint(np.tensordot(a.astype(np.float64), b.astype(np.float64), axes=axes)).astype(np.int64)
        if bound < _I64_SAFE:
            return np.tensordot(a, b, axes=axes)
    out = np.tensordot(a.astype(object), b.astype(object), axes=axes)
    return _shrink(out)


def _shrink(a: np.ndarray) -> np.ndarray:
    if a.dtype == object and (a.size == 0 or _absmax(a) < _I64_SAFE):
        return a.astype(np.int64)
    return a


def _reduce(num: np.ndarray, den: int) -> Tuple[np.ndarray, int]:
    if den == 1:
        return num, 1
    if num.dtype != object:
        g = int(np.gcd.reduce(num.reshape(-1), initial=0)) if num.size else 0
    else:
        g = 0
        for x in num.flat:
            g = gcd(g, int(x))
            if g == 1:
                break
    g = gcd(g, den)
    if g > 1:
        num = num // g
        den //= g
    return num, den


class _Kit:
    """Integer versions of the structure maps the engine needs."""

    def __init__(self, A: FrobeniusAlgebra):
        self.A = A
        self.d = A.dim
        self.par = np.array(A.space.parities, dtype=np.int64)
        self.mu = (A.mu.num.reshape(self.d, self.d, self.d), A.mu.den)
        self.eps = (A.eps.num.reshape(self.d), A.eps.den)
        L = tau_mult(A, -1)
        self.tau_inv = (L.num, L.den)
        self._N: Dict[int, Tuple[np.ndarray, int]] = {}
        self._cop: Dict[int, Tuple[np.ndarray, int]] = {}

    def N(self, k: int):
        if k not in self._N:
            M = nakayama_power(self.A, k)
            self._N[k] = (M.num, M.den)
        return self._N[k]

    def copairing(self, k: int):
        """``(id x N^k) Delta eta`` as a (d, d) array."""
        if k not in self._cop:
            v = compose(tensor(self.A.id(), nakayama_power(self.A, k)), self.A.copairing())
            self._cop[k] = (v.num.reshape(self.d, self.d), v.den)
        return self._cop[k]


class _Tensor:
    """Integer tensor with labelled codomain legs followed by domain axes."""

    def __init__(self, num: np.ndarray, den: int, legs: List[tuple], pars: List[np.ndarray], n_dom: int):
        self.num = num
        self.den = den
        self.legs = legs
        self.pars = pars
        self.n_dom = n_dom

    def _norm(self):
        self.num, self.den = _reduce(self.num, self.den)

    def _axis_par(self, k: int) -> np.ndarray:
        shape = [1] * self.num.ndim
        shape[k] = self.pars[k].size
        return self.pars[k].reshape(shape)

    def apply(self, leg: tuple, M):
        i = self.legs.index(leg)
        m, md = M
        out = _tdot(m, self.num, axes=([1], [i]))
        self.num = np.moveaxis(out, 0, i)
        self.den *= md
        self._norm()

    def append(self, vec, labels: List[tuple], pars: List[np.ndarray]):
        v, vd = vec
        n_cod = len(self.legs)
        out = _tdot(self.num, v, axes=([], []))
        k = v.ndim
        total = out.ndim
        self.num = np.moveaxis(out, list(range(total - k, total)), list(range(n_cod, n_cod + k)))
        self.den *= vd
        self.legs = self.legs + list(labels)
        self.pars = self.pars + list(pars)
        self._norm()

    def split(self, leg: tuple, M, labels: Tuple[tuple, tuple], pars):
        """Apply an even map A -> X x Y (array of shape (|X|, |Y|, |A|)) to one leg."""
        i = self.legs.index(leg)
        m, md = M
        out = _tdot(m, self.num, axes=([2], [i]))
        self.num = np.moveaxis(out, [0, 1], [i, i + 1])
        self.den *= md
        self.legs = self.legs[:i] + list(labels) + self.legs[i + 1 :]
        self.pars = self.pars[:i] + list(pars) + self.pars[i + 1 :]
        self._norm()

    def multiply(self, a: tuple, b: tuple, kit: _Kit, new_label: tuple):
        """Replace legs a, b by the single leg a*b (a on the left)."""
        i, j = self.legs.index(a), self.legs.index(b)
        # move leg j to just after leg i: it passes the legs strictly between
        # them, or (j < i) the legs j+1..i
        passed = list(range(i + 1, j)) if j > i else list(range(j + 1, i + 1))
        if passed:
            tot = 0
            for k in passed:
                tot = tot + self._axis_par(k)
            self.num = self.num * (1 - 2 * ((self._axis_par(j) * tot) % 2))
        m, md = kit.mu
        out = _tdot(self.num, m, axes=([i, j], [1, 2]))
        pos = i if i < j else i - 1
        self.num = np.moveaxis(out, -1, pos)
        self.den *= md
        keep = [k for k in range(len(self.legs)) if k not in (i, j)]
        legs = [self.legs[k] for k in keep]
        pars = [self.pars[k] for k in keep]
        legs.insert(pos, new_label)
        pars.insert(pos, kit.par)
        self.legs, self.pars = legs, pars
        self._norm()

    def counit(self, a: tuple, kit: _Kit):
        i = self.legs.index(a)
        e, ed = kit.eps
        self.num = _tdot(self.num, e, axes=([i], [0]))
        self.den *= ed
        del self.legs[i]
        del self.pars[i]
        self._norm()

    def permute_legs(self, order: List[tuple]):
        perm = [self.legs.index(x) for x in order]
        n = len(self.legs)
        if perm != list(range(n)):
            sign = koszul_sign_tensor([list(p) for p in self.pars], perm)
            sign = sign.reshape(sign.shape + (1,) * self.n_dom)
            self.num = self.num * sign
            self.num = np.transpose(self.num, perm + list(range(n, n + self.n_dom)))
            self.pars = [self.pars[k] for k in perm]
        self.legs = list(order)


def _fused_split(kit: _Kit, c: np.ndarray, p1: np.ndarray, p2: np.ndarray, t: int, old_left: bool) -> np.ndarray:
    """The map o -> (o merged with leg t of the new pair c) as an (X, Y, d) array.

    The pair is first placed right after o; sign factors come from the
    exchanges needed to make the two multiplied legs adjacent.
    """
    mu = kit.mu[0]
    po = kit.par
    if t == 1 and old_left:  # o . n1
        return np.einsum("kai,ij->kja", mu, c)
    if t == 1:  # n1 . o
        sg = 1 - 2 * ((po[None, :] * p1[:, None]) % 2)  # (i, o)
        return np.einsum("kia,ij,ia->kja", mu, c, sg)
    if old_left:  # o . n2, n2 passes n1
        sg = 1 - 2 * ((p1[:, None] * p2[None, :]) % 2)
        return np.einsum("kaj,ij,ij->kia", mu, c, sg)
    # n2 . o, o passes n1 and n2
    sg = 1 - 2 * ((po[None, None, :] * (p1[:, None, None] + p2[None, :, None])) % 2)
    return np.einsum("ij,kja,ija->ika", c, mu, sg)


def _check_inputs(A: FrobeniusAlgebra, d: MarkedPLCW, check: bool) -> None:
    if check:
        bad = admissibility_violations(d)
        if bad:
            raise StateSumError(f"marking is not admissible at vertices {bad}")
        check_modulus(A, d.r)


def _in_map(kit: _Kit, d: MarkedPLCW, e: int):
    s = d.index(e)
    # N^{-s-1} for an incoming edge with the surface on its right; flipping
    # the edge (s -> -1 - s) turns this into N^{s} for the surface on its left
    k = -s - 1 if _edge_side(d, e) == "r" else s
    return kit.N(k)


def _graded(A: FrobeniusAlgebra, d: MarkedPLCW, Z: Optional[GradedCenter]) -> GradedCenter:
    if Z is not None:
        return Z
    labels = sorted({b.label for b in d.boundary})
    return GradedCenter(A, d.r, labels)


def _permute_slots(B: Bordism, Z: GradedCenter, out: SuperMap) -> SuperMap:
    d = B.surface
    ins, outs = d.incoming(), d.outgoing()
    if B.beta_in is not None and ins:
        spaces = [Z.space(b.label) for b in ins]
        # object slot x carries circle beta_in[x]; permute slots into circle order
        inv = [0] * len(ins)
        for x, c in enumerate(B.beta_in):
            inv[c] = x
        out = compose(out, permutation_map([spaces[c] for c in B.beta_in], inv))
    if B.beta_out is not None and outs:
        spaces = [Z.space(b.label) for b in outs]
        out = compose(permutation_map(spaces, list(B.beta_out)), out)
    return out


def _boundary_maps(A, B: Bordism, Z: GradedCenter, L: SuperMap) -> SuperMap:
    d = B.surface
    ins, outs = d.incoming(), d.outgoing()
    E_in = tensor(*(Z.iota(b.label) for b in ins)) if ins else identity(UNIT)
    E_out = tensor(*(Z.pi(b.label) for b in outs)) if outs else identity(UNIT)
    return _permute_slots(B, Z, compose(E_out, compose(L, E_in)))


def evaluate(
    A: FrobeniusAlgebra,
    B,
    *,
    V: Optional[Dict[int, Tuple[int, str]]] = None,
    order: Optional[Sequence[int]] = None,
    Z: Optional[GradedCenter] = None,
    check: bool = True,
    raw: bool = False,
) -> SuperMap:
    """Z_A(B) as a map from the tensor product of Z_lambda (incoming circles)
    to that of Z_mu (outgoing circles).

    ``B`` may be a :class:`Bordism` or a bare decomposition. With
    ``raw=True`` the map between plain tensor powers of A is returned
    (before embedding and projecting, and ignoring ``beta``).
    """
    if isinstance(B, MarkedPLCW):
        B = Bordism(B)
    d = B.surface
    _check_inputs(A, d, check)
    kit = _Kit(A)
    trace = plan_contraction(d, build_trace(d, V), order)
    tau_count: Dict[Tuple[int, str], int] = {}
    for ex in trace.V.values():
        tau_count[ex] = tau_count.get(ex, 0) + 1
    ins, outs = d.incoming(), d.outgoing()
    if raw:
        emb_in = [(np.eye(kit.d, dtype=np.int64), 1)] * len(ins)
        proj_out = {b.edge: (np.eye(kit.d, dtype=np.int64), 1) for b in outs}
        sp_in = [A.space] * len(ins)
        sp_out = {b.edge: A.space for b in outs}
    else:
        Zc = _graded(A, d, Z)
        emb_in = [(Zc.iota(b.label).num, Zc.iota(b.label).den) for b in ins]
        proj_out = {b.edge: (Zc.pi(b.label).num, Zc.pi(b.label).den) for b in outs}
        sp_in = [Zc.space(b.label) for b in ins]
        sp_out = {b.edge: Zc.space(b.label) for b in outs}

    def side_leg(e, x):
        f, k = trace.Phi[(e, x)]
        return ("side", f, k, k)

    def with_tau(M, e, x):
        m, md = M
        for _ in range(tau_count.get((e, x), 0)):
            t, td = kit.tau_inv
            m, md = _tdot(t, m, axes=([1], [0])), md * td
        return _reduce(m, md)

    # incoming legs: tau^{-a} N^{k} iota, all at once
    num = np.ones((), dtype=np.int64)
    den = 1
    legs0, pars0 = [], []
    for b, (m0, d0) in zip(ins, emb_in):
        x = _edge_side(d, b.edge)
        g, gd = _in_map(kit, d, b.edge)
        m, md = with_tau((_tdot(g, m0, axes=([1], [0])), gd * d0), b.edge, x)
        num = _tdot(num, m, axes=([], []))
        den *= md
        legs0.append(side_leg(b.edge, x))
        pars0.append(kit.par)
    n_in = len(ins)
    # axes are (c1, d1, c2, d2, ...); put codomain axes first
    num = np.transpose(num, list(range(0, 2 * n_in, 2)) + list(range(1, 2 * n_in, 2)))
    T = _Tensor(num, den, legs0, pars0, n_in)
    T._norm()

    plan = trace.plan
    skip = set()
    for idx, step in enumerate(plan):
        if idx in skip:
            continue
        kind = step[0]
        if kind == "in":
            continue
        if kind == "merge":
            a, b = step[1], step[2]
            T.multiply(a, b, kit, ("side", a[1], a[2], b[3]))
            continue
        if kind == "eps":
            T.counit(step[1], kit)
            continue
        e = step[1]
        c, cd = kit.copairing(d.index(e) + 1)
        if e in trace.out_edges:
            x = _edge_side(d, e)
            pm, pd = proj_out[e]
            zp = np.array(sp_out[e].parities, dtype=np.int64)
            if x == "r":
                # rows: out leg, columns: side leg
                c, cd = _tdot(pm, c, axes=([1], [0])), cd * pd
                ct, cd = with_tau((c.T, cd), e, "r")
                c = ct.T
                labels, pars = [("out", e), side_leg(e, "r")], [zp, kit.par]
            else:
                c, cd = with_tau((c, cd), e, "l")
                c, cd = _reduce(_tdot(c, pm, axes=([1], [1])), cd * pd)
                labels, pars = [side_leg(e, "l"), ("out", e)], [kit.par, zp]
        else:
            c, cd = with_tau((c, cd), e, "l")
            ct, cd = with_tau((c.T, cd), e, "r")
            c = ct.T
            labels, pars = [side_leg(e, "l"), side_leg(e, "r")], [kit.par, kit.par]
        nxt = plan[idx + 1] if idx + 1 < len(plan) else None
        fused = False
        if nxt is not None and nxt[0] == "merge":
            a, b = nxt[1], nxt[2]
            new_a, new_b = a in labels, b in labels
            if new_a != new_b:
                t = labels.index(a if new_a else b) + 1
                old = b if new_a else a
                M = _fused_split(kit, c, pars[0], pars[1], t, old_left=not new_a)
                merged = ("side", a[1], a[2], b[3])
                other = 1 if t == 1 else 0
                if t == 2 and new_a:
                    new_labels, new_pars = (labels[0], merged), (pars[0], kit.par)
                else:
                    new_labels, new_pars = (merged, labels[other]), (kit.par, pars[other])
                T.split(old, (M, cd * kit.mu[1]), new_labels, new_pars)
                skip.add(idx + 1)
                fused = True
        if not fused:
            T.append((c, cd), labels, pars)
    order_out = [("out", b.edge) for b in outs]
    if sorted(T.legs) != sorted(order_out):
        raise StateSumError("contraction left unexpected legs")
    T.permute_legs(order_out)
    src = tensor_spaces(*sp_in) if sp_in else UNIT
    tgt = tensor_spaces(*(sp_out[b.edge] for b in outs)) if outs else UNIT
    L = SuperMap.from_ints(src, tgt, _shrink(T.num).reshape(tgt.dim, src.dim), T.den)
    if raw:
        return L
    return _permute_slots(B, Zc, L)


# ---------------------------------------------------------------------------
# dense reference implementation


def evaluate_dense(
    A: FrobeniusAlgebra,
    B,
    *,
    V: Optional[Dict[int, Tuple[int, str]]] = None,
    Z: Optional[GradedCenter] = None,
    check: bool = True,
    raw: bool = False,
    max_dim: int = 1 << 12,
) -> SuperMap:
    """The construction step by step with explicit maps C, Z, Pi, F, K, L."""
    if isinstance(B, MarkedPLCW):
        B = Bordism(B)
    d = B.surface
    _check_inputs(A, d, check)
    trace = build_trace(d, V)
    Asp = A.space
    nE = len(trace.E)
    if Asp.dim ** nE > max_dim:
        raise StateSumError("surface too large for the dense evaluator")
    kit = _Kit(A)

    def smap(M, src_n, tgt_n):
        num, den = M
        return SuperMap.from_ints(
            tensor_spaces(*([Asp] * src_n)), tensor_spaces(*([Asp] * tgt_n)), num.reshape(Asp.dim ** tgt_n, Asp.dim ** src_n), den
        )

    # step: C = tensor of g_e, legs labelled
    pieces = []
    src_labels: List[tuple] = []
    tgt_labels: List[tuple] = []
    for e in range(len(d.edges)):
        s = d.index(e)
        if e in trace.in_edges:
            x = _edge_side(d, e)
            pieces.append(smap(_in_map(kit, d, e), 1, 1))
            src_labels.append(("in", e))
            tgt_labels.append(("E", e, x))
        else:
            cop = smap(kit.copairing(s + 1), 0, 2)
            pieces.append(cop)
            if e in trace.out_edges:
                x = _edge_side(d, e)
                tgt_labels += [("out", e), ("E", e, "r")] if x == "r" else [("E", e, "l"), ("out", e)]
            else:
                tgt_labels += [("E", e, "l"), ("E", e, "r")]
    C = tensor(*pieces)
    want_src = [("in", e) for e in trace.in_edges]
    want_tgt = [("E",) + ex for ex in trace.E] + [("out", e) for e in trace.out_edges]
    if src_labels:
        perm = [src_labels.index(x) for x in want_src]
        # precompose with the permutation taking circle order to edge order
        inv = [0] * len(perm)
        for k, p in enumerate(perm):
            inv[p] = k
        C = compose(C, permutation_map([Asp] * len(src_labels), inv))
    C = compose(permutation_map([Asp] * len(tgt_labels), [tgt_labels.index(x) for x in want_tgt]), C)
    # step: z
    counts = {ex: 0 for ex in trace.E}
    for ex in trace.V.values():
        counts[ex] += 1
    Tinv = tau_mult(A, -1)
    Zm = tensor(*(Tinv.power(counts[ex]) for ex in trace.E)) if trace.E else identity(UNIT)
    # step: F and the permutation E -> S
    F = tensor(*(compose(A.eps, A.multi_mult(len(f))) for f in d.faces)) if d.faces else identity(UNIT)
    Epos = {ex: i for i, ex in enumerate(trace.E)}
    Pi = permutation_map([Asp] * nE, [Epos[ex] for ex in _S_order(trace)])
    K = compose(F, compose(Pi, Zm))
    n_out = len(trace.out_edges)
    L = compose(tensor(K, identity(tensor_spaces(*([Asp] * n_out)))), C)
    if raw:
        return L
    return _boundary_maps(A, B, _graded(A, d, Z), L)


def _S_order(trace: EvaluationTrace) -> List[Tuple[int, str]]:
    inv = {fk: ex for ex, fk in trace.Phi.items()}
    return [inv[fk] for fk in trace.S]


# ---------------------------------------------------------------------------
# generators and closed forms


def _std(g, r, s, t, u, boundary) -> MarkedPLCW:
    return standard_surface(SpinSurfaceParams(g, r, tuple(s), tuple(t), tuple(u), tuple(boundary)))


def pants_mult(r: int, u1: int, u2: int, u3: int, l1: int, l2: int) -> MarkedPLCW:
    return _std(0, r, (), (), (u1, u2, u3), (("in", l1), ("in", l2), ("out", l1 + l2)))


def pants_comult(r: int, u1: int, u2: int, u3: int, l1: int, l2: int) -> MarkedPLCW:
    """Circles 1, 2 outgoing with labels l1, l2; circle 3 incoming with l1 + l2 - 2."""
    return _std(0, r, (), (), (u1, u2, u3), (("out", l1), ("out", l2), ("in", l1 + l2 - 2)))


def cup(r: int, u: int = 0) -> MarkedPLCW:
    return _std(0, r, (), (), (u,), (("out", 0),))


def cap(r: int, u: int = 0) -> MarkedPLCW:
    return _std(0, r, (), (), (u,), (("in", 2),))


def cylinder(r: int, lam: int, u1: int = 0, u2: int = 0) -> MarkedPLCW:
    return _std(0, r, (), (), (u1, u2), (("in", lam), ("out", lam)))


def evaluate_generator(A: FrobeniusAlgebra, which: str, r: int, params: Sequence[int] = (), Z: Optional[GradedCenter] = None) -> SuperMap:
    """Closed forms for the four generating bordisms.

    ``pants-mult`` and ``pants-comult`` take ``(u1, u2, u3, l1, l2)``; ``cup``
    and ``cap`` take no parameters.
    """
    if Z is None:
        Z = GradedCenter(A, r, [0, 2] + [p for p in params[3:]] + ([params[3] + params[4], params[3] + params[4] - 2] if len(params) == 5 else []))
    if which == "cup":
        return compose(Z.pi(0), A.eta)
    if which == "cap":
        return compose(A.eps, compose(tau_mult(A, -1), Z.iota(2)))
    u1, u2, u3, l1, l2 = params
    if which == "pants-mult":
        l3 = l1 + l2
        pre = tensor(Z.N(l1, -u1), Z.N(l2, -u2))
        return compose(Z.N(l3, u3), compose(Z.mu(l1, l2), pre))
    if which == "pants-comult":
        l3 = l1 + l2 - 2
        post = tensor(Z.N(l1, u1), Z.N(l2, u2))
        return compose(post, compose(Z.Delta(l1, l2), Z.N(l3, -u3)))
    raise ValueError(f"unknown generator {which!r}")


def evaluate_connected_closed_form(A: FrobeniusAlgebra, p: SpinSurfaceParams, Z: Optional[GradedCenter] = None) -> SuperMap:
    """``eps (tau^{-1} .) prod phi(s_i, t_i) mu^{(b)} (x_j N^{-u_j-1} iota_lambda_j)``."""
    if any(dr != "in" for dr, _ in p.boundary):
        raise StateSumError("closed form needs all boundary circles incoming")
    if Z is None:
        Z = GradedCenter(A, p.r, sorted(set(p.labels)))
    m = A.multi_mult(p.b)
    if p.b:
        m = compose(m, tensor(*(compose(nakayama_power(A, -u - 1), Z.iota(l)) for u, l in zip(p.u, p.labels))))
    for s, t in reversed(list(zip(p.s, p.t))):
        m = compose(phi(A, s, t), m)
    return compose(A.eps, compose(tau_mult(A, -1), m))
