"""Holonomy of curves on a marked decomposition and the r-spin Arf invariant.

A curve is cut by the edges into arcs, each running inside one face from an
entry side to an exit side (side positions as in the face's side list).
Each arc contributes ``s_hat + delta``:

* ``s_hat`` is the index s of the exit edge when the arc leaves through an
  incoherent side (the edge then points from the arc's left to its right),
  and ``-s - 1`` when it leaves through a coherent side;
* ``delta`` is 1 when the marked corner of the face lies to the right of the
  arc. Walking counterclockwise from the entry point to the exit point passes
  exactly the corners on the right, i.e. corners ``entry+1, ..., exit``.

With these conventions a counterclockwise loop around any inner vertex has
holonomy 1 precisely when the vertex condition holds there.

An open curve starts and ends on boundary edges. The first arc's entry and
the last arc's exit are those boundary sides, and the flags
``start_aligned`` / ``end_aligned`` say whether the tangent vector there runs
along the edge orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from .plcw import MarkedPLCW, SpinSurfaceParams, existence_check, standard_surface
from .zr import CyclicInt, reduce_mod

__all__ = [
    "Arc",
    "CombinatorialCurve",
    "CurveError",
    "holonomy",
    "vertex_loop",
    "standard_curves",
    "standard_holonomies",
    "arf",
    "clifford_value",
    "verify_arf_theorem",
]


class CurveError(ValueError):
    """The arcs do not fit together into a curve on the decomposition."""


@dataclass(frozen=True)
class Arc:
    """One piece of a curve inside a face.

    ``around`` only matters when entry and exit are the same side: it says
    that the counterclockwise walk from entry to exit goes once around the
    face (passing every corner) rather than straight along the side.
    ``sign`` is optional; when given it must equal the crossing sign at the
    exit (+1 for an incoherent exit side, -1 for a coherent one).
    """

    face: int
    entry: int
    exit: int
    sign: Optional[int] = None
    around: bool = False


@dataclass(frozen=True)
class CombinatorialCurve:
    arcs: tuple
    closed: bool = True
    start_aligned: bool = True
    end_aligned: bool = True

    @classmethod
    def from_json(cls, data) -> "CombinatorialCurve":
        if isinstance(data, list):
            data = {"arcs": data}
        arcs = []
        for a in data["arcs"]:
            if isinstance(a, dict):
                arcs.append(Arc(a["face"], a["entry"], a["exit"], a.get("sign"), bool(a.get("around", False))))
            else:
                arcs.append(Arc(*a))
        return cls(
            tuple(arcs),
            bool(data.get("closed", True)),
            bool(data.get("start_aligned", True)),
            bool(data.get("end_aligned", True)),
        )

    def to_json(self) -> dict:
        return {
            "closed": self.closed,
            "start_aligned": self.start_aligned,
            "end_aligned": self.end_aligned,
            "arcs": [
                {"face": a.face, "entry": a.entry, "exit": a.exit, "sign": a.sign, "around": a.around}
                for a in self.arcs
            ],
        }


def _right_corners(n: int, a: Arc) -> List[int]:
    if a.entry == a.exit:
        return list(range(n)) if a.around else []
    k = (a.exit - a.entry) % n
    return [(a.entry + 1 + m) % n for m in range(k)]


def _partner(d: MarkedPLCW, f: int, k: int):
    e = d.faces[f].sides[k].edge
    others = [o for o in d.occurrences(e) if o != (f, k)]
    return others[0] if others else None


def check_curve(d: MarkedPLCW, c: CombinatorialCurve) -> None:
    if not c.arcs:
        raise CurveError("a curve needs at least one arc")
    for a in c.arcs:
        if not 0 <= a.face < len(d.faces):
            raise CurveError(f"no face {a.face}")
        n = len(d.faces[a.face])
        if not (0 <= a.entry < n and 0 <= a.exit < n):
            raise CurveError(f"side position out of range in {a}")
    pairs = list(zip(c.arcs, c.arcs[1:]))
    if c.closed:
        pairs.append((c.arcs[-1], c.arcs[0]))
    for a, nxt in pairs:
        if d.boundary_of_edge(d.faces[a.face].sides[a.exit].edge) is not None:
            raise CurveError(f"{a} leaves through a boundary edge")
        if _partner(d, a.face, a.exit) != (nxt.face, nxt.entry):
            raise CurveError(f"{nxt} does not continue {a} across the edge")
    if not c.closed:
        first, last = c.arcs[0], c.arcs[-1]
        for a, side in ((first, first.entry), (last, last.exit)):
            if d.boundary_of_edge(d.faces[a.face].sides[side].edge) is None:
                raise CurveError("open curves must start and end on boundary edges")


def holonomy(d: MarkedPLCW, c: CombinatorialCurve) -> CyclicInt:
    """Holonomy of the curve in Z_r."""
    check_curve(d, c)
    total = 0
    for pos, a in enumerate(c.arcs):
        face = d.faces[a.face]
        side = face.sides[a.exit]
        s = d.edges[side.edge].index
        is_end = not c.closed and pos == len(c.arcs) - 1
        if is_end:
            s_hat = s if c.end_aligned else -s - 1
        else:
            sign = -1 if side.coherent else 1
            if a.sign is not None and a.sign != sign:
                raise CurveError(f"crossing sign of {a} should be {sign:+d}")
            s_hat = s if sign > 0 else -s - 1
        delta = 1 if face.marked in _right_corners(len(face), a) else 0
        total += s_hat + delta
    if not c.closed:
        first = c.arcs[0]
        s0 = d.edges[d.faces[first.face].sides[first.entry].edge].index
        total += (-s0 - 1 if c.start_aligned else s0) + 1
    return CyclicInt(total, d.r)


def vertex_loop(d: MarkedPLCW, v: int, counterclockwise: bool = True) -> CombinatorialCurve:
    """A small loop around the inner vertex v."""
    if d.boundary_of_vertex(v) is not None:
        raise CurveError("vertex loops are only defined for inner vertices")
    start = None
    for f, face in enumerate(d.faces):
        for k in range(len(face)):
            if d.corner(f, k) == v:
                start = (f, k)
                break
        if start:
            break
    if start is None:
        raise CurveError(f"vertex {v} has no corners")
    arcs = []
    f, k = start
    while True:
        n = len(d.faces[f])
        # cut off corner k: enter through side k, leave through side k - 1
        arcs.append(Arc(f, k, (k - 1) % n, around=False))
        f, k = _partner(d, f, (k - 1) % n)
        if (f, k) == start:
            break
        if len(arcs) > 4 * len(d.edges) + 4:
            raise CurveError("vertex loop did not close up")
    ccw = CombinatorialCurve(tuple(arcs))
    return ccw if counterclockwise else reverse_curve(d, ccw)


def reverse_curve(d: MarkedPLCW, c: CombinatorialCurve) -> CombinatorialCurve:
    """The same curve run backwards (closed curves only)."""
    if not c.closed:
        raise CurveError("only closed curves can be reversed here")
    arcs = tuple(Arc(a.face, a.exit, a.entry, around=(a.entry == a.exit and not a.around)) for a in reversed(c.arcs))
    return CombinatorialCurve(arcs)


# ---------------------------------------------------------------------------
# standard curves on the one-face model


def standard_curves(g: int, b: int) -> Dict[str, CombinatorialCurve]:
    """The curves a_i, b_i, c_j (j < b-1) and the boundary-parallel loops d_j on the one-face model.

    Keys are ``a0, b0, ..., c0, ..., boundary0, ...`` (0-based).
    """
    out = {}
    for i in range(g):
        h = 3 * b + 4 * i
        out[f"a{i}"] = CombinatorialCurve((Arc(0, h, h + 2),))
        out[f"b{i}"] = CombinatorialCurve((Arc(0, h + 1, h + 3),))
    for j in range(b - 1):
        out[f"c{j}"] = CombinatorialCurve((Arc(0, 3 * (b - 1) + 1, 3 * j + 1),), closed=False)
    for j in range(b):
        out[f"boundary{j}"] = CombinatorialCurve((Arc(0, 3 * j + 2, 3 * j),))
    return out


def _incoming_only(p: SpinSurfaceParams) -> None:
    if any(dr != "in" for dr, _ in p.boundary):
        raise ValueError("only incoming boundary circles are supported")


def standard_holonomies(p: SpinSurfaceParams) -> Dict[str, CyclicInt]:
    """Closed forms: a_i -> s_i, b_i -> t_i, c_j -> u_j - u_b + 1, boundary_j -> 1 - lambda_j."""
    _incoming_only(p)
    if p.g + p.b < 1:
        raise ValueError("need g + b >= 1")
    r = p.r
    out = {}
    for i in range(p.g):
        out[f"a{i}"] = CyclicInt(p.s[i], r)
        out[f"b{i}"] = CyclicInt(p.t[i], r)
    for j in range(p.b - 1):
        out[f"c{j}"] = CyclicInt(p.u[j] - p.u[-1] + 1, r)
    for j in range(p.b):
        out[f"boundary{j}"] = CyclicInt(1 - p.labels[j], r)
    return out


def arf(p: SpinSurfaceParams) -> int:
    """The Arf invariant in Z_2 (r even, incoming boundary)."""
    if p.r % 2:
        raise ValueError("the Arf invariant needs r even")
    _incoming_only(p)
    z = standard_holonomies(p)
    total = sum((z[f"a{i}"].value + 1) * (z[f"b{i}"].value + 1) for i in range(p.g))
    total += sum((z[f"c{j}"].value + 1) * (z[f"boundary{j}"].value + 1) for j in range(p.b - 1))
    return total % 2


# ---------------------------------------------------------------------------
# comparison with the Clifford state sum


def clifford_value(p: SpinSurfaceParams) -> Fraction:
    """Z_Cl of the one-face surface evaluated on theta^lambda_1 x ... x theta^lambda_b."""
    from .frobenius import clifford_algebra, graded_center
    from .statesum import evaluate

    _incoming_only(p)
    A = clifford_algebra(p.r if p.r else 2)
    Z = graded_center(A, p.r, degrees=set(p.labels) | {0})
    M = evaluate(A, standard_surface(p), Z=Z)
    vec = np.array([Fraction(1)], dtype=object)
    for lam in p.labels:
        theta = np.array([Fraction(0), Fraction(0)], dtype=object)
        theta[lam % 2] = Fraction(1)
        coords = Z.pi(lam).matrix.dot(theta)
        vec = np.kron(vec, coords)
    val = M.matrix.dot(vec)
    if val.shape != (1,):
        raise ArithmeticError("expected a closed output")
    return Fraction(val[0])


def verify_arf_theorem(p: SpinSurfaceParams) -> bool:
    """Check Z_Cl(p)(theta^lambda...) == 2^{1-g} (-1)^Arf exactly."""
    if p.r % 2:
        raise ValueError("the Arf theorem needs r even")
    _incoming_only(p)
    if not existence_check(p.g, p.b, p.R, p.r):
        raise ValueError("no r-spin structure with these boundary labels")
    expected = Fraction(2) ** (1 - p.g) * (-1) ** arf(p)
    return clifford_value(p) == expected
