"""Marked polygonal decompositions of surfaces and their r-spin data.

A decomposition is a list of polygons (faces) whose sides are glued along
oriented edges. Each face lists its sides counterclockwise as
``Side(edge, coherent)``; ``coherent`` says that the edge orientation agrees
with the counterclockwise walk, i.e. the face lies to the left of the edge.
One side per face is *marked*. Every edge carries an index in Z_r.

Corner ``k`` of a face sits between sides ``k - 1`` and ``k``; it is the
vertex where side ``k`` starts in the counterclockwise walk. The clockwise
vertex of the marked side is therefore the corner at the marked position.

Boundary circles consist of a single loop edge and a single vertex and are
either incoming (label lambda) or outgoing (label mu).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .zr import CyclicInt, reduce_mod

__all__ = [
    "Edge",
    "Side",
    "Face",
    "BoundaryComponent",
    "MarkedPLCW",
    "VertexData",
    "SpinSurfaceParams",
    "StructureError",
    "MoveError",
    "vertex_data",
    "is_admissible",
    "admissibility_violations",
    "flip_edge",
    "move_marking",
    "deck_transform",
    "remove_bivalent_vertex",
    "add_bivalent_vertex",
    "remove_edge",
    "add_edge",
    "remove_univalent_vertex",
    "add_univalent_vertex",
    "sphere",
    "standard_surface",
    "existence_check",
    "boundary_shift",
    "deck_equivalent",
    "count_structures",
    "enumerate_structures",
    "brute_force_classes",
    "disjoint_union",
    "glue",
    "INFINITE",
]

INFINITE = float("inf")


class StructureError(ValueError):
    """The data does not describe a valid decomposition."""


class MoveError(ValueError):
    """A move's preconditions are not met."""


@dataclass(frozen=True)
class Edge:
    start: int
    end: int
    index: int

    @property
    def is_loop(self) -> bool:
        return self.start == self.end


@dataclass(frozen=True)
class Side:
    edge: int
    coherent: bool


@dataclass(frozen=True)
class Face:
    sides: Tuple[Side, ...]
    marked: int = 0

    def __len__(self) -> int:
        return len(self.sides)

    def rotated(self) -> "Face":
        """The same face listed from its marked side."""
        m = self.marked
        return Face(self.sides[m:] + self.sides[:m], 0)


@dataclass(frozen=True)
class BoundaryComponent:
    edge: int
    vertex: int
    direction: str  # "in" or "out"
    label: int

    @property
    def incoming(self) -> bool:
        return self.direction == "in"


@dataclass(frozen=True)
class MarkedPLCW:
    r: int
    vertices: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    faces: Tuple[Face, ...]
    boundary: Tuple[BoundaryComponent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(
            self, "edges", tuple(replace(e, index=reduce_mod(e.index, self.r)) for e in self.edges)
        )
        object.__setattr__(self, "faces", tuple(self.faces))
        object.__setattr__(
            self, "boundary", tuple(replace(b, label=reduce_mod(b.label, self.r)) for b in self.boundary)
        )

    # -- basic queries -------------------------------------------------

    def index(self, e: int) -> int:
        return self.edges[e].index

    def indices(self) -> Tuple[int, ...]:
        return tuple(e.index for e in self.edges)

    def with_indices(self, indices: Sequence[int]) -> "MarkedPLCW":
        if len(indices) != len(self.edges):
            raise ValueError("one index per edge expected")
        edges = tuple(replace(e, index=i) for e, i in zip(self.edges, indices))
        return replace(self, edges=edges)

    def side_ends(self, side: Side) -> Tuple[int, int]:
        """(from, to) vertices of a side in the counterclockwise walk."""
        e = self.edges[side.edge]
        return (e.start, e.end) if side.coherent else (e.end, e.start)

    def corner(self, f: int, k: int) -> int:
        face = self.faces[f]
        return self.side_ends(face.sides[k % len(face)])[0]

    def clockwise_vertex(self, f: int) -> int:
        return self.corner(f, self.faces[f].marked)

    def occurrences(self, e: int) -> List[Tuple[int, int]]:
        """All (face, position) pairs where edge e appears."""
        out = []
        for fi, face in enumerate(self.faces):
            for k, sd in enumerate(face.sides):
                if sd.edge == e:
                    out.append((fi, k))
        return out

    def boundary_of_edge(self, e: int) -> Optional[BoundaryComponent]:
        for b in self.boundary:
            if b.edge == e:
                return b
        return None

    def boundary_of_vertex(self, v: int) -> Optional[BoundaryComponent]:
        for b in self.boundary:
            if b.vertex == v:
                return b
        return None

    def boundary_edges(self) -> set:
        return {b.edge for b in self.boundary}

    def incoming(self) -> List[BoundaryComponent]:
        return [b for b in self.boundary if b.incoming]

    def outgoing(self) -> List[BoundaryComponent]:
        return [b for b in self.boundary if not b.incoming]

    def R(self, b: BoundaryComponent) -> int:
        value = b.label - 1 if b.incoming else 1 - b.label
        return reduce_mod(value, self.r)

    def canonical(self) -> "MarkedPLCW":
        """Faces rotated to start at their marked side (for comparisons)."""
        return replace(self, faces=tuple(f.rotated() for f in self.faces))

    # -- validation ------------------------------------------------------

    def validate(self) -> None:
        nv = len(self.vertices)
        if tuple(self.vertices) != tuple(range(nv)):
            raise StructureError("vertex ids must be 0..n-1")
        for i, e in enumerate(self.edges):
            if not (0 <= e.start < nv and 0 <= e.end < nv):
                raise StructureError(f"edge {i} has an unknown endpoint")
        count = [0] * len(self.edges)
        sides_lr: Dict[Tuple[int, bool], int] = {}
        for fi, face in enumerate(self.faces):
            n = len(face.sides)
            if n == 0:
                raise StructureError(f"face {fi} has no sides")
            if not 0 <= face.marked < n:
                raise StructureError(f"face {fi} marks a missing side")
            for k, sd in enumerate(face.sides):
                if not 0 <= sd.edge < len(self.edges):
                    raise StructureError(f"face {fi} uses unknown edge {sd.edge}")
                count[sd.edge] += 1
                key = (sd.edge, sd.coherent)
                if key in sides_lr:
                    raise StructureError(f"edge {sd.edge} has two faces on the same side")
                sides_lr[key] = fi
                if self.side_ends(sd)[1] != self.side_ends(face.sides[(k + 1) % n])[0]:
                    raise StructureError(f"face {fi} does not close up at side {k}")
        bedges = set()
        bverts = set()
        for b in self.boundary:
            if b.direction not in ("in", "out"):
                raise StructureError("boundary direction must be 'in' or 'out'")
            e = self.edges[b.edge]
            if not (e.is_loop and e.start == b.vertex):
                raise StructureError("a boundary circle is one loop edge at its vertex")
            if b.edge in bedges or b.vertex in bverts:
                raise StructureError("boundary circles must be disjoint")
            bedges.add(b.edge)
            bverts.add(b.vertex)
        for i, c in enumerate(count):
            want = 1 if i in bedges else 2
            if c != want:
                raise StructureError(f"edge {i} appears on {c} sides, expected {want}")
        for b in self.boundary:
            for e_i, e in enumerate(self.edges):
                if e_i != b.edge and b.vertex in (e.start, e.end):
                    break
            else:
                if len(self.edges) > 1:
                    raise StructureError("boundary vertex without inner edge")

    # -- JSON ------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "vertices": list(self.vertices),
            "edges": [
                {"id": i, "start": e.start, "end": e.end, "index": e.index} for i, e in enumerate(self.edges)
            ],
            "faces": [
                {"sides": [{"edge": s.edge, "coherent": s.coherent} for s in f.sides], "marked": f.marked}
                for f in self.faces
            ],
            "boundary": [
                {"edge": b.edge, "vertex": b.vertex, "direction": b.direction, "label": b.label}
                for b in self.boundary
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "MarkedPLCW":
        try:
            r = int(data["r"])
            edges_in = sorted(data["edges"], key=lambda e: int(e["id"]))
            if [int(e["id"]) for e in edges_in] != list(range(len(edges_in))):
                raise StructureError("edge ids must be 0..m-1")
            edges = tuple(Edge(int(e["start"]), int(e["end"]), int(e["index"])) for e in edges_in)
            faces = tuple(
                Face(tuple(Side(int(s["edge"]), bool(s["coherent"])) for s in f["sides"]), int(f.get("marked", 0)))
                for f in data["faces"]
            )
            boundary = tuple(
                BoundaryComponent(int(b["edge"]), int(b["vertex"]), str(b["direction"]), int(b["label"]))
                for b in data.get("boundary", [])
            )
            vertices = tuple(int(v) for v in data["vertices"])
        except (KeyError, TypeError, AttributeError) as exc:
            raise StructureError(f"malformed surface description: {exc}") from None
        if r < 0:
            raise StructureError("r must be non-negative")
        d = cls(r, vertices, edges, faces, boundary)
        d.validate()
        return d

    @classmethod
    def loads(cls, text: str) -> "MarkedPLCW":
        return cls.from_json(json.loads(text))


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class VertexData:
    D: int
    N_start: int
    N_end: int
    sum_s_hat: CyclicInt

    @property
    def N(self) -> int:
        return self.N_start + self.N_end


def vertex_data(d: MarkedPLCW, v: int) -> VertexData:
    if v not in d.vertices:
        raise KeyError(f"unknown vertex {v}")
    D = sum(1 for f in range(len(d.faces)) if d.clockwise_vertex(f) == v)
    n_start = n_end = 0
    total = 0
    for e in d.edges:
        if e.start == v:
            n_start += 1
        if e.end == v:
            n_end += 1
        if e.is_loop and e.start == v:
            total += -1
        elif e.start == v:
            total += e.index
        elif e.end == v:
            total += -1 - e.index
    return VertexData(D, n_start, n_end, CyclicInt(total, d.r))


def _vertex_defect(d: MarkedPLCW, v: int) -> int:
    """LHS minus RHS of the vertex condition, reduced mod r."""
    vd = vertex_data(d, v)
    rhs = vd.D - vd.N + 1
    b = d.boundary_of_vertex(v)
    if b is not None:
        rhs -= d.R(b)
    return reduce_mod(vd.sum_s_hat.value - rhs, d.r)


def admissibility_violations(d: MarkedPLCW) -> List[int]:
    return [v for v in d.vertices if _vertex_defect(d, v) != 0]


def is_admissible(d: MarkedPLCW) -> bool:
    return not admissibility_violations(d)


# ---------------------------------------------------------------------------
# moves that keep the cell structure


def _check_edge(d: MarkedPLCW, e: int) -> None:
    if not 0 <= e < len(d.edges):
        raise KeyError(f"unknown edge {e}")


def _check_face(d: MarkedPLCW, f: int) -> None:
    if not 0 <= f < len(d.faces):
        raise KeyError(f"unknown face {f}")


def _set_index(d: MarkedPLCW, changes: Dict[int, int]) -> MarkedPLCW:
    edges = list(d.edges)
    for e, s in changes.items():
        edges[e] = replace(edges[e], index=reduce_mod(s, d.r))
    return replace(d, edges=tuple(edges))


def flip_edge(d: MarkedPLCW, e: int) -> MarkedPLCW:
    """Reverse edge e and replace its index s by -1 - s."""
    _check_edge(d, e)
    old = d.edges[e]
    edges = list(d.edges)
    edges[e] = Edge(old.end, old.start, reduce_mod(-1 - old.index, d.r))
    faces = tuple(
        Face(tuple(Side(s.edge, not s.coherent) if s.edge == e else s for s in f.sides), f.marked) for f in d.faces
    )
    return replace(d, edges=tuple(edges), faces=faces)


def move_marking(d: MarkedPLCW, f: int) -> MarkedPLCW:
    """Advance the marking of face f by one side counterclockwise."""
    _check_face(d, f)
    face = d.faces[f]
    sd = face.sides[face.marked]
    delta = -1 if sd.coherent else 1
    d = _set_index(d, {sd.edge: d.index(sd.edge) + delta})
    faces = list(d.faces)
    faces[f] = Face(face.sides, (face.marked + 1) % len(face))
    return replace(d, faces=tuple(faces))


def _deck_vector(d: MarkedPLCW, f: int) -> Dict[int, int]:
    face = d.faces[f]
    seen: Dict[int, int] = {}
    for sd in face.sides:
        seen[sd.edge] = seen.get(sd.edge, 0) + 1
    out: Dict[int, int] = {}
    for sd in face.sides:
        if seen[sd.edge] == 1:
            out[sd.edge] = 1 if sd.coherent else -1
    return out


def deck_transform(d: MarkedPLCW, f: int, k: int = 1) -> MarkedPLCW:
    """Shift indices around face f: +k on counterclockwise sides, -k on the others.

    Edges that occur twice on f are left alone.
    """
    _check_face(d, f)
    vec = _deck_vector(d, f)
    return _set_index(d, {e: d.index(e) + k * c for e, c in vec.items()})


# ---------------------------------------------------------------------------
# elementary moves


def _drop_vertex(d: MarkedPLCW, w: int, edges, faces, boundary) -> MarkedPLCW:
    def rv(v):
        return v - 1 if v > w else v

    edges = tuple(Edge(rv(e.start), rv(e.end), e.index) for e in edges)
    boundary = tuple(replace(b, vertex=rv(b.vertex)) for b in boundary)
    return MarkedPLCW(d.r, tuple(range(len(d.vertices) - 1)), edges, tuple(faces), boundary)


def _drop_edge(e_gone: int, edges, faces, boundary):
    def re(e):
        return e - 1 if e > e_gone else e

    edges = tuple(x for i, x in enumerate(edges) if i != e_gone)
    faces = tuple(Face(tuple(Side(re(s.edge), s.coherent) for s in f.sides), f.marked) for f in faces)
    boundary = tuple(replace(b, edge=re(b.edge)) for b in boundary)
    return edges, faces, boundary


def _edge_ends_at(d: MarkedPLCW, w: int) -> List[int]:
    ends = []
    for i, e in enumerate(d.edges):
        if e.start == w:
            ends.append(i)
        if e.end == w:
            ends.append(i)
    return ends


def remove_bivalent_vertex(d: MarkedPLCW, w: int) -> MarkedPLCW:
    """Merge the two edges at a bivalent inner vertex w into one.

    The edges are first oriented into a chain ``v -> w -> v'`` and markings
    whose clockwise vertex is w are moved on. Admissibility at w then forces
    both indices to agree and the merged edge keeps that common index.
    """
    if w not in d.vertices:
        raise KeyError(f"unknown vertex {w}")
    if d.boundary_of_vertex(w) is not None:
        raise MoveError("vertex lies on the boundary")
    ends = _edge_ends_at(d, w)
    if len(ends) != 2 or ends[0] == ends[1]:
        raise MoveError("vertex is not bivalent")
    e1, e2 = ends
    if d.edges[e1].end != w:
        d = flip_edge(d, e1)
    if d.edges[e2].start != w:
        d = flip_edge(d, e2)
    if d.edges[e1].end != w:
        e1, e2 = e2, e1
    for f in range(len(d.faces)):
        if d.clockwise_vertex(f) == w:
            d = move_marking(d, f)
    s1, s2 = d.index(e1), d.index(e2)
    if s1 != s2:
        raise MoveError("vertex condition at w fails, indices do not agree")
    keep, gone = min(e1, e2), max(e1, e2)
    edges = list(d.edges)
    edges[keep] = Edge(d.edges[e1].start, d.edges[e2].end, s1)
    faces = []
    for face in d.faces:
        n = len(face)
        starts = set()
        for k in range(n):
            a, b = face.sides[k], face.sides[(k + 1) % n]
            if n >= 2 and {a.edge, b.edge} == {e1, e2} and d.side_ends(a)[1] == w:
                starts.add(k)
        seconds = {(k + 1) % n for k in starts}
        sides = [Side(keep, sd.coherent) if k in starts else sd for k, sd in enumerate(face.sides) if k not in seconds]
        marked = face.marked - sum(1 for k in seconds if k < face.marked)
        faces.append(Face(tuple(sides), marked))
    edges_t, faces_t, boundary = _drop_edge(gone, edges, faces, d.boundary)
    return _drop_vertex(d, w, edges_t, faces_t, boundary)


def add_bivalent_vertex(d: MarkedPLCW, e: int) -> MarkedPLCW:
    """Subdivide edge e by a new vertex; both halves inherit the index of e.

    The first half keeps the id of e, the second half and the new vertex get
    the next free ids.
    """
    _check_edge(d, e)
    if d.boundary_of_edge(e) is not None:
        raise MoveError("cannot subdivide a boundary edge")
    old = d.edges[e]
    w = len(d.vertices)
    e2 = len(d.edges)
    edges = list(d.edges)
    edges[e] = Edge(old.start, w, old.index)
    edges.append(Edge(w, old.end, old.index))
    faces = []
    for face in d.faces:
        sides: List[Side] = []
        marked = face.marked
        for k, sd in enumerate(face.sides):
            if k == face.marked:
                marked = len(sides)
            if sd.edge == e:
                # keep the clockwise vertex of a marked side unchanged
                pair = [Side(e, True), Side(e2, True)] if sd.coherent else [Side(e2, False), Side(e, False)]
                sides.extend(pair)
            else:
                sides.append(sd)
        faces.append(Face(tuple(sides), marked))
    return MarkedPLCW(d.r, tuple(range(w + 1)), tuple(edges), tuple(faces), d.boundary)


def remove_edge(d: MarkedPLCW, e: int) -> MarkedPLCW:
    """Delete an inner edge separating two different faces and join them.

    Markings are first moved so that e is marked on the face to its left and
    unmarked on the face to its right; a deck transformation of the left face
    then sets the index of e to 0. The joined face keeps the marking of the
    right face.
    """
    _check_edge(d, e)
    if d.boundary_of_edge(e) is not None:
        raise MoveError("cannot remove a boundary edge")
    occ = d.occurrences(e)
    (fa, ka), (fb, kb) = occ
    if fa == fb:
        raise MoveError("edge borders the same face on both sides")
    if len(d.faces[fa]) == 1 and len(d.faces[fb]) == 1:
        raise MoveError("cannot join two 1-gons")
    top = fa if d.faces[fa].sides[ka].coherent else fb
    bot = fb if top == fa else fa
    if len(d.faces[bot]) == 1:
        d = flip_edge(d, e)
        top, bot = bot, top
    while d.faces[top].sides[d.faces[top].marked].edge != e:
        d = move_marking(d, top)
    fbot = d.faces[bot]
    if fbot.sides[fbot.marked].edge == e:
        d = move_marking(d, bot)
    d = deck_transform(d, top, -d.index(e))
    if d.index(e) != 0:
        raise MoveError("index of the removed edge cannot be normalised to 0")
    ftop, fbot = d.faces[top], d.faces[bot]
    t = ftop.rotated().sides  # starts with e
    j = next(k for k, sd in enumerate(fbot.sides) if sd.edge == e)
    sides = fbot.sides[:j] + t[1:] + fbot.sides[j + 1:]
    marked = fbot.marked if fbot.marked < j else fbot.marked + len(t) - 2
    faces = list(d.faces)
    faces[bot] = Face(tuple(sides), marked)
    del faces[top]
    edges_t, faces_t, boundary = _drop_edge(e, d.edges, faces, d.boundary)
    return MarkedPLCW(d.r, d.vertices, edges_t, faces_t, boundary)


def add_edge(d: MarkedPLCW, f: int, i: int, j: int) -> MarkedPLCW:
    """Split face f by a new edge from corner i to corner j (index 0).

    The piece without the marked side becomes a new face (appended) whose
    marked side is the new edge, traversed coherently.
    """
    _check_face(d, f)
    face = d.faces[f]
    n = len(face)
    i %= n
    j %= n
    if i == j:
        raise MoveError("corners must differ")
    m = face.marked
    # the arc of sides from corner i to corner j is sides i..j-1
    arc1 = [(i + k) % n for k in range((j - i) % n)]
    arc2 = [(j + k) % n for k in range((i - j) % n)]
    if m in arc1:
        arc1, arc2 = arc2, arc1
        i, j = j, i
    # arc1 runs from corner i to corner j and is unmarked; close it with c_j -> c_i
    e_new = len(d.edges)
    edges = list(d.edges) + [Edge(d.corner(f, j), d.corner(f, i), 0)]
    top = Face((Side(e_new, True),) + tuple(face.sides[k] for k in arc1), 0)
    # the remaining face keeps its rotation where possible
    if i < j:
        sides = face.sides[:i] + (Side(e_new, False),) + face.sides[j:]
        marked = m if m < i else m - (j - i) + 1
    else:
        sides = face.sides[j:i] + (Side(e_new, False),)
        marked = m - j
    faces = list(d.faces)
    faces[f] = Face(tuple(sides), marked)
    faces.append(top)
    return MarkedPLCW(d.r, d.vertices, tuple(edges), tuple(faces), d.boundary)


def _univalent_edge(d: MarkedPLCW, w: int) -> int:
    ends = _edge_ends_at(d, w)
    if len(ends) != 1:
        raise MoveError("vertex is not univalent")
    return ends[0]


def remove_univalent_vertex(d: MarkedPLCW, w: int) -> MarkedPLCW:
    """Delete a univalent inner vertex together with its (unmarked) edge."""
    if w not in d.vertices:
        raise KeyError(f"unknown vertex {w}")
    if d.boundary_of_vertex(w) is not None:
        raise MoveError("vertex lies on the boundary")
    e = _univalent_edge(d, w)
    for fi, k in d.occurrences(e):
        if d.faces[fi].marked == k:
            raise MoveError("the edge at a univalent vertex must be unmarked")
    edge = d.edges[e]
    forced = 0 if edge.start == w else reduce_mod(-1, d.r)
    if edge.index != forced:
        raise MoveError(f"edge index {edge.index} differs from the forced value {forced}")
    (f, k1), (f2, k2) = d.occurrences(e)
    if f != f2:
        raise StructureError("edge at a univalent vertex must bound a single face")
    face = d.faces[f]
    drop = {k1, k2}
    sides = [sd for k, sd in enumerate(face.sides) if k not in drop]
    marked = face.marked - sum(1 for k in drop if k < face.marked)
    faces = list(d.faces)
    faces[f] = Face(tuple(sides), marked)
    edges_t, faces_t, boundary = _drop_edge(e, d.edges, faces, d.boundary)
    return _drop_vertex(d, w, edges_t, faces_t, boundary)


def add_univalent_vertex(d: MarkedPLCW, f: int, k: int) -> MarkedPLCW:
    """Attach a new vertex inside face f by an edge from corner k.

    The edge runs from the corner to the new vertex and carries the forced
    index -1.
    """
    _check_face(d, f)
    face = d.faces[f]
    n = len(face)
    k %= n
    v = d.corner(f, k)
    w = len(d.vertices)
    e = len(d.edges)
    edges = list(d.edges) + [Edge(v, w, reduce_mod(-1, d.r))]
    sides = list(face.sides[:k]) + [Side(e, True), Side(e, False)] + list(face.sides[k:])
    marked = face.marked + 2 if face.marked >= k else face.marked
    faces = list(d.faces)
    faces[f] = Face(tuple(sides), marked)
    return MarkedPLCW(d.r, tuple(range(w + 1)), tuple(edges), tuple(faces), d.boundary)


# ---------------------------------------------------------------------------
# standard surfaces


@dataclass(frozen=True)
class SpinSurfaceParams:
    """Parameters of the one-face model of a connected surface.

    ``boundary`` lists ``(direction, label)`` per boundary circle; ``u`` has
    one entry per circle and ``s``, ``t`` one per handle.
    """

    g: int
    r: int
    s: Tuple[int, ...] = ()
    t: Tuple[int, ...] = ()
    u: Tuple[int, ...] = ()
    boundary: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        r = self.r
        object.__setattr__(self, "s", tuple(reduce_mod(x, r) for x in self.s))
        object.__setattr__(self, "t", tuple(reduce_mod(x, r) for x in self.t))
        object.__setattr__(self, "u", tuple(reduce_mod(x, r) for x in self.u))
        object.__setattr__(self, "boundary", tuple((dr, reduce_mod(l, r)) for dr, l in self.boundary))
        if len(self.s) != self.g or len(self.t) != self.g:
            raise ValueError("need one s and one t per handle")
        if len(self.u) != len(self.boundary):
            raise ValueError("need one u per boundary circle")
        for dr, _ in self.boundary:
            if dr not in ("in", "out"):
                raise ValueError("boundary direction must be 'in' or 'out'")

    @property
    def b(self) -> int:
        return len(self.boundary)

    @property
    def R(self) -> Tuple[int, ...]:
        return tuple(
            reduce_mod(l - 1 if dr == "in" else 1 - l, self.r) for dr, l in self.boundary
        )

    @property
    def labels(self) -> Tuple[int, ...]:
        return tuple(l for _, l in self.boundary)

    @classmethod
    def incoming(cls, g: int, r: int, s=(), t=(), u=(), lambdas=()) -> "SpinSurfaceParams":
        return cls(g, r, tuple(s), tuple(t), tuple(u), tuple(("in", l) for l in lambdas))

    def replace(self, **kw) -> "SpinSurfaceParams":
        return replace(self, **kw)


def existence_check(g: int, b: int, R: Sequence[int], r: int) -> bool:
    """Whether 2 - 2g - b = sum R (mod r)."""
    if len(R) != b:
        raise ValueError("one R per boundary circle")
    return reduce_mod(2 - 2 * g - b - sum(R), r) == 0


def sphere(r: int, index: int = 0) -> MarkedPLCW:
    """The sphere as two 1-gons glued along one loop edge."""
    return MarkedPLCW(
        r,
        (0,),
        (Edge(0, 0, index),),
        (Face((Side(0, True),), 0), Face((Side(0, False),), 0)),
    )


def standard_surface(p: SpinSurfaceParams, check: bool = True) -> MarkedPLCW:
    """One-face decomposition of the connected surface with parameters p.

    Vertex 0 is the inner vertex and vertex j is on boundary circle j. Edge
    ids: r_j = 2j, u_j = 2j+1 (j from 0), then s_i = 2b+2i, t_i = 2b+2i+1.
    Going around the face: for every boundary circle the sides
    ``r_j, u_j^{-1}, r_j^{-1}``, then for every handle ``s_i, t_i, s_i^{-1}, t_i^{-1}``.
    The marked side is r_1 if there is boundary, s_1 otherwise.
    """
    g, b, r = p.g, p.b, p.r
    if g + b < 1:
        raise ValueError("the one-face model needs g + b >= 1; use sphere() for g = b = 0")
    if check and not existence_check(g, b, p.R, r):
        raise ValueError("no r-spin structure with these boundary labels")
    edges: List[Edge] = []
    sides: List[Side] = []
    boundary: List[BoundaryComponent] = []
    for j in range(b):
        v = j + 1
        er, eu = 2 * j, 2 * j + 1
        edges.append(Edge(0, v, p.R[j]))
        edges.append(Edge(v, v, p.u[j]))
        sides += [Side(er, True), Side(eu, False), Side(er, False)]
        direction, label = p.boundary[j]
        boundary.append(BoundaryComponent(eu, v, direction, label))
    for i in range(g):
        es, et = 2 * b + 2 * i, 2 * b + 2 * i + 1
        edges.append(Edge(0, 0, p.s[i]))
        edges.append(Edge(0, 0, p.t[i]))
        sides += [Side(es, True), Side(et, True), Side(es, False), Side(et, False)]
    return MarkedPLCW(r, tuple(range(b + 1)), tuple(edges), (Face(tuple(sides), 0),), tuple(boundary))


def standard_edge_ids(g: int, b: int) -> Dict[str, List[int]]:
    return {
        "r": [2 * j for j in range(b)],
        "u": [2 * j + 1 for j in range(b)],
        "s": [2 * b + 2 * i for i in range(g)],
        "t": [2 * b + 2 * i + 1 for i in range(g)],
    }


def boundary_shift(p: SpinSurfaceParams, c: int) -> SpinSurfaceParams:
    """Parameters after ``deck_transform(standard_surface(p), 0, -c)``.

    The u-sides run clockwise around the single face, so a deck shift by -c
    raises every u_j by c.
    """
    return p.replace(u=tuple(x + c for x in p.u))


# ---------------------------------------------------------------------------
# deck equivalence


def _deck_matrix(d: MarkedPLCW) -> List[List[int]]:
    m = len(d.edges)
    cols = []
    for f in range(len(d.faces)):
        vec = _deck_vector(d, f)
        cols.append([vec.get(e, 0) for e in range(m)])
    return [[cols[f][e] for f in range(len(cols))] for e in range(m)]


def _lattice_contains(gens: List[List[int]], target: List[int]) -> bool:
    """Is ``target`` an integer combination of the columns of ``gens``?"""
    import sympy
    from sympy.matrices.normalforms import invariant_factors

    rows = len(target)
    if not gens or not gens[0]:
        return all(x == 0 for x in target)
    M = sympy.Matrix(gens)
    Mx = M.row_join(sympy.Matrix(rows, 1, target))

    def profile(mat):
        facs = [x for x in invariant_factors(mat, domain=sympy.ZZ) if x != 0]
        prod = 1
        for x in facs:
            prod *= abs(int(x))
        return len(facs), prod

    return profile(M) == profile(Mx)


def deck_equivalent(d: MarkedPLCW, s1: Sequence[int], s2: Sequence[int]) -> bool:
    """Whether two index assignments on d differ by deck transformations.

    Solves ``s2 - s1 = M k (mod r)`` for the per-face shifts k, with M the
    deck matrix, by comparing Smith invariants of ``[M | rI]`` with and
    without the difference vector appended.
    """
    m = len(d.edges)
    if len(s1) != m or len(s2) != m:
        raise ValueError("index maps must have one entry per edge")
    r = d.r
    delta = [reduce_mod(b - a, r) for a, b in zip(s1, s2)]
    if all(x == 0 for x in delta):
        return True
    M = _deck_matrix(d)
    gens = [row + ([r if i == k else 0 for k in range(m)] if r else []) for i, row in enumerate(M)]
    return _lattice_contains(gens, delta)


# ---------------------------------------------------------------------------
# counting


def count_structures(g: int, b: int, r: int, R: Sequence[int]):
    """Number of r-spin structures on the connected surface (INFINITE marker possible)."""
    if g == 0 and b == 0:
        return 1 if r in (1, 2) else 0
    if not existence_check(g, b, R, r):
        return 0
    if r == 0:
        return 1 if g == 0 and b <= 1 else INFINITE
    if b == 0:
        return r ** (2 * g)
    return r ** (2 * g + b - 1)


def enumerate_structures(g: int, b: int, r: int, R: Sequence[int], directions: Optional[Sequence[str]] = None) -> List[SpinSurfaceParams]:
    """One parameter tuple per isomorphism class, with u_b = 0 when b >= 1."""
    if r == 0:
        raise ValueError("r = 0 gives infinitely many classes")
    if not existence_check(g, b, R, r):
        raise ValueError("no r-spin structure with these boundary labels")
    directions = list(directions or ["in"] * b)
    labels = [reduce_mod(Rj + 1 if dr == "in" else 1 - Rj, r) for Rj, dr in zip(R, directions)]
    bd = tuple(zip(directions, labels))
    out = []
    free_u = max(b - 1, 0)
    for st in product(range(r), repeat=2 * g):
        for us in product(range(r), repeat=free_u):
            u = tuple(us) + ((0,) if b else ())
            out.append(SpinSurfaceParams(g, r, st[:g], st[g:], u, bd))
    return out


def admissible_assignments(d: MarkedPLCW) -> Iterator[Tuple[int, ...]]:
    """All admissible index maps on the marked decomposition d (r > 0).

    Edges are assigned one at a time; a vertex condition is checked as soon
    as every edge at that vertex has a value.
    """
    r = d.r
    if r == 0:
        raise ValueError("r = 0 has infinitely many assignments")
    m = len(d.edges)
    base = {v: vertex_data(d, v) for v in d.vertices}
    target = {}
    for v in d.vertices:
        rhs = base[v].D - base[v].N + 1
        bc = d.boundary_of_vertex(v)
        if bc is not None:
            rhs -= d.R(bc)
        target[v] = rhs
    last_edge = {}
    for v in d.vertices:
        inc = [i for i, e in enumerate(d.edges) if v in (e.start, e.end)]
        last_edge.setdefault(max(inc) if inc else -1, []).append(v)
    for v in last_edge.get(-1, []):
        if reduce_mod(target[v], r) != 0:
            return

    contrib_const = {v: 0 for v in d.vertices}
    terms: Dict[int, List[Tuple[int, int]]] = {v: [] for v in d.vertices}
    for i, e in enumerate(d.edges):
        if e.is_loop:
            contrib_const[e.start] += -1
        else:
            terms[e.start].append((i, 1))
            terms[e.end].append((i, -1))
            contrib_const[e.end] += -1

    vals = [0] * m

    def ok(v):
        total = contrib_const[v] + sum(c * vals[i] for i, c in terms[v])
        return reduce_mod(total - target[v], r) == 0

    def rec(i):
        if i == m:
            yield tuple(vals)
            return
        for x in range(r):
            vals[i] = x
            if all(ok(v) for v in last_edge.get(i, [])):
                yield from rec(i + 1)

    yield from rec(0)


def brute_force_classes(d: MarkedPLCW) -> List[Tuple[int, ...]]:
    """Admissible index maps modulo deck transformations, by breadth-first search.

    Returns the lexicographically smallest member of each class.
    """
    r = d.r
    gens = []
    for f in range(len(d.faces)):
        vec = _deck_vector(d, f)
        if vec:
            gens.append(vec)
    seen = set()
    reps = []
    for a in admissible_assignments(d):
        if a in seen:
            continue
        orbit = {a}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            for vec in gens:
                y = list(x)
                for e, c in vec.items():
                    y[e] = (y[e] + c) % r
                y = tuple(y)
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        seen |= orbit
        reps.append(min(orbit))
    return reps


# ---------------------------------------------------------------------------
# disjoint union and gluing


def disjoint_union(d1: MarkedPLCW, d2: MarkedPLCW) -> MarkedPLCW:
    """d1 followed by d2, with the ids of d2 shifted."""
    if d1.r != d2.r:
        raise ValueError("different moduli")
    nv, ne = len(d1.vertices), len(d1.edges)
    edges = d1.edges + tuple(Edge(e.start + nv, e.end + nv, e.index) for e in d2.edges)
    faces = d1.faces + tuple(
        Face(tuple(Side(s.edge + ne, s.coherent) for s in f.sides), f.marked) for f in d2.faces
    )
    boundary = d1.boundary + tuple(replace(b, edge=b.edge + ne, vertex=b.vertex + nv) for b in d2.boundary)
    return MarkedPLCW(d1.r, tuple(range(nv + len(d2.vertices))), edges, faces, boundary)


def _surface_on_right(d: MarkedPLCW, b: BoundaryComponent) -> MarkedPLCW:
    (f, k), = d.occurrences(b.edge)
    if d.faces[f].sides[k].coherent:
        d = flip_edge(d, b.edge)
    return d


def glue(out_bordism: MarkedPLCW, in_bordism: MarkedPLCW, pairing: Sequence[Tuple[int, int]]) -> MarkedPLCW:
    """Glue outgoing circles of the first surface to incoming circles of the second.

    ``pairing`` lists ``(k, l)``: the k-th outgoing circle of ``out_bordism``
    is glued to the l-th incoming circle of ``in_bordism``. Both boundary
    edges are first oriented with the surface on their right; the glued edge
    keeps the orientation of the outgoing edge and the index ``s_out + s_in + 1``.
    The boundary of the result lists the unpaired circles of the first surface,
    then those of the second.
    """
    if out_bordism.r != in_bordism.r:
        raise ValueError("different moduli")
    X, Y = out_bordism, in_bordism
    outs, ins = X.outgoing(), Y.incoming()
    used_k = set()
    used_l = set()
    for k, l in pairing:
        if not (0 <= k < len(outs)) or not (0 <= l < len(ins)):
            raise MoveError("pairing refers to a missing boundary circle")
        if k in used_k or l in used_l:
            raise MoveError("a boundary circle is glued twice")
        used_k.add(k)
        used_l.add(l)
        if outs[k].label != ins[l].label:
            raise MoveError(f"label mismatch: mu = {outs[k].label} but lambda = {ins[l].label}")
    for bc in outs:
        X = _surface_on_right(X, bc)
    for bc in ins:
        Y = _surface_on_right(Y, bc)
    U = disjoint_union(X, Y)
    nv, ne = len(X.vertices), len(X.edges)
    r = U.r
    edges = list(U.edges)
    vmap = {v: v for v in U.vertices}
    emap = {e: e for e in range(len(edges))}
    flip_sides = set()
    for k, l in pairing:
        bo = outs[k]
        bi = ins[l]
        eo, vo = bo.edge, bo.vertex
        ei, vi = bi.edge + ne, bi.vertex + nv
        edges[eo] = replace(edges[eo], index=reduce_mod(edges[eo].index + edges[ei].index + 1, r))
        emap[ei] = eo
        vmap[vi] = vo
        flip_sides.add(ei)
    # rebuild with merged ids
    keep_e = [e for e in range(len(edges)) if e not in flip_sides]
    keep_v = [v for v in U.vertices if vmap[v] == v]
    new_e = {e: i for i, e in enumerate(keep_e)}
    new_v = {v: i for i, v in enumerate(keep_v)}

    def ve(v):
        return new_v[vmap[v]]

    def ee(e):
        return new_e[emap[e]]

    edges_out = tuple(Edge(ve(edges[e].start), ve(edges[e].end), edges[e].index) for e in keep_e)
    faces_out = tuple(
        Face(
            tuple(Side(ee(s.edge), (not s.coherent) if s.edge in flip_sides else s.coherent) for s in f.sides),
            f.marked,
        )
        for f in U.faces
    )
    paired_out = {outs[k].edge for k, _ in pairing}
    paired_in = {ins[l].edge + ne for _, l in pairing}
    boundary = tuple(
        replace(b, edge=ee(b.edge), vertex=ve(b.vertex))
        for b in U.boundary
        if b.edge not in paired_out and b.edge not in paired_in
    )
    return MarkedPLCW(r, tuple(range(len(keep_v))), edges_out, faces_out, boundary)
