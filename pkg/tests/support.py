"""Shared generators for the test suite: random surfaces, random moves, composites."""

import itertools
import random

from rspin.plcw import (
    MoveError,
    SpinSurfaceParams,
    add_bivalent_vertex,
    add_edge,
    add_univalent_vertex,
    deck_transform,
    existence_check,
    flip_edge,
    move_marking,
    remove_bivalent_vertex,
    remove_edge,
    remove_univalent_vertex,
    standard_surface,
)
from rspin.statesum import build_trace, cap, cup, cylinder, pants_comult, pants_mult
from rspin.superlinalg import compose, identity, permutation_map, tensor, tensor_spaces

SEED = 20240601


def label_tuples(g, b, r, directions=None):
    """All label tuples (incoming unless directions say otherwise) admitting a structure."""
    directions = directions or ["in"] * b
    for lam in itertools.product(range(r), repeat=b):
        p = SpinSurfaceParams(g, r, (0,) * g, (0,) * g, (0,) * b, tuple(zip(directions, lam)))
        if existence_check(g, b, p.R, r):
            yield lam


def random_params(rng, r, g_max=1, b_max=2, mixed=True):
    g = rng.randint(0, g_max)
    b = rng.randint(0, b_max)
    if g + b == 0:
        g = 1
    for _ in range(200):
        dirs = [rng.choice(["in", "out"]) if mixed else "in" for _ in range(b)]
        lam = [rng.randrange(r) for _ in range(b)]
        p = SpinSurfaceParams(
            g, r,
            [rng.randrange(r) for _ in range(g)],
            [rng.randrange(r) for _ in range(g)],
            [rng.randrange(r) for _ in range(b)],
            tuple(zip(dirs, lam)),
        )
        if existence_check(g, b, p.R, r):
            return p
    return random_params(rng, r, g_max, 0, mixed)


def random_surface(rng, r, g_max=1, b_max=2):
    return standard_surface(random_params(rng, r, g_max, b_max))


def inner_edges(d):
    return [e for e in range(len(d.edges)) if d.boundary_of_edge(e) is None]


def apply_move(d, kind, rng):
    """Apply one random move of the given kind; None when it does not apply."""
    if kind == "flip":
        return flip_edge(d, rng.randrange(len(d.edges)))
    if kind == "marking":
        return move_marking(d, rng.randrange(len(d.faces)))
    if kind == "deck":
        return deck_transform(d, rng.randrange(len(d.faces)), rng.randint(-3, 3))
    if kind == "add_bivalent":
        inner = inner_edges(d)
        return add_bivalent_vertex(d, rng.choice(inner)) if inner else None
    if kind == "add_edge":
        f = rng.randrange(len(d.faces))
        if len(d.faces[f]) < 2:
            return None
        i, j = rng.sample(range(len(d.faces[f])), 2)
        return add_edge(d, f, i, j)
    if kind == "add_univalent":
        f = rng.randrange(len(d.faces))
        return add_univalent_vertex(d, f, rng.randrange(len(d.faces[f])))
    raise ValueError(kind)


def removal_pair(d, kind, rng):
    """Add a cell at random, then remove it again: (intermediate, result) or None."""
    if kind == "remove_bivalent":
        inner = inner_edges(d)
        if not inner:
            return None
        a = add_bivalent_vertex(d, rng.choice(inner))
        return a, remove_bivalent_vertex(a, len(a.vertices) - 1)
    if kind == "remove_edge":
        f = rng.randrange(len(d.faces))
        if len(d.faces[f]) < 2:
            return None
        a = add_edge(d, f, *rng.sample(range(len(d.faces[f])), 2))
        return a, remove_edge(a, len(a.edges) - 1)
    if kind == "remove_univalent":
        f = rng.randrange(len(d.faces))
        a = add_univalent_vertex(d, f, rng.randrange(len(d.faces[f])))
        return a, remove_univalent_vertex(a, len(a.vertices) - 1)
    raise ValueError(kind)


MOVES = ["flip", "marking", "deck", "add_bivalent", "add_edge", "add_univalent"]
REMOVALS = ["remove_bivalent", "remove_edge", "remove_univalent"]


def scramble(d, rng, steps=2):
    for _ in range(steps):
        x = apply_move(d, rng.choice(MOVES), rng)
        if x is not None:
            d = x
    return d


def random_V(d, rng):
    """A random choice of edge end for every vertex."""
    tr = build_trace(d)
    V = {}
    for v in tr.V:
        opts = [ex for ex in tr.E if v in (d.edges[ex[0]].start, d.edges[ex[0]].end)]
        V[v] = rng.choice(opts)
    return V


def generator_bordisms(rng, r):
    u = lambda: rng.randrange(r)
    l1, l2 = rng.randrange(r), rng.randrange(r)
    return [
        pants_mult(r, u(), u(), u(), l1, l2),
        pants_comult(r, u(), u(), u(), l1, l2),
        cylinder(r, l1, u(), u()),
        cup(r, u()),
        cap(r, u()),
    ]


def composite(Z, X, Y, eX, eY):
    """The composite of eX then eY after gluing X's first outgoing circle to Y's first incoming one.

    Outputs of the composite are X's remaining outgoing circles followed by Y's.
    Only used when at most one side has spare circles.
    """
    restX = [Z.space(b.label) for b in X.outgoing()[1:]]
    restY = [Z.space(b.label) for b in Y.incoming()[1:]]
    if restX and restY:
        return None
    if restY:
        return compose(eY, tensor(eX, identity(tensor_spaces(*restY))))
    if restX:
        spaces = [Z.space(b.label) for b in X.outgoing()]
        n = len(spaces)
        sw = permutation_map(spaces, list(range(1, n)) + [0])
        return compose(tensor(identity(tensor_spaces(*restX)), eY), compose(sw, eX))
    return compose(eY, eX)


# acceptance results, printed by the terminal-summary hook in conftest.py
ACCEPTANCE = {}


def record(number, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok
