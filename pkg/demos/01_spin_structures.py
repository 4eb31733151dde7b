"""Marked decompositions, admissibility and counting r-spin structures.

Run: python demos/01_spin_structures.py
"""

from rspin.plcw import (
    SpinSurfaceParams,
    brute_force_classes,
    count_structures,
    deck_transform,
    is_admissible,
    sphere,
    standard_surface,
    vertex_data,
)

# The sphere as two 1-gons glued along one loop edge. Whatever index the edge
# carries, the single vertex condition only holds for r = 1 or r = 2.
for r in range(1, 6):
    ok = any(is_admissible(sphere(r, s)) for s in range(r))
    print(f"sphere, r={r}: {'admissible' if ok else 'no admissible marking'}")

# A torus with one hole, r = 4. Parameters: s and t per handle, one u and
# one incoming label lambda per boundary circle.
p = SpinSurfaceParams.incoming(1, 4, s=(1,), t=(3,), u=(2,), lambdas=(0,))
d = standard_surface(p)
print("\none-holed torus, edge indices:", d.indices())
for v in d.vertices:
    vd = vertex_data(d, v)
    print(f"  vertex {v}: D={vd.D} N={vd.N_start + vd.N_end} sum s_hat={vd.sum_s_hat}")
print("  admissible:", is_admissible(d))

# Shifting indices around the face gives the same structure up to isomorphism.
print("  after a deck shift:", deck_transform(d, 0, 1).indices())

# Brute force over all index maps modulo deck shifts reproduces r^(2g+b-1).
print("\nclasses on the one-holed torus:", len(brute_force_classes(d)), "expected", count_structures(1, 1, 4, p.R))
