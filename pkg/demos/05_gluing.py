"""Gluing bordisms and checking that the state sum composes.

Run: python demos/05_gluing.py
"""

from rspin.frobenius import graded_center, registry_algebra
from rspin.plcw import glue, is_admissible
from rspin.statesum import cap, cylinder, evaluate, pants_comult, pants_mult
from rspin.superlinalg import compose

r = 4
A = registry_algebra("cl2")
Z = graded_center(A, r)

# Comultiply Z_2 into Z_1 x Z_3, then multiply back.
X = pants_comult(r, 0, 1, 2, 1, 3)
Y = pants_mult(r, 3, 0, 1, 1, 3)
G = glue(X, Y, [(0, 0), (1, 1)])
print("glued surface admissible:", is_admissible(G), " faces:", len(G.faces), " boundary circles:", len(G.boundary))
glued = evaluate(A, G, Z=Z)
composite = compose(evaluate(A, Y, Z=Z), evaluate(A, X, Z=Z))
print("Z(glued) == Z(Y) o Z(X):", glued == composite)
print(glued.matrix.tolist())

# Capping off a cylinder.
C = cylinder(r, 2, 1, 3)
print("\ncap o cylinder:", evaluate(A, glue(C, cap(r), [(0, 0)]), Z=Z) == compose(evaluate(A, cap(r), Z=Z), evaluate(A, C, Z=Z)))
