"""Evaluating the state sum of an r-spin surface with a Frobenius algebra.

Run: python demos/03_state_sum.py
"""

from rspin.frobenius import check_axioms, graded_center, nakayama_order, registry_algebra
from rspin.plcw import SpinSurfaceParams, add_edge, flip_edge, standard_surface
from rspin.statesum import evaluate, evaluate_connected_closed_form, pants_mult

# A non-symmetric algebra: 2x2 Clifford algebra with a twisted trace. Its
# Nakayama automorphism has order 4, so it can be used for r = 4.
A = registry_algebra("cl2")
print("axioms:", check_axioms(A).ok, " Nakayama order:", nakayama_order(A))
Z = graded_center(A, 4)
print("graded centre dimensions:", [Z.space(l).dim for l in range(4)])

# A genus-2 surface with one boundary circle and r = 4: the label must satisfy
# lambda - 1 = 2 - 2g - b mod r, so lambda = 2. Compare with the closed formula.
p = SpinSurfaceParams.incoming(2, 4, s=(1, 2), t=(3, 0), u=(1,), lambdas=(2,))
d = standard_surface(p)
print("\nZ(surface) =", evaluate(A, d, Z=Z).matrix.tolist())
print("closed form =", evaluate_connected_closed_form(A, p, Z=Z).matrix.tolist())

# The value does not depend on the decomposition.
e = flip_edge(add_edge(d, 0, 0, 5), 2)
print("after moves  =", evaluate(A, e, Z=Z).matrix.tolist())

# A pair of pants: two inputs, one output.
M = evaluate(A, pants_mult(4, 0, 1, 0, 2, 2), Z=Z)
print("\npants Z_2 x Z_2 -> Z_0:", M.matrix.tolist())
