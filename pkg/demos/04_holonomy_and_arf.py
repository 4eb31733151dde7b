"""Holonomy of curves, the Arf invariant and the Clifford state sum.

Run: python demos/04_holonomy_and_arf.py
"""

from rspin.holonomy import arf, clifford_value, holonomy, standard_curves, vertex_loop
from rspin.plcw import SpinSurfaceParams, standard_surface

p = SpinSurfaceParams.incoming(1, 4, s=(1,), t=(2,), u=(3, 0), lambdas=(1, 3))
d = standard_surface(p)

# Holonomies of the standard curves: a -> s, b -> t, c -> u_1 - u_2 + 1, and
# the loop parallel to boundary j -> 1 - lambda_j.
for name, curve in standard_curves(p.g, p.b).items():
    print(f"{name:10s} {holonomy(d, curve)}")

# A small loop around the inner vertex has holonomy 1 counterclockwise.
print("vertex loop:", holonomy(d, vertex_loop(d, 0)), "reversed:", holonomy(d, vertex_loop(d, 0, counterclockwise=False)))

# For even r the Clifford state sum on theta^lambda inputs is 2^(1-g) (-1)^Arf.
print("\nArf =", arf(p), " Z_Cl =", clifford_value(p))
for s in range(2):
    for t in range(2):
        q = SpinSurfaceParams(1, 2, (s,), (t,))
        print(f"torus s={s} t={t}: Arf={arf(q)} Z_Cl={clifford_value(q)}")
