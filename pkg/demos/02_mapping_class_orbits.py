"""Dehn twists and orbits of r-spin structures under the mapping class group.

Run: python demos/02_mapping_class_orbits.py
"""

from rspin.orbits import (
    dehn_twist,
    o0_order_snf,
    orbit_count_formula,
    orbit_enumerate,
    sl2z_normal_form,
    twist_generators,
)
from rspin.plcw import SpinSurfaceParams

# Twists act on the parameters (s, t, u) by explicit substitutions.
p = SpinSurfaceParams.incoming(1, 6, s=(4,), t=(2,), u=(0, 0), lambdas=(1, 5))
for tw in twist_generators(1, 2):
    q = dehn_twist(p, tw)
    print(f"{str(tw):>12}: s={q.s} t={q.t} u={q.u}")

# On the closed torus the orbits are the SL(2,Z) orbits on Z_r^2, labelled by
# the divisors of r.
print("\ntorus, r=6, normal forms:", sorted({sl2z_normal_form(6, s, t) for s in range(6) for t in range(6)}))

# Breadth-first search over all classes against the closed forms.
print("\n r  g  b  lambda   search  formula")
for r, g, lam in [(4, 0, (3, 3)), (6, 0, (2, 4, 2)), (6, 1, ()), (2, 1, (1, 1)), (2, 2, ()), (3, 2, (1,))]:
    R = [l - 1 for l in lam]
    rep = orbit_enumerate(g, len(lam), r, R)
    print(f"{r:2d} {g:2d} {len(lam):2d}  {str(lam):8s} {rep.brute_force_count:6d}  {orbit_count_formula(g, len(lam), r, R)}")

# For genus 0 the count is also the order of a finite abelian group, read off
# a Smith normal form.
print("\ngenus 0, r=12, R=(3, 5, 3):", o0_order_snf(12, [3, 5, 3]), "=", orbit_count_formula(0, 3, 12, R=[3, 5, 3]))
print("genus 0, r=0, R=(0, 0):", orbit_count_formula(0, 2, 0, R=[0, 0]))
