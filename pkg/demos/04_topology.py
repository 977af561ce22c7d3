"""
Betti numbers and obstructions
==============================

The boundary manifold's Betti numbers come from the graph, and the invariant
system feeds the sphere-bundle and direct-summand obstructions.
"""

from __future__ import annotations

from algplumb.forms import jupp_check
from algplumb.invariants import InvariantSystem, invariant_system
from algplumb.topology import (
    betti,
    direct_summand_obstruction,
    family_homotopy_cp3,
    family_theorem_b,
    sphere_bundle_exclusion,
)

# three spin triples on a central dot, k = 1
g = family_theorem_b(1, 3, 0, [1, 2, 3])
s = invariant_system(g, 1)
bv = betti(g, 1)
print("betti:", bv.b)
print("fired:", sphere_bundle_exclusion(s, bv)["fired"])

# with two triples mu vanishes on ker p, so nothing fires
g2 = family_theorem_b(1, 2, 0, [1, 2])
print("s=2 fired:", sphere_bundle_exclusion(invariant_system(g2, 1), betti(g2, 1))["fired"])

# homotopy CP^3 family: the closed-form basis splits off <e1> with mu(e1^3) = 1
for i in range(4):
    h, exp = family_homotopy_cp3(i)
    print(i, exp["alphas"], "p on closed-form basis:", exp["p"])

# a vector with nonzero slice never spans a direct summand of the s=3 system
print("direct summand check:", direct_summand_obstruction(s, [[1] + [0] * (s.n - 1)]))

# admissibility in dimension 6: graph systems pass, a broken system fails
print(jupp_check(s).as_dict())
print(jupp_check(InvariantSystem(1, 1, {(0, 0, 0): 1}, (0,), (5,))).as_dict())
