"""
Deciding equivalence at rank two
================================

Two triple graphs can share all four classical invariants of the binary
cubic and linear form and still be inequivalent.  The decider climbs from
cheap fingerprints to witness searches and a mod-m sweep.
"""

from __future__ import annotations

from algplumb.forms import classical_invariants_from_alphas, decide_equivalence, recover_triples
from algplumb.invariants import invariant_system
from algplumb.topology import triple_graph

ci = classical_invariants_from_alphas(4, 15, 30)
print("(D, R2, I, J):", ci.as_tuple())
print("same for (-6,-5,60):", ci == classical_invariants_from_alphas(-6, -5, 60))

# every triple with these invariants, up to order and global sign
print("recovered:", sorted(recover_triples(ci)))

a = invariant_system(triple_graph(4, 15, 30), 1)
b = invariant_system(triple_graph(-6, -5, 60), 1)
print(decide_equivalence(a, b).to_json())

# permuting the alphas gives an equivalent system with an explicit witness
c = invariant_system(triple_graph(30, 4, 15), 1)
v = decide_equivalence(a, c)
print(v.tag, v.witness)

# sigma_1 = 0 orbits can come in threes
group = [(-27, 4, 23), (-28, 7, 21), (-29, 12, 17)]
print("shared invariants:", {classical_invariants_from_alphas(*t).as_tuple() for t in group})
systems = [invariant_system(triple_graph(*t), 1) for t in group]
print([decide_equivalence(systems[0], x).certificate for x in systems[1:]])
