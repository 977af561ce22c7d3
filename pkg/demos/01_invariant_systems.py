"""
Invariant systems of plumbing graphs
====================================

A graph file lists labeled vertices (``u``), dots (``v``) and edges (``e``).
The invariant system is a lattice with a trilinear form mu, a mod-2 class w
and a linear form p, all in a fixed basis.
"""

from __future__ import annotations

from algplumb.graph import parse
from algplumb.invariants import constants, graph_rank, invariant_system

# the bundle constant scales mu and p with k
print("lambda_k:", [constants(k).lambda_k for k in (1, 2, 3, 4)])

# a single vertex: mu(u^3) = alpha and p(u) = 4 alpha at k = 1
single = parse("u a alpha=3")
print(invariant_system(single, 1).to_json())

# three vertices on a dot: the dot kills one direction
triple = parse("u u1 alpha=2\nu u2 alpha=-1\nu u3 alpha=-1\nv v\ne u1 v\ne u2 v\ne u3 v")
s = invariant_system(triple, 1)
print("rank", graph_rank(triple), "mu", dict(s.mu), "p", s.p)

# non-spin labels kplus/kminus add classes and make w nonzero
labeled = parse("u a alpha=1 kplus=2 kminus=1")
t = invariant_system(labeled, 2)
print("rank", t.n, "w", t.w, "p", t.p)
