"""
Enumerating reduced graphs
==========================

The atlas lists reduced graphs within bounds, one per reduced class, and
groups classes whose invariant fingerprints agree.
"""

from __future__ import annotations

from collections import Counter

from algplumb.atlas import EnumerationBounds, collision_report, enumerate_reduced, to_jsonl

b = EnumerationBounds(rank_max=2, alpha_max=4, label_sum_max=1)
entries = enumerate_reduced(b)
print(Counter(e.rank for e in entries))
print(to_jsonl(entries[:3]), end="")

# same output with worker processes
assert to_jsonl(enumerate_reduced(b, parallel=2)) == to_jsonl(entries)

# fingerprint collisions among spin triples, each pair decided
for grp in collision_report(EnumerationBounds(2, 12, spin_only=True)):
    print(grp["members"], [v["verdict"] for v in grp["verdicts"]])
