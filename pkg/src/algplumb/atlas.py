"""Bounded enumeration of reduced graphs and invariant-collision reports.

Reduced graphs are built component by component.  A component other than
``dot - 0^(1)`` satisfies ``2|V| + 1 <= |U|`` and has rank
``|U| - |V| + sum(kplus + kminus) >= 1 + |V| + sum(kplus + kminus)``, so a
rank budget bounds both the tree skeleton and the labels.  Skeletons are
bipartite trees whose dots all have degree at least 3; labels are assigned
with interchangeable leaves taken as multisets, and the remaining symmetry is
removed by the canonical encoding.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from math import comb
from typing import Iterable, Sequence

from .forms import decide_equivalence, fingerprint
from .graph import (
    PlumbingGraph,
    ReducedClass,
    UVertex,
    disjoint_union,
    serialize,
    tree_encoding,
)
from .invariants import invariant_system

__all__ = [
    "EnumerationBounds",
    "AtlasEntry",
    "BoundsTooLarge",
    "skeletons",
    "enumerate_components",
    "enumerate_reduced",
    "entry_record",
    "to_jsonl",
    "collision_report",
]


class BoundsTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class EnumerationBounds:
    rank_max: int
    alpha_max: int
    label_sum_max: int = 0
    k: int = 1
    spin_only: bool = False
    max_candidates: int = 2_000_000

    def __post_init__(self) -> None:
        if min(self.rank_max, self.alpha_max, self.label_sum_max) < 0:
            raise ValueError("bounds must be non-negative")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    @property
    def labels_max(self) -> int:
        return 0 if self.spin_only else self.label_sum_max

    def as_dict(self) -> dict:
        return {
            "rank_max": self.rank_max,
            "alpha_max": self.alpha_max,
            "label_sum_max": self.label_sum_max,
            "k": self.k,
            "spin_only": self.spin_only,
        }


@dataclass(frozen=True)
class AtlasEntry:
    reduced_class: ReducedClass
    graph: PlumbingGraph = field(compare=False)
    rank: int = field(compare=False)

    @property
    def canonical_encoding(self) -> bytes:
        return self.reduced_class.canonical_encoding


# -- skeletons ----------------------------------------------------------------

# A skeleton is (n_u, n_v, edges) with U nodes 0..n_u-1, V nodes 0..n_v-1.
Skeleton = tuple[int, int, tuple[tuple[int, int], ...]]


def _adj(sk: Skeleton) -> dict[tuple[str, int], list[tuple[str, int]]]:
    nu, nv, edges = sk
    adj = {("u", i): [] for i in range(nu)} | {("v", j): [] for j in range(nv)}
    for i, j in edges:
        adj[("u", i)].append(("v", j))
        adj[("v", j)].append(("u", i))
    return adj


def _shape_key(sk: Skeleton) -> str:
    adj = _adj(sk)

    def enc(x, par):
        return "(" + x[0] + "".join(sorted(enc(y, x) for y in adj[x] if y != par)) + ")"

    return min(enc(x, None) for x in adj)


def _grow(n_u: int, n_v: int) -> list[Skeleton]:
    """All bipartite trees with the given part sizes, up to isomorphism."""
    if n_v == 0:
        return [(1, 0, ())] if n_u == 1 else []
    if n_u < 1 or n_v < 0:
        return []
    cur: list[Skeleton] = [(1, 1, ((0, 0),))]
    while True:
        done = [sk for sk in cur if sk[0] == n_u and sk[1] == n_v]
        if done or not cur:
            return done
        nxt: dict[str, Skeleton] = {}
        for nu, nv, edges in cur:
            if nu < n_u:
                for j in range(nv):
                    sk = (nu + 1, nv, edges + ((nu, j),))
                    nxt.setdefault(_shape_key(sk), sk)
            if nv < n_v:
                for i in range(nu):
                    sk = (nu, nv + 1, edges + ((i, nv),))
                    nxt.setdefault(_shape_key(sk), sk)
        cur = [nxt[key] for key in sorted(nxt)]


def skeletons(n_u: int, n_v: int) -> list[Skeleton]:
    """Reduced skeletons: bipartite trees in which every dot has degree >= 3."""
    out = []
    for sk in _grow(n_u, n_v):
        degs = [0] * sk[1]
        for _, j in sk[2]:
            degs[j] += 1
        if all(d >= 3 for d in degs):
            out.append(sk)
    return out


# -- components ---------------------------------------------------------------


def _component_graph(sk: Skeleton, labels: Sequence[tuple[int, int, int]], tag: str) -> PlumbingGraph:
    nu, nv, edges = sk
    us = tuple(UVertex(f"{tag}u{i}", *labels[i]) for i in range(nu))
    vs = tuple(f"{tag}v{j}" for j in range(nv))
    return PlumbingGraph(us, vs, tuple((f"{tag}u{i}", f"{tag}v{j}") for i, j in edges))


def _twin_groups(sk: Skeleton) -> list[list[int]]:
    """Groups of U nodes that are interchangeable: isolated, or leaves on one dot."""
    nu, nv, edges = sk
    adj = _adj(sk)
    groups: dict[object, list[int]] = {}
    for i in range(nu):
        nb = adj[("u", i)]
        key = ("leaf", nb[0][1]) if len(nb) == 1 else ("solo", i)
        groups.setdefault(key, []).append(i)
    return [groups[k] for k in sorted(groups, key=lambda k: groups[k][0])]


def _labelings(sk: Skeleton, alpha_max: int, m: int) -> Iterable[list[tuple[int, int, int]]]:
    nu = sk[0]
    adj = _adj(sk)
    pairs = [(a, b) for s in range(m + 1) for a in range(s + 1) for b in [s - a]]
    labels = [(al, kp, km) for kp, km in pairs for al in range(-alpha_max, alpha_max + 1)]
    groups = _twin_groups(sk)
    choices = [list(combinations_with_replacement(labels, len(gr))) for gr in groups]
    for pick in product(*choices):
        out: list[tuple[int, int, int] | None] = [None] * nu
        for gr, labs in zip(groups, pick):
            for i, lab in zip(gr, labs):
                out[i] = lab
        if sum(l[1] + l[2] for l in out) != m:
            continue
        if any(l == (0, 0, 0) and len(adj[("u", i)]) in (1, 2) for i, l in enumerate(out)):
            continue
        yield out


def _candidate_count(sk: Skeleton, alpha_max: int, m: int) -> int:
    n_labels = (2 * alpha_max + 1) * (m + 1) * (m + 2) // 2
    total = 1
    for gr in _twin_groups(sk):
        total *= comb(n_labels + len(gr) - 1, len(gr))
    return total


def _centers(sk: Skeleton) -> list[tuple[str, int]]:
    adj = _adj(sk)
    deg = {x: len(n) for x, n in adj.items()}
    layer = [x for x, d in deg.items() if d <= 1]
    remaining = len(adj)
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for x in layer:
            for y in adj[x]:
                deg[y] -= 1
                if deg[y] == 1:
                    nxt.append(y)
        layer = nxt
    return sorted(layer)


def _encoder(sk: Skeleton):
    """Fast equivalent of ``tree_encoding`` for labelings of one skeleton."""
    adj = _adj(sk)
    centers = _centers(sk)

    def encode(labels: Sequence[tuple[int, int, int]], sign: int) -> str:
        def enc(x, par):
            if x[0] == "v":
                head = "v"
            else:
                a, kp, km = labels[x[1]]
                head = f"u{a},{kp},{km}" if sign > 0 else f"u{-a},{km},{kp}"
            return "(" + head + "".join(sorted(enc(y, x) for y in adj[x] if y != par)) + ")"

        return min(enc(c, None) for c in centers)

    return encode


def _component_task(args) -> list[tuple[str, PlumbingGraph]]:
    sk, alpha_max, m = args
    encode = _encoder(sk)
    found: dict[str, PlumbingGraph] = {}
    for labels in _labelings(sk, alpha_max, m):
        plus = encode(labels, 1)
        minus = encode(labels, -1)
        key = min(plus, minus)
        if key not in found:
            g = _component_graph(sk, labels, "c")
            found[key] = g if plus <= minus else g.negated_vertices(u.id for u in g.u_vertices)
    return sorted(found.items())


@dataclass(frozen=True)
class _Component:
    encoding: str
    graph: PlumbingGraph
    rank: int
    labels: int
    exceptional: bool


_EXCEPTIONAL = PlumbingGraph((UVertex("cu0", 0, 1, 0),), ("cv0",), (("cu0", "cv0"),))


def _component_tasks(b: EnumerationBounds):
    tasks = []
    for r in range(1, b.rank_max + 1):
        for m in range(0, min(b.labels_max, r - 1) + 1):
            for nv in range(0, r - m):
                nu = r + nv - m
                if nv and 2 * nv + 1 > nu:
                    continue
                for sk in skeletons(nu, nv):
                    tasks.append(((sk, b.alpha_max, m), r, m))
    return tasks


def enumerate_components(b: EnumerationBounds, parallel: int = 0) -> list[_Component]:
    """Connected reduced components within bounds, one per class, sorted by rank then encoding."""
    tasks = _component_tasks(b)
    total = sum(_candidate_count(*t[0]) for t in tasks)
    if total > b.max_candidates:
        raise BoundsTooLarge(f"{total} labelings exceed the safety cap of {b.max_candidates}")
    if parallel and parallel > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as ex:
            results = list(ex.map(_component_task, [t[0] for t in tasks]))
    else:
        results = [_component_task(t[0]) for t in tasks]
    comps = []
    for (_, r, m), res in zip(tasks, results):
        comps += [_Component(enc, g, r, m, False) for enc, g in res]
    if b.rank_max >= 1 and b.labels_max >= 1:
        enc = min(tree_encoding(_EXCEPTIONAL, ["cu0"], ["cv0"], s) for s in (1, -1))
        comps.append(_Component(enc, _EXCEPTIONAL, 1, 1, True))
    comps.sort(key=lambda c: (c.rank, c.encoding))
    return comps


def _relabel(g: PlumbingGraph, tag: str) -> PlumbingGraph:
    mapping = {u.id: tag + u.id[1:] for u in g.u_vertices} | {v: tag + v[1:] for v in g.v_vertices}
    return g.relabeled(mapping)


def enumerate_reduced(b: EnumerationBounds, parallel: int = 0) -> list[AtlasEntry]:
    """All reduced classes of rank <= rank_max within bounds, sorted by encoding.

    The empty graph (rank 0) is always included.
    """
    comps = enumerate_components(b, parallel)
    out: list[AtlasEntry] = []

    def walk(start: int, chosen: list[int], rank: int, labels: int, exc: bool, non_spin: int) -> None:
        graphs = [_relabel(comps[i].graph, f"{chr(97 + n // 26)}{chr(97 + n % 26)}") for n, i in enumerate(chosen)]
        if not exc or non_spin == 1:
            g = disjoint_union(graphs) if graphs else PlumbingGraph()
            parts = tuple(sorted(comps[i].encoding for i in chosen))
            out.append(AtlasEntry(ReducedClass("|".join(parts).encode(), parts), g, rank))
        for i in range(start, len(comps)):
            c = comps[i]
            if rank + c.rank > b.rank_max:
                break
            if labels + c.labels > b.labels_max:
                continue
            if c.exceptional and exc:
                continue
            walk(i, chosen + [i], rank + c.rank, labels + c.labels, exc or c.exceptional, non_spin + (c.labels > 0))

    walk(0, [], 0, 0, False, 0)
    out.sort(key=lambda e: e.canonical_encoding)
    return out


# -- output -------------------------------------------------------------------


def entry_record(e: AtlasEntry, k: int = 1) -> dict:
    s = invariant_system(e.graph, k)
    return {
        "encoding": e.canonical_encoding.decode(),
        "rank": e.rank,
        "fingerprint": fingerprint(s),
        "graph": serialize(e.graph),
    }


def _records_chunk(args) -> list[dict]:
    entries, k = args
    return [entry_record(e, k) for e in entries]


def _records(entries: Sequence[AtlasEntry], k: int, parallel: int) -> list[dict]:
    if parallel and parallel > 1 and len(entries) > 1:
        size = max(1, len(entries) // (4 * parallel))
        chunks = [(list(entries[i : i + size]), k) for i in range(0, len(entries), size)]
        with ProcessPoolExecutor(max_workers=parallel) as ex:
            return [r for part in ex.map(_records_chunk, chunks) for r in part]
    return [entry_record(e, k) for e in entries]


def to_jsonl(entries: Sequence[AtlasEntry], k: int = 1, parallel: int = 0) -> str:
    """One JSON object per reduced class: encoding, rank, fingerprint, graph text."""
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in _records(entries, k, parallel))


def collision_report(
    b: EnumerationBounds,
    parallel: int = 0,
    decide: bool = True,
    bound: int = 10,
    entries: Sequence[AtlasEntry] | None = None,
) -> list[dict]:
    """Groups of distinct reduced classes with equal fingerprints.

    Each group lists its member encodings and, when ``decide`` is set, the
    pairwise equivalence verdicts.  Groups are reported, never merged.
    """
    entries = list(entries) if entries is not None else enumerate_reduced(b, parallel)
    records = _records(entries, b.k, parallel)
    groups: dict[str, list[int]] = {}
    for i, r in enumerate(records):
        groups.setdefault(json.dumps(r["fingerprint"], sort_keys=True), []).append(i)
    report = []
    for key, idx in groups.items():
        if len(idx) < 2:
            continue
        item = {
            "fingerprint": json.loads(key),
            "members": [records[i]["encoding"] for i in idx],
            "graphs": [records[i]["graph"] for i in idx],
        }
        if decide:
            verdicts = []
            for a in range(len(idx)):
                for c in range(a + 1, len(idx)):
                    s1 = invariant_system(entries[idx[a]].graph, b.k)
                    s2 = invariant_system(entries[idx[c]].graph, b.k)
                    v = decide_equivalence(s1, s2, bound=bound)
                    verdicts.append({"pair": [a, c], **v.as_dict()})
            item["verdicts"] = verdicts
        report.append(item)
    report.sort(key=lambda it: it["members"][0])
    return report
