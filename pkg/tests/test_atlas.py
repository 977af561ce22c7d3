from __future__ import annotations

import json
import random
from collections import Counter

import pytest
from graphgen import random_forest

from algplumb.atlas import (
    AtlasEntry,
    BoundsTooLarge,
    EnumerationBounds,
    collision_report,
    enumerate_reduced,
    skeletons,
    to_jsonl,
)
from algplumb.forms import triple_orbit
from algplumb.graph import canonical_reduced_class, parse, serialize
from algplumb.invariants import graph_rank
from algplumb.reduction import is_reduced, reduce


def by_rank(entries, r):
    return [e for e in entries if e.rank == r]


def shape(e: AtlasEntry) -> tuple:
    """(component count, U count, V count, spin) summary of an entry."""
    g = e.graph
    return len(g.components()), len(g.u_vertices), len(g.v_vertices), g.is_spin()


# -- ground truth at small rank ---------------------------------------------------


def test_rank_zero_is_empty_graph():
    (e,) = enumerate_reduced(EnumerationBounds(0, 5, label_sum_max=3))
    assert e.rank == 0 and not e.graph.u_vertices and not e.graph.v_vertices


def test_rank_one_spin():
    entries = by_rank(enumerate_reduced(EnumerationBounds(1, 2, spin_only=True)), 1)
    assert sorted(abs(e.graph.u_vertices[0].alpha) for e in entries) == [0, 1, 2]
    assert all(shape(e) == (1, 1, 0, True) for e in entries)


def test_rank_one_with_non_spin_adds_exceptional():
    spin = {e.reduced_class for e in enumerate_reduced(EnumerationBounds(1, 4, spin_only=True))}
    full = enumerate_reduced(EnumerationBounds(1, 4, label_sum_max=2))
    extra = [e for e in full if e.reduced_class not in spin]
    assert len(extra) == 1
    g = extra[0].graph
    assert shape(extra[0]) == (1, 1, 1, False)
    u = g.u_vertices[0]
    assert u.alpha == 0 and u.kplus + u.kminus == 1


def test_rank_two_spin_shapes():
    entries = by_rank(enumerate_reduced(EnumerationBounds(2, 6, spin_only=True)), 2)
    pairs = [e for e in entries if shape(e) == (2, 2, 0, True)]
    triples = [e for e in entries if shape(e) == (1, 3, 1, True)]
    assert len(pairs) + len(triples) == len(entries)
    pair_expect = {tuple(sorted((a, b))) for a in range(7) for b in range(7)}
    assert len(pairs) == len(pair_expect)
    got = {triple_orbit([u.alpha for u in e.graph.u_vertices]) for e in triples}
    nz = [x for x in range(-6, 7) if x]
    assert got == {triple_orbit(t) for t in ((a, b, c) for a in nz for b in nz for c in nz)}
    assert len(triples) == len(got)


def test_rank_two_non_spin_shapes():
    full = by_rank(enumerate_reduced(EnumerationBounds(2, 3, label_sum_max=2)), 2)
    non_spin = [e for e in full if not e.graph.is_spin()]
    kinds = Counter()
    for e in non_spin:
        g = e.graph
        if len(g.components()) == 1:
            (u,) = g.u_vertices
            assert not g.v_vertices and u.kplus + u.kminus == 1
            kinds["vertex"] += 1
        else:
            assert len(g.components()) == 2 and len(g.v_vertices) == 1
            kinds["exceptional+alpha"] += 1
    # alpha^(1,0) for alpha in [-3, 3] (negation moves the label to kminus), exceptional + alpha for 0 <= alpha <= 3
    assert kinds == {"vertex": 7, "exceptional+alpha": 4}


def test_all_entries_reduced_and_sorted():
    entries = enumerate_reduced(EnumerationBounds(3, 2, label_sum_max=2))
    assert all(is_reduced(e.graph) for e in entries)
    encs = [e.canonical_encoding for e in entries]
    assert encs == sorted(encs) and len(set(encs)) == len(encs)
    for e in entries:
        assert canonical_reduced_class(e.graph) == e.reduced_class
        assert graph_rank(e.graph) == e.rank <= 3


def test_skeleton_constraint():
    for nu in range(1, 8):
        for nv in range(0, 4):
            for sk in skeletons(nu, nv):
                assert 2 * nv + 1 <= nu or nv == 0


def test_random_graphs_reduce_into_the_atlas():
    b = EnumerationBounds(3, 4, label_sum_max=2)
    classes = {e.reduced_class for e in enumerate_reduced(b)}
    rng = random.Random(77)
    hits = 0
    for _ in range(400):
        g = random_forest(rng, max_components=2, max_u=4, max_v=2, alpha_max=3, label_max=1)
        r, _ = reduce(g)
        if graph_rank(r) > 3 or any(abs(u.alpha) > 4 for u in r.u_vertices):
            continue
        if sum(u.kplus + u.kminus for u in r.u_vertices) > 2:
            continue
        assert canonical_reduced_class(r) in classes, serialize(r)
        hits += 1
    assert hits > 100


def test_bounds_validation_and_cap():
    with pytest.raises(ValueError):
        EnumerationBounds(-1, 2)
    with pytest.raises(ValueError):
        EnumerationBounds(1, 2, k=0)
    with pytest.raises(BoundsTooLarge):
        enumerate_reduced(EnumerationBounds(4, 30, max_candidates=1000))


# -- output and determinism ------------------------------------------------------


def test_jsonl_records():
    entries = enumerate_reduced(EnumerationBounds(1, 1, label_sum_max=1))
    lines = to_jsonl(entries).splitlines()
    assert len(lines) == len(entries)
    for line, e in zip(lines, entries):
        rec = json.loads(line)
        assert set(rec) == {"encoding", "rank", "fingerprint", "graph"}
        assert parse(rec["graph"]) == e.graph
        assert rec["encoding"] == e.canonical_encoding.decode()


def test_deterministic_and_parallel_equal():
    b = EnumerationBounds(2, 5, label_sum_max=1)
    a = to_jsonl(enumerate_reduced(b))
    assert to_jsonl(enumerate_reduced(b)) == a
    assert to_jsonl(enumerate_reduced(b, parallel=2), parallel=2) == a


# -- collisions ---------------------------------------------------------------------


def test_no_collisions_at_rank_one():
    assert collision_report(EnumerationBounds(1, 25, label_sum_max=2)) == []


def test_no_collisions_small_triples():
    assert collision_report(EnumerationBounds(2, 3, spin_only=True)) == []


def test_groups_at_most_two_up_to_30():
    report = collision_report(EnumerationBounds(2, 30, spin_only=True), decide=False)
    assert report
    assert max(len(g["members"]) for g in report) == 2


def test_collision_pair_reported_at_60():
    report = collision_report(EnumerationBounds(2, 60, spin_only=True))
    target = {triple_orbit((4, 15, 30)), triple_orbit((-6, -5, 60))}
    found = [
        g for g in report
        if {triple_orbit([u.alpha for u in parse(t).u_vertices]) for t in g["graphs"]} == target
    ]
    assert len(found) == 1
    (v,) = found[0]["verdicts"]
    assert v["verdict"] == "inequivalent" and v["certificate"] == {"differing": "mod_m", "modulus": 49}
    assert all(v["verdict"] != "equivalent" for g in report for v in g["verdicts"])
