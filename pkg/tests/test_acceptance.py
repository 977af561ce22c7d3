"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import random
from itertools import product
from pathlib import Path

from graphgen import random_forest, random_tree

from algplumb.atlas import EnumerationBounds, enumerate_reduced
from algplumb.forms import (
    classical_invariants_from_alphas,
    decide_equivalence,
    jupp_admissible,
    recover_triples,
    smith_p,
    triple_orbit,
    verify_witness,
)
from algplumb.graph import PlumbingGraph, canonical_reduced_class, parse
from algplumb.invariants import InvariantSystem, biadjacency_matrix, constants, graph_rank, invariant_system
from algplumb.linalg import IntMatrix, kernel_basis, rank
from algplumb.reduction import reduce
from algplumb.topology import (
    betti,
    evaluate_on_u0,
    family_homotopy_cp3,
    family_theorem_b,
    sphere_bundle_exclusion,
    triple_graph,
)

FIX = Path(__file__).parent / "fixtures"


def test_c01_constants(criterion):
    got = [constants(k).lambda_k for k in (1, 2, 3, 4)]
    ok = got == [4, 48, 240, 10080]
    assert criterion(1, ok, f"lambda_1..4 = {got}")


def test_c02_triple_tables(criterion):
    bad = []
    for a in range(-3, 4):
        s = invariant_system(triple_graph(a, -1, -1), 1)
        mu = [s.value(0, 0, 0), s.value(0, 0, 1), s.value(0, 1, 1), s.value(1, 1, 1)]
        if mu != [a + 1, 1, 1, 0] or s.p != (4 * (a + 1), 0):
            bad.append((a, mu, s.p))
    assert criterion(2, not bad, f"(alpha,-1,-1) for alpha in -3..3, mismatches {bad}")


def test_c03_classical_collision(criterion):
    ci1 = classical_invariants_from_alphas(4, 15, 30)
    ci2 = classical_invariants_from_alphas(-6, -5, 60)
    expected = (44100, 210210**2, 132300, -105884100)
    enc1 = canonical_reduced_class(parse((FIX / "triple_4_15_30.apg").read_bytes())).canonical_encoding
    enc2 = canonical_reduced_class(parse((FIX / "triple_m6_m5_60.apg").read_bytes())).canonical_encoding
    ok = ci1.as_tuple() == ci2.as_tuple() == expected and enc1 != enc2
    assert criterion(3, ok, f"(D,R2,I,J) = {ci1.as_tuple()}, encodings differ: {enc1 != enc2}")


def test_c04_triple_recovery(criterion):
    seen = set()
    missing, oversized = [], []
    for t in product(range(-30, 31), repeat=3):
        o = triple_orbit(t)
        if o in seen:
            continue
        seen.add(o)
        ci = classical_invariants_from_alphas(*o)
        got = recover_triples(ci, hint_p=sum(o) if ci.is_zero() else None)
        if o not in got:
            missing.append(o)
        if len(got) > 2:
            oversized.append((o, len(got)))
    ok = not missing and not oversized
    example = min(oversized)[0] if oversized else None
    nonzero = sum(all(o) for o, _ in oversized)
    detail = (
        f"{len(seen)} orbits, input orbit missing for {len(missing)}, result size > 2 for {len(oversized)}"
        f" ({nonzero} with all alphas nonzero)"
        + (f" (e.g. {example} -> {sorted(recover_triples(classical_invariants_from_alphas(*example)))})" if example else "")
    )
    assert criterion(4, ok, detail)


def test_c05_jupp(criterion):
    rng = random.Random(505)
    graphs = 0
    failures = []
    while graphs < 200:
        g = random_forest(rng, max_components=3, max_u=4, max_v=2, alpha_max=20, label_max=1)
        if len(g.u_vertices) > 10 or graph_rank(g) > 4:
            continue
        if not jupp_admissible(invariant_system(g, 1)):
            failures.append(g)
        graphs += 1
    broken = InvariantSystem(1, 1, {(0, 0, 0): 1}, (0,), (5,))
    broken_fails = not jupp_admissible(broken)
    ok = not failures and broken_fails
    assert criterion(5, ok, f"{graphs - len(failures)}/{graphs} graphs admissible, broken system rejected: {broken_fails}")


def test_c06_reduction_soundness(criterion):
    rng = random.Random(606)
    done, bad = 0, []
    while done < 100:
        n_v = rng.randint(0, 3)
        g = random_tree(rng, 1 if n_v == 0 else rng.randint(1, 6), n_v, alpha_max=5, label_max=1)
        if graph_rank(g) > 2:
            continue
        r, _ = reduce(g)
        s, t = invariant_system(g, 1), invariant_system(r, 1)
        v = decide_equivalence(s, t, bound=10)
        if v.tag != "equivalent" or v.witness is None or not verify_witness(s, t, v.witness):
            bad.append(g)
        done += 1
    assert criterion(6, not bad, f"{done - len(bad)}/{done} inputs certified equivalent to their reduction")


def test_c07_incidence_and_biadjacency_lemmas(criterion):
    rng = random.Random(707)
    inc_ok = 0
    for _ in range(200):
        n = rng.randint(2, 8)
        edges = [(rng.randrange(i), i) for i in range(1, n)]
        edges += [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 6))]
        edges = [(a, b) if rng.random() < 0.5 else (b, a) for a, b in edges if a != b]
        q = [[0] * len(edges) for _ in range(n)]
        for j, (a, b) in enumerate(edges):
            q[a][j] -= 1
            q[b][j] += 1
        k = kernel_basis(IntMatrix.from_rows(q).T)
        inc_ok += k.rows == 1 and set(k.row(0)) in ({1}, {-1})
    bia_ok = done = 0
    while done < 200:
        n_v = rng.randint(1, 4)
        g = random_tree(rng, rng.randint(n_v + 1, 9), n_v)
        if any(g.degree(v) < 2 for v in g.v_vertices):
            continue
        bia_ok += rank(biadjacency_matrix(g)) == n_v
        done += 1
    ok = inc_ok == 200 and bia_ok == 200
    assert criterion(7, ok, f"incidence kernel {inc_ok}/200, biadjacency full rank {bia_ok}/200")


def test_c08_betti(criterion):
    rng = random.Random(808)
    bad = []
    for _ in range(500):
        n_v = rng.randint(0, 3)
        g = random_tree(rng, 1 if n_v == 0 else rng.randint(1, 6), n_v, label_max=2)
        for k in (1, 2, 3):
            b = betti(g, k).b
            if b != b[::-1] or b[2 * k] != invariant_system(g, k).n:
                bad.append((g, k))
    fam_bad = [
        (k, s)
        for k in (1, 2, 3)
        for s in (2, 3, 4)
        if betti(family_theorem_b(k, s, 0, list(range(1, s + 1))), k).b[2 * k] != 2 * s - 1
    ]
    ok = not bad and not fam_bad
    assert criterion(8, ok, f"random trees failing {len(bad)}/1500, family b_2k = 2s-1 failing {fam_bad}")


def _item3(g: PlumbingGraph, k: int) -> tuple[bool, bool]:
    s = invariant_system(g, k)
    return any(s.p), "item3" in sphere_bundle_exclusion(s, betti(g, k))["fired"]


def test_c09_sphere_bundle_exclusion(criterion):
    generic = {}
    for s in (2, 3):
        fired = total = 0
        for k in (1, 2):
            for alphas in product(range(-3, 4), repeat=s):
                for signs in product((1, -1), repeat=s):
                    p_nonzero, f = _item3(family_theorem_b(k, s, 0, alphas, signs), k)
                    if p_nonzero:
                        total += 1
                        fired += f
        generic[s] = (fired, total)
    # p-vanishing choices: all subgraphs alike (non-spin), or spin with alpha_i + 4 gamma_i / lambda_k constant
    vanishing_fired = vanishing_total = 0
    for k in (1, 2):
        for s in (2, 3):
            for a in range(-3, 4):
                for e in (1, -1):
                    for g in (
                        family_theorem_b(k, s, s, [a] * s, [e] * s),
                        family_theorem_b(k, s, 0, [a] * s, [e] * s),
                    ):
                        p_nonzero, f = _item3(g, k)
                        assert not p_nonzero
                        vanishing_total += 1
                        vanishing_fired += f
    ok = all(f == t for f, t in generic.values()) and vanishing_fired == 0
    detail = ", ".join(f"s={s}: fired {f}/{t} with p != 0" for s, (f, t) in generic.items())
    detail += f"; p-vanishing choices fired {vanishing_fired}/{vanishing_total}"
    assert criterion(9, ok, detail)


def test_c10_homotopy_cp3(criterion):
    forms_ok = True
    systems = []
    for i in range(6):
        g, exp = family_homotopy_cp3(i)
        got = evaluate_on_u0(g, 1, exp["basis"])
        forms_ok &= got["mu"] == {(0, 0, 0): 1, (0, 0, 1): 0, (0, 1, 1): 0, (1, 1, 1): i * (i + 1) * (2 * i + 1) // 2}
        forms_ok &= got["p"] == [4 + 12 * i * (i + 1), 6 * i * (i + 1) * (2 * i + 1)] == exp["p"]
        systems.append(invariant_system(g, 1))
    # Smith factor of p on the split rank-one summand <e1> with mu(e1^3) = 1
    summand = [tuple(smith_p(InvariantSystem(1, 1, {(0, 0, 0): 1}, (0,), (4 + 12 * i * (i + 1),)))) for i in range(6)]
    distinct = len(set(summand)) == 6
    verdicts = {
        decide_equivalence(systems[a], systems[b]).tag for a in range(6) for b in range(a + 1, 6)
    }
    ok = forms_ok and distinct and verdicts == {"inequivalent"}
    detail = (
        f"closed forms match: {forms_ok}, summand Smith factors {[s[0] for s in summand]}, "
        f"whole-lattice Smith factors {sorted({tuple(smith_p(s)) for s in systems})}, pairwise verdicts {sorted(verdicts)}"
    )
    assert criterion(10, ok, detail)


def test_c11_enumeration_ground_truth(criterion):
    A = 10
    r1 = [e for e in enumerate_reduced(EnumerationBounds(1, A, label_sum_max=2)) if e.rank <= 1]
    r0 = [e for e in r1 if e.rank == 0]
    spin1 = [e for e in r1 if e.rank == 1 and e.graph.is_spin()]
    nonspin1 = [e for e in r1 if e.rank == 1 and not e.graph.is_spin()]
    exceptional = canonical_reduced_class(parse("v d\nu z kplus=1\ne z d"))
    ok1 = (
        [e.graph for e in r0] == [PlumbingGraph()]
        and all(len(e.graph.u_vertices) == 1 and not e.graph.v_vertices for e in spin1)
        and sorted(abs(e.graph.u_vertices[0].alpha) for e in spin1) == list(range(A + 1))
        and [e.reduced_class for e in nonspin1] == [exceptional]
    )
    r2 = [e for e in enumerate_reduced(EnumerationBounds(2, A, spin_only=True)) if e.rank == 2]
    pairs, triples, other = [], [], []
    for e in r2:
        g = e.graph
        if len(g.u_vertices) == 2 and not g.v_vertices:
            pairs.append(e)
        elif len(g.u_vertices) == 3 and len(g.v_vertices) == 1 and len(g.edges) == 3 and all(u.alpha for u in g.u_vertices):
            triples.append(e)
        else:
            other.append(e)
    nz = [x for x in range(-A, A + 1) if x]
    want_triples = {triple_orbit(t) for t in product(nz, repeat=3)}
    got_triples = {triple_orbit([u.alpha for u in e.graph.u_vertices]) for e in triples}
    ok2 = not other and len(pairs) == (A + 1) * (A + 2) // 2 and got_triples == want_triples and len(triples) == len(want_triples)
    detail = (
        f"rank <= 1: {len(r0)} empty, {len(spin1)} single vertices, {len(nonspin1)} exceptional; "
        f"rank 2 spin: {len(pairs)} pairs, {len(triples)} triples, {len(other)} other"
    )
    assert criterion(11, ok1 and ok2, detail)
