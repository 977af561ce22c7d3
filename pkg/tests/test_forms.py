from __future__ import annotations

import json
import random
from itertools import product

import pytest
from graphgen import random_forest, shuffled_ids
from hypothesis import given, settings
from hypothesis import strategies as st

from algplumb.forms import (
    DEFAULT_MODULI,
    BinaryFormPair,
    ClassicalInvariants,
    classical_invariants_from_alphas,
    classical_invariants_from_sigmas,
    classical_invariants_general,
    decide_equivalence,
    fingerprint,
    jupp_admissible,
    jupp_check,
    mod_m_equivalence,
    rank2_exact_witness,
    recover_triples,
    triple_orbit,
    unimodular_witness_search,
    verify_witness,
)
from algplumb.graph import parse
from algplumb.invariants import InvariantSystem, invariant_system
from algplumb.linalg import IntMatrix, determinant
from algplumb.topology import triple_graph

COLLISION = (44100, 210210**2, 132300, -105884100)


def sigmas(a, b, c):
    return a + b + c, a * b + a * c + b * c, a * b * c


def sys_of(*alphas, k=1):
    return invariant_system(triple_graph(*alphas), k)


# -- classical invariants ------------------------------------------------------


def test_collision_values():
    assert classical_invariants_from_alphas(4, 15, 30).as_tuple() == COLLISION
    assert classical_invariants_from_alphas(-6, -5, 60).as_tuple() == COLLISION
    assert classical_invariants_from_sigmas(49, 630, 1800).D == 44100
    assert classical_invariants_from_alphas(0, 0, 0).is_zero()
    assert classical_invariants_from_sigmas(0, 0, 0).is_zero()


@settings(max_examples=1000, deadline=None)
@given(st.tuples(*[st.integers(-40, 40)] * 3))
def test_alpha_sigma_general_agree(t):
    a = classical_invariants_from_alphas(*t)
    assert classical_invariants_from_sigmas(*sigmas(*t)) == a
    assert classical_invariants_general(BinaryFormPair.from_alphas(*t)) == a


def test_general_from_graph_systems():
    rng = random.Random(4)
    for _ in range(200):
        t = [rng.choice([x for x in range(-20, 21) if x]) for _ in range(3)]
        expect = classical_invariants_from_alphas(*t)
        for k in (1, 2):
            assert classical_invariants_general(BinaryFormPair.from_system(sys_of(*t, k=k))) == expect


def test_general_zero_and_shear():
    assert classical_invariants_general(BinaryFormPair((0, 0, 0, 0), (0, 0))).is_zero()
    fp = BinaryFormPair.from_alphas(4, 15, 30)
    assert classical_invariants_general(fp.substitute([[1, 1], [0, 1]])).as_tuple() == COLLISION


def _random_unimodular(rng: random.Random, bound: int = 5) -> list[list[int]]:
    while True:
        m = [[rng.randint(-bound, bound) for _ in range(2)] for _ in range(2)]
        if abs(m[0][0] * m[1][1] - m[0][1] * m[1][0]) == 1:
            return m


def test_unimodular_invariance():
    rng = random.Random(1000)
    for _ in range(1000):
        fp = BinaryFormPair(tuple(rng.randint(-9, 9) for _ in range(4)), (rng.randint(-9, 9), rng.randint(-9, 9)))
        assert classical_invariants_general(fp.substitute(_random_unimodular(rng))) == classical_invariants_general(fp)


def test_binary_form_validation():
    with pytest.raises(ValueError):
        BinaryFormPair((1, 2, 3), (1, 1))
    with pytest.raises(ValueError):
        BinaryFormPair.from_system(invariant_system(parse("u a alpha=1"), 1))


# -- triple recovery ------------------------------------------------------------


def brute_orbits(ci: ClassicalInvariants, bound: int) -> set[tuple[int, int, int]]:
    """Triple orbits in the box with invariants ``ci``; c is solved from sigma_2 = sqrt(4I - 3D)."""
    out = set()
    s2sq = 4 * ci.I - 3 * ci.D
    r = int(round(abs(s2sq) ** 0.5))
    while r * r > s2sq:
        r -= 1
    while (r + 1) ** 2 <= s2sq:
        r += 1
    if r * r != s2sq:
        return out
    for a in range(-bound, bound + 1):
        for b in range(a, bound + 1):
            if a + b == 0:
                cands = range(-bound, bound + 1)
            else:
                cands = [(s2 - a * b) // (a + b) for s2 in {r, -r} if (s2 - a * b) % (a + b) == 0]
            for c in cands:
                if abs(c) <= bound and classical_invariants_from_alphas(a, b, c) == ci:
                    out.add(triple_orbit((a, b, c)))
    return out


def test_triple_orbit():
    assert triple_orbit((3, 1, 2)) == triple_orbit((-2, -1, -3)) == (1, 2, 3)


def test_recover_examples():
    ci = classical_invariants_from_alphas(1, 2, 3)
    assert recover_triples(ci) == {(1, 2, 3)}
    assert brute_orbits(ci, 10) == {(1, 2, 3)}
    pair = classical_invariants_from_alphas(4, 15, 30)
    assert recover_triples(pair) == {(4, 15, 30), triple_orbit((-6, -5, 60))}
    assert brute_orbits(pair, 100) == recover_triples(pair)


def test_recover_zero_invariants_needs_hint():
    z = classical_invariants_from_alphas(0, 0, 5)
    assert z.is_zero()
    assert recover_triples(z, hint_p=5) == {(0, 0, 5)}
    assert recover_triples(z, hint_p=(-5, 0)) == {(0, 0, 5)}
    with pytest.raises(ValueError):
        recover_triples(z)


def test_recover_inconsistent_is_empty():
    assert recover_triples(ClassicalInvariants(1, 1, 1, 1)) == set()
    assert recover_triples(ClassicalInvariants(2, 0, 3, 5)) == set()


def test_recover_contains_input_orbit_exhaustive_30():
    seen = set()
    for t in product(range(-30, 31), repeat=3):
        o = triple_orbit(t)
        if o in seen:
            continue
        seen.add(o)
        ci = classical_invariants_from_alphas(*o)
        got = recover_triples(ci, hint_p=sum(o) if ci.is_zero() else None)
        assert o in got, o


def test_recover_matches_brute_force_sample():
    rng = random.Random(77)
    for _ in range(40):
        t = tuple(rng.randint(-12, 12) for _ in range(3))
        ci = classical_invariants_from_alphas(*t)
        if ci.is_zero():
            continue
        assert {o for o in recover_triples(ci) if max(map(abs, o)) <= 40} == brute_orbits(ci, 40)


def test_three_orbits_share_invariants():
    """Counterexamples to 'at most two triples': sigma_1 = 0 leaves sigma_3 unconstrained."""
    groups = [
        [(-27, 4, 23), (-28, 7, 21), (-29, 12, 17)],
        [(-26, -26, 0), (-30, 14, 16), (-26, 0, 26)],
    ]
    for grp in groups:
        cis = {classical_invariants_from_alphas(*t) for t in grp}
        assert len(cis) == 1
        (ci,) = cis
        assert any(sum(t) == 0 for t in grp)
        assert recover_triples(ci) >= {triple_orbit(t) for t in grp}
    assert all(sum(t) == 0 for t in groups[0])
    assert classical_invariants_from_alphas(-27, 4, 23).as_tuple() == (405769, 0, 405769, -516949706)


def test_three_orbit_systems_are_separated():
    a, b, c = sys_of(-27, 4, 23), sys_of(-28, 7, 21), sys_of(-29, 12, 17)
    assert decide_equivalence(a, b).certificate == {"differing": "smith_p", "values": [[4], [28]]}
    v = decide_equivalence(a, c)
    assert v.tag == "inequivalent" and v.certificate == {"differing": "linear_form_stabilizer"}


# -- Jupp ---------------------------------------------------------------------------


def test_jupp_examples():
    assert jupp_admissible(InvariantSystem(1, 1, {(0, 0, 0): 3}, (0,), (12,)))
    bad = InvariantSystem(1, 1, {(0, 0, 0): 1}, (0,), (5,))
    r = jupp_check(bad)
    assert not r.admissible and r.exhaustive
    assert (bad.cubic(r.counterexample) - bad.linear(r.counterexample)) % 48
    assert jupp_admissible(InvariantSystem(1, 0, {}, (), ()))
    with pytest.raises(ValueError):
        jupp_check(InvariantSystem(2, 1, {(0, 0, 0): 1}, (0,), (4,)))


def _random_system(rng: random.Random, n: int) -> InvariantSystem:
    mu = {t: rng.randint(-6, 6) for t in product(range(n), repeat=3) if list(t) == sorted(t)}
    return InvariantSystem(1, n, mu, tuple(rng.randint(0, 1) for _ in range(n)), tuple(rng.randint(-30, 30) for _ in range(n)))


def _direct_box(s: InvariantSystem, xs):
    for x in xs:
        W = [a + 2 * b for a, b in zip(s.w, x)]
        if (s.cubic(W) - s.linear(W)) % 48:
            return False
    return True


def test_jupp_matches_literal_period_24_box():
    rng = random.Random(24)
    for _ in range(120):
        n = rng.randint(1, 2)
        s = _random_system(rng, n)
        if rng.random() < 0.5:
            # shift p so the system becomes admissible at the 0/1 lift and often overall
            s = InvariantSystem(1, n, s.mu, s.w, tuple(3 * 16 * x for x in s.p))
        assert jupp_admissible(s) == _direct_box(s, product(range(24), repeat=n))


def test_jupp_periodicity_against_samples():
    rng = random.Random(36)
    agree_true = 0
    for i in range(100):
        if i % 2:
            g = random_forest(rng, max_components=2, max_u=3, max_v=1, label_max=1)
            s = invariant_system(g, 1)
            if s.n > 3 or s.n == 0:
                continue
        else:
            s = _random_system(rng, rng.randint(1, 3))
        verdict = jupp_admissible(s)
        xs = [[rng.randint(-36, 36) for _ in range(s.n)] for _ in range(10_000 if verdict else 200)]
        if verdict:
            assert _direct_box(s, xs)
            agree_true += 1
        else:
            W = jupp_check(s).counterexample
            assert (s.cubic(W) - s.linear(W)) % 48
    assert agree_true > 20


def test_jupp_graph_systems_admissible():
    rng = random.Random(5)
    for _ in range(100):
        s = invariant_system(random_forest(rng, max_components=2, max_u=4, max_v=2, alpha_max=20, label_max=1), 1)
        if s.n <= 4:
            assert jupp_admissible(s)


# -- witness and modular searches ------------------------------------------------


def test_witness_search_examples():
    s = sys_of(4, 15, 30)
    phi = unimodular_witness_search(s, s, 10)
    assert phi == IntMatrix.identity(2)
    t = sys_of(15, 4, 30)
    phi = unimodular_witness_search(s, t, 1)
    assert phi is not None and verify_witness(s, t, phi)
    one = invariant_system(parse("u a alpha=1"), 1)
    two = invariant_system(parse("u a alpha=2"), 1)
    assert unimodular_witness_search(one, two, 10) is None
    with pytest.raises(ValueError):
        unimodular_witness_search(one, s, 10)
    with pytest.raises(ValueError):
        unimodular_witness_search(one, one, 0)
    big = InvariantSystem(1, 4, {}, (0,) * 4, (0,) * 4)
    with pytest.raises(ValueError):
        unimodular_witness_search(big, big, 1)


def test_witness_search_is_deterministic_and_small_first():
    s = sys_of(2, 5, 7)
    assert unimodular_witness_search(s, s, 10) == unimodular_witness_search(s, s, 3) == IntMatrix.identity(2)


def test_mod_m_on_equivalent_systems():
    rng = random.Random(9)
    for _ in range(10):
        g = random_forest(rng, max_components=2, max_u=3, max_v=1, label_max=1)
        s = invariant_system(g, 1)
        if s.n > 2:
            continue
        t = invariant_system(shuffled_ids(rng, g), 1)
        assert all(mod_m_equivalence(s, t, m) for m in range(2, 10))


def test_mod_7_rank_one():
    one = invariant_system(parse("u a alpha=1"), 1)
    two = invariant_system(parse("u a alpha=2"), 1)
    oracle = any((2 * u**3 - 1) % 7 == 0 and (8 * u - 4) % 7 == 0 for u in range(1, 7))
    assert oracle is False
    assert mod_m_equivalence(one, two, 7) is oracle


def test_collision_pair_first_separating_modulus():
    a, b = sys_of(4, 15, 30), sys_of(-6, -5, 60)
    first = next(m for m in DEFAULT_MODULI if not mod_m_equivalence(a, b, m))
    assert first == 49
    assert not any(not mod_m_equivalence(a, b, m) for m in (5, 7, 8, 9, 11, 13, 16))


def test_mod_m_limits():
    s = InvariantSystem(1, 3, {}, (0,) * 3, (0,) * 3)
    assert mod_m_equivalence(s, s, 3)
    with pytest.raises(ValueError):
        mod_m_equivalence(s, s, 4)
    with pytest.raises(ValueError):
        mod_m_equivalence(sys_of(1, 2, 3), sys_of(1, 2, 3), 1)


# -- decision ladder ---------------------------------------------------------------


def test_decide_examples():
    seven = invariant_system(parse("u a alpha=7"), 1)
    minus = invariant_system(parse("u a alpha=-7"), 1)
    v = decide_equivalence(seven, minus)
    assert v.tag == "equivalent" and v.witness.to_rows() == [[-1]]
    assert json.loads(v.to_json()) == {"certificate": {"method": "rank1"}, "verdict": "equivalent", "witness": [[-1]]}
    v = decide_equivalence(sys_of(4, 15, 30), sys_of(-6, -5, 60))
    assert v.tag == "inequivalent" and v.certificate == {"differing": "mod_m", "modulus": 49}
    assert decide_equivalence(seven, invariant_system(parse("u a alpha=5"), 1)).tag == "inequivalent"
    with pytest.raises(ValueError):
        decide_equivalence(seven, invariant_system(parse("u a alpha=7"), 2))


def test_decide_shuffled_graphs_equivalent():
    rng = random.Random(10)
    for _ in range(60):
        g = random_forest(rng, max_components=2, max_u=4, max_v=2, label_max=1)
        s, t = invariant_system(g, 1), invariant_system(shuffled_ids(rng, g), 1)
        if s.n > 3:
            continue
        v = decide_equivalence(s, t)
        assert v.tag == "equivalent"
        assert verify_witness(s, t, v.witness)
        assert abs(determinant(v.witness)) == 1
        assert all(abs(x) <= 1 for row in v.witness.to_rows() for x in row) or v.certificate["method"] != "witness_search"


def test_decide_symmetric():
    rng = random.Random(11)
    pool = []
    while len(pool) < 30:
        t = tuple(rng.choice([x for x in range(-6, 7) if x]) for _ in range(3))
        pool.append(sys_of(*t))
    for _ in range(80):
        a, b = rng.sample(pool, 2)
        assert decide_equivalence(a, b).tag == decide_equivalence(b, a).tag


def test_exact_rank2_agrees_with_search():
    rng = random.Random(12)
    for _ in range(150):
        s = _random_rank2_nonspin(rng)
        # a random unimodular image is equivalent by construction
        phi = IntMatrix.from_rows(_random_unimodular(rng, 3))
        t = s.pullback(phi)
        psi = rank2_exact_witness(s, t)
        assert psi is not None and verify_witness(s, t, psi)
        u = _random_rank2_nonspin(rng)
        found = rank2_exact_witness(s, u)
        if found is None:
            assert unimodular_witness_search(s, u, 4) is None
        else:
            assert verify_witness(s, u, found)


def _random_rank2_nonspin(rng: random.Random) -> InvariantSystem:
    while True:
        mu = {t: rng.randint(-3, 3) for t in ((0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1))}
        p = (rng.randint(-4, 4), rng.randint(-4, 4))
        if any(p):
            return InvariantSystem(1, 2, mu, (rng.randint(0, 1), 1), p)


def test_fingerprint_fields():
    fp = fingerprint(sys_of(4, 15, 30))
    assert fp["rank"] == 2 and fp["spin"] and fp["classical"]["D"] == 44100
    assert fingerprint(invariant_system(parse("u a alpha=-3"), 1))["abs_mu"] == 3
