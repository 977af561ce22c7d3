"""Betti numbers, Euler characteristics and obstruction checks, plus named graph families.

Betti bookkeeping for ``M`` of dimension ``6k``.  First split the graph: at
every U-vertex with a leaf dot keep one such edge and detach all others,
repeating until nothing changes.  Isolated dots left after splitting each
contribute a summand ``S^(2k+1) x S^(4k-1)``; they are counted as ``r``.  Every
other component contributes, with ``m_u = kplus(u) + kminus(u)``,

* ``sum m_u + |U| - |V|`` in degrees 2k and 4k,
* ``sum m_u`` in each even degree strictly between 0 and 2k, and between 4k and 6k,
* ``2 sum m_u`` in each even degree strictly between 2k and 4k,

and components combine as connected sums (``b_0 = b_6k = 1``).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Sequence

from .graph import NotATreeError, PlumbingGraph, UVertex
from .invariants import AmbientLattice, InvariantSystem, ambient_mu, ambient_p
from .linalg import IntMatrix, kernel_basis, rank

__all__ = [
    "BettiVector",
    "split_leaves",
    "betti",
    "euler_characteristic",
    "direct_summand_obstruction",
    "mu_trivial_on_ker_p",
    "sphere_bundle_exclusion",
    "family_theorem_b",
    "family_homotopy_cp3",
    "family_s2_bundle_cp2",
    "triple_graph",
    "evaluate_on_u0",
    "chi_theorem_b_printed",
    "chi_theorem_b_from_betti",
]


@dataclass(frozen=True)
class BettiVector:
    k: int
    b: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", tuple(self.b))
        if len(self.b) != 6 * self.k + 1:
            raise ValueError("a Betti vector has 6k + 1 entries")

    def as_dict(self) -> dict:
        return {"k": self.k, "b": list(self.b), "euler_characteristic": euler_characteristic(self)}

    def satisfies_duality(self) -> bool:
        return self.b == self.b[::-1]


def split_leaves(g: PlumbingGraph) -> PlumbingGraph:
    """Detach all other edges at U-vertices that carry a leaf dot, to a fixed point.

    The leaf edge kept at each vertex is the first one in edge order.
    """
    cur = g
    while True:
        adj = cur.adjacency()
        drop: set[tuple[str, str]] = set()
        for u in cur.u_vertices:
            leaves = [v for v in adj[u.id] if len(adj[v]) == 1]
            if not leaves or len(adj[u.id]) == 1:
                continue
            keep = next(e for e in cur.edges if e[0] == u.id and e[1] in leaves)
            drop.update(e for e in cur.edges if e[0] == u.id and e != keep)
            break  # one vertex at a time keeps leaf detection exact
        if not drop:
            return cur
        cur = PlumbingGraph(cur.u_vertices, cur.v_vertices, tuple(e for e in cur.edges if e not in drop), k_hint=cur.k_hint)


def betti(g: PlumbingGraph, k: int = 1) -> BettiVector:
    """Betti numbers of the 6k-manifold defined by a forest ``g``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not g.is_forest():
        raise NotATreeError("Betti numbers need every component to be simply-connected")
    split = split_leaves(g)
    top = 6 * k
    b = [0] * (top + 1)
    b[0] = b[top] = 1
    r = 0
    for us, vs in split.components():
        if not us:
            r += len(vs)
            continue
        msum = sum(split.u(x).kplus + split.u(x).kminus for x in us)
        mid = msum + len(us) - len(vs)
        b[2 * k] += mid
        b[4 * k] += mid
        for d in range(2, top, 2):
            if d < 2 * k or d > 4 * k:
                b[d] += msum
            elif 2 * k < d < 4 * k:
                b[d] += 2 * msum
    b[2 * k + 1] += r
    b[4 * k - 1] += r
    return BettiVector(k, tuple(b))


def euler_characteristic(bv: BettiVector) -> int:
    return sum((-1) ** i * x for i, x in enumerate(bv.b))


# -- obstructions -----------------------------------------------------------


def direct_summand_obstruction(s: InvariantSystem, y_basis: Sequence[Sequence[int]]) -> tuple[int, int, bool]:
    """Rank test for a sublattice ``Y`` to split off as a direct summand.

    Builds ``(A_1 | ... | A_m)`` with ``(A_i)_{jl} = mu(x_j, x_l, y_i)``; if its
    rank exceeds ``m = rank Y`` then ``Y`` is not a direct summand.
    """
    m = len(y_basis)
    if m and rank(IntMatrix.from_rows(y_basis)) != m:
        raise ValueError("y_basis must be linearly independent")
    n = s.n
    if m == 0 or n == 0:
        return m, 0, True
    t = s.dense
    rows = []
    for j in range(n):
        row = []
        for y in y_basis:
            for l in range(n):
                row.append(sum(t[j][l][c] * y[c] for c in range(n)))
        rows.append(row)
    observed = rank(IntMatrix.from_rows(rows))
    return m, observed, observed <= m


def mu_trivial_on_ker_p(s: InvariantSystem) -> bool:
    """Whether mu vanishes on all triples from the saturated kernel of p."""
    if s.n == 0:
        return True
    kern = kernel_basis(IntMatrix(1, s.n, s.p))
    vecs = [list(kern.row(i)) for i in range(kern.rows)]
    return all(s.evaluate(a, b, c) == 0 for a, b, c in combinations_with_replacement(vecs, 3))


ITEM3_HYPOTHESES = (
    "fiber sphere dimension p - 1 with 2k+1 <= p <= 6k",
    "or 1 < p <= 2k and the total space is (2k-1)-connected",
)


def sphere_bundle_exclusion(s: InvariantSystem, bv: BettiVector) -> dict:
    """Which linear-sphere-bundle obstructions fire for the given data.

    * ``item1``: the Euler characteristic of a total space is 0 or even, so an
      odd value fires.
    * ``item2``: with vanishing odd cohomology the middle Betti number
      ``b_3k`` is even, so an odd value fires.
    * ``item3``: with ``p != 0``, mu must vanish on ``ker p`` under the
      hypotheses listed in the report; nontrivial mu there fires.
    """
    if s.k != bv.k:
        raise ValueError("inconsistent k")
    k = bv.k
    chi = euler_characteristic(bv)
    fired = []
    if chi % 2:
        fired.append("item1")
    odd_vanish = all(x == 0 for i, x in enumerate(bv.b) if i % 2)
    if odd_vanish and bv.b[3 * k] % 2:
        fired.append("item2")
    p_nonzero = any(s.p)
    trivial = mu_trivial_on_ker_p(s)
    if p_nonzero and not trivial:
        fired.append("item3")
    return {
        "fired": fired,
        "euler_characteristic": chi,
        "odd_cohomology_vanishes": odd_vanish,
        "middle_betti": bv.b[3 * k],
        "p_nonzero": p_nonzero,
        "mu_trivial_on_ker_p": trivial,
        "item3_hypotheses": list(ITEM3_HYPOTHESES),
        "spin": s.is_spin,
    }


# -- families ---------------------------------------------------------------


def family_theorem_b(
    k: int, s: int, m: int, alphas: Sequence[int], signs: Sequence[int] | None = None
) -> PlumbingGraph:
    """Central dot with ``s`` subgraphs attached at their alpha-vertex.

    The first ``m`` subgraphs are single non-spin vertices (``kplus = 1`` for
    sign +1, ``kminus = 1`` for sign -1); the rest are spin triples
    ``(alpha, -1, -1)`` (sign +1) or ``(alpha, 1, 1)`` (sign -1) around a dot.
    """
    if k < 1 or s < 2 or not 0 <= m <= s or len(alphas) != s:
        raise ValueError("need k >= 1, s >= 2, 0 <= m <= s and s alphas")
    signs = list(signs) if signs is not None else [1] * s
    if len(signs) != s or any(e not in (1, -1) for e in signs):
        raise ValueError("signs must be s values in {1, -1}")
    us: list[UVertex] = []
    vs = ["c"]
    edges = []
    for i, (a, e) in enumerate(zip(alphas, signs), start=1):
        head = f"a{i}"
        if i <= m:
            us.append(UVertex(head, a, 1 if e > 0 else 0, 1 if e < 0 else 0))
        else:
            us += [UVertex(head, a), UVertex(f"b{i}", -e), UVertex(f"d{i}", -e)]
            vs.append(f"v{i}")
            edges += [(head, f"v{i}"), (f"b{i}", f"v{i}"), (f"d{i}", f"v{i}")]
        edges.append((head, "c"))
    return PlumbingGraph(tuple(us), tuple(vs), tuple(edges), k_hint=k)


def family_homotopy_cp3(i: int) -> tuple[PlumbingGraph, dict]:
    """Triple graph with ``alpha = ((2i+1)(i+1), (2i+1)i, i(i+1)/2)`` and its expected data.

    The expected basis ``e1 = u1 + u2 - 2 u3``, ``e2 = i u1 + (i+1) u2 -
    (2i+1) u3`` (on the ``u^0`` symbols) splits off a summand with
    ``mu(e1^3) = 1``.
    """
    if i < 0:
        raise ValueError("i must be non-negative")
    alphas = ((2 * i + 1) * (i + 1), (2 * i + 1) * i, i * (i + 1) // 2)
    g = triple_graph(*alphas)
    expected = {
        "alphas": list(alphas),
        "basis": [[1, 1, -2], [i, i + 1, -(2 * i + 1)]],
        "mu": {"e1e1e1": 1, "e1e1e2": 0, "e1e2e2": 0, "e2e2e2": i * (i + 1) * (2 * i + 1) // 2},
        "p": [4 + 12 * i * (i + 1), 6 * i * (i + 1) * (2 * i + 1)],
    }
    return g, expected


def triple_graph(a1: int, a2: int, a3: int) -> PlumbingGraph:
    return PlumbingGraph(
        (UVertex("u1", a1), UVertex("u2", a2), UVertex("u3", a3)),
        ("v",),
        (("u1", "v"), ("u2", "v"), ("u3", "v")),
    )


def family_s2_bundle_cp2(alpha: int) -> PlumbingGraph:
    """The triple graph ``(alpha, -1, -1)``."""
    return triple_graph(alpha, -1, -1)


def evaluate_on_u0(g: PlumbingGraph, k: int, vectors: Sequence[Sequence[int]]) -> dict:
    """mu and p on vectors given by their ``u^0`` coefficients (U-vertex order)."""
    lat = AmbientLattice.of(g)
    amb = []
    for vec in vectors:
        amb.append(lat.vector({(u.id, 0): c for u, c in zip(g.u_vertices, vec)}))
    mu = {}
    for a, b, c in combinations_with_replacement(range(len(amb)), 3):
        mu[(a, b, c)] = ambient_mu(g, k, amb[a], amb[b], amb[c])
    return {"mu": mu, "p": [ambient_p(g, k, x) for x in amb]}


def chi_theorem_b_printed(k: int, l: int, m: int) -> int:
    """The closed Euler characteristic expression published for the central-dot family."""
    return 2 + 2 * m * (k - 1) + (l - 1 + m) * (k + 1)


def chi_theorem_b_from_betti(k: int, l: int, m: int) -> int:
    """Euler characteristic of the central-dot family from the Betti bookkeeping."""
    return 2 + 2 * (2 * l - 1) + 4 * m * (k - 1)
