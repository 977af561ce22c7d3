"""Invariant systems (H_G, mu, w, p) of algebraic plumbing graphs.

The ambient lattice has one symbol ``u^i`` for every U-vertex ``u`` and every
``-kminus(u) <= i <= kplus(u)``.  On it the trilinear form is diagonal per
vertex::

    mu(u^0, u^0, u^0) = lambda_k * alpha(u) / 4
    mu(u^0, u^j, u^j) = sign(j)              (j != 0)

and every other entry vanishes; the linear form is
``p(u^0) = lambda_k * alpha(u) + C(2k+1, k) * (kplus(u) - kminus(u))`` and
``p(u^j) = 0`` for ``j != 0``.  H_G is spanned by the ``u^j`` with ``j != 0``
together with the combinations ``sum c_u u^0`` whose coefficients sum to zero
around every dot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

from .graph import PlumbingGraph
from .linalg import IntMatrix, determinant, inverse_unimodular, kernel_basis, rank

__all__ = [
    "Constants",
    "constants",
    "lambda_constants",
    "AmbientLattice",
    "InvariantSystem",
    "biadjacency_matrix",
    "invariant_system",
    "graph_rank",
    "is_spin",
    "systems_equal_on_the_nose",
]


@dataclass(frozen=True)
class Constants:
    k: int
    mu_k: int
    lambda_k: int
    binom: int


def constants(k: int) -> Constants:
    """The bundle constants for parameter ``k >= 1``."""
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    mu_k = ((3 - (-1) ** k) // 2) * factorial(2 * k - 1)
    if k in (1, 4):
        lam = 2 * mu_k
    elif k == 2:
        lam = 8 * mu_k
    else:
        lam = mu_k
    c = comb(2 * k + 1, k)
    assert lam % 4 == 0 and c < lam
    return Constants(k, mu_k, lam, c)


lambda_constants = constants


@dataclass(frozen=True)
class AmbientLattice:
    """Ordered symbols ``(u_id, i)``; coordinates of ambient vectors follow this order."""

    symbols: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, g: PlumbingGraph) -> AmbientLattice:
        return cls(
            tuple((u.id, i) for u in g.u_vertices for i in range(-u.kminus, u.kplus + 1))
        )

    @cached_property
    def index(self) -> dict[tuple[str, int], int]:
        return {s: i for i, s in enumerate(self.symbols)}

    def __len__(self) -> int:
        return len(self.symbols)

    def vector(self, coeffs: Mapping[tuple[str, int], int]) -> tuple[int, ...]:
        out = [0] * len(self.symbols)
        for s, c in coeffs.items():
            out[self.index[s]] += c
        return tuple(out)

    def names(self) -> list[str]:
        return [f"{u}^{i}" for u, i in self.symbols]


def biadjacency_matrix(g: PlumbingGraph) -> IntMatrix:
    """``B[u][v] = 1`` iff ``(u, v)`` is an edge; rows follow U, columns V order."""
    col = {v: j for j, v in enumerate(g.v_vertices)}
    edges = set(g.edges)
    return IntMatrix.from_rows(
        [[int((u.id, v) in edges) for v in g.v_vertices] for u in g.u_vertices],
        cols=len(col),
    ) if g.u_vertices else IntMatrix(0, len(g.v_vertices), ())


def _ambient_forms(g: PlumbingGraph, k: int):
    """Per-symbol data: (cubic coefficient on u^0, sign for u^j, p value)."""
    c = constants(k)
    lat = AmbientLattice.of(g)
    zero_of: dict[str, int] = {}
    cube: dict[int, int] = {}
    pairs: dict[int, list[tuple[int, int]]] = {}
    pvec = [0] * len(lat)
    for u in g.u_vertices:
        z = lat.index[(u.id, 0)]
        zero_of[u.id] = z
        cube[z] = c.lambda_k * u.alpha // 4
        pairs[z] = [(lat.index[(u.id, j)], 1 if j > 0 else -1) for j in range(-u.kminus, u.kplus + 1) if j]
        pvec[z] = c.lambda_k * u.alpha + c.binom * (u.kplus - u.kminus)
    return lat, cube, pairs, pvec


def ambient_mu(g: PlumbingGraph, k: int, x: Sequence[int], y: Sequence[int], z: Sequence[int]) -> int:
    """The ambient trilinear form on three vectors in symbol coordinates."""
    _, cube, pairs, _ = _ambient_forms(g, k)
    return _eval_mu(cube, pairs, x, y, z)


def ambient_p(g: PlumbingGraph, k: int, x: Sequence[int]) -> int:
    _, _, _, pvec = _ambient_forms(g, k)
    return sum(a * b for a, b in zip(pvec, x))


def _eval_mu(cube, pairs, x, y, z) -> int:
    total = 0
    for z0, cc in cube.items():
        x0, y0, w0 = x[z0], y[z0], z[z0]
        if cc:
            total += cc * x0 * y0 * w0
        for j, s in pairs[z0]:
            total += s * (x0 * y[j] * z[j] + x[j] * y0 * z[j] + x[j] * y[j] * w0)
    return total


@dataclass(frozen=True)
class InvariantSystem:
    """A lattice ``Z^n`` with a symmetric trilinear form, a mod-2 class and a linear form.

    ``mu`` maps sorted index triples ``(i, j, l)``, ``i <= j <= l``, to their
    nonzero values.  ``basis`` records, for systems coming from a graph, the
    ambient coordinates of each basis vector (empty for abstract systems).
    """

    k: int
    n: int
    mu: Mapping[tuple[int, int, int], int]
    w: tuple[int, ...]
    p: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...] = ()
    symbols: tuple[tuple[str, int], ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        clean = {}
        for key, v in self.mu.items():
            i, j, l = sorted(key)
            if not (0 <= i and l < self.n):
                raise ValueError(f"mu index {key} out of range for n={self.n}")
            if v:
                if (i, j, l) in clean and clean[(i, j, l)] != v:
                    raise ValueError(f"conflicting values for mu{(i, j, l)}")
                clean[(i, j, l)] = int(v)
        object.__setattr__(self, "mu", dict(sorted(clean.items())))
        object.__setattr__(self, "w", tuple(int(x) % 2 for x in self.w))
        object.__setattr__(self, "p", tuple(int(x) for x in self.p))
        object.__setattr__(self, "basis", tuple(tuple(int(c) for c in b) for b in self.basis))
        if len(self.w) != self.n or len(self.p) != self.n:
            raise ValueError("w and p must have length n")
        if self.basis and len(self.basis) != self.n:
            raise ValueError("basis must have n vectors")

    @classmethod
    def from_dense(cls, k: int, mu: Sequence, w: Sequence[int], p: Sequence[int]) -> InvariantSystem:
        """Build from a dense ``n x n x n`` nested list (only sorted entries are read)."""
        n = len(p)
        vals = {t: mu[t[0]][t[1]][t[2]] for t in combinations_with_replacement(range(n), 3)}
        return cls(k, n, vals, tuple(w), tuple(p))

    @classmethod
    def from_cubic(cls, k: int, coeffs: Mapping[tuple[int, int, int], int], w: Sequence[int], p: Sequence[int]) -> InvariantSystem:
        return cls(k, len(p), dict(coeffs), tuple(w), tuple(p))

    # -- evaluation ---------------------------------------------------------

    def value(self, i: int, j: int, l: int) -> int:
        return self.mu.get(tuple(sorted((i, j, l))), 0)

    @cached_property
    def dense(self) -> list[list[list[int]]]:
        n = self.n
        t = [[[0] * n for _ in range(n)] for _ in range(n)]
        for (i, j, l), v in self.mu.items():
            for a, b, c in {(i, j, l), (i, l, j), (j, i, l), (j, l, i), (l, i, j), (l, j, i)}:
                t[a][b][c] = v
        return t

    def evaluate(self, x: Sequence[int], y: Sequence[int], z: Sequence[int]) -> int:
        """mu(x, y, z) for coordinate vectors in this basis."""
        total = 0
        for (i, j, l), v in self.mu.items():
            for a, b, c in {(i, j, l), (i, l, j), (j, i, l), (j, l, i), (l, i, j), (l, j, i)}:
                total += v * x[a] * y[b] * z[c]
        return total

    def cubic(self, x: Sequence[int]) -> int:
        """mu(x, x, x), via the multinomial expansion of the sorted entries."""
        total = 0
        for (i, j, l), v in self.mu.items():
            if i == j == l:
                total += v * x[i] ** 3
            elif i == j or j == l:
                a, b = (i, l) if i == j else (l, i)
                total += 3 * v * x[a] * x[a] * x[b]
            else:
                total += 6 * v * x[i] * x[j] * x[l]
        return total

    def linear(self, x: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(self.p, x))

    def w_dot(self, x: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(self.w, x)) % 2

    @property
    def is_spin(self) -> bool:
        return not any(self.w)

    def pullback(self, phi: IntMatrix) -> InvariantSystem:
        """The system on ``Z^n`` obtained by pulling back along ``x -> phi @ x``.

        ``phi`` must be unimodular; the mod-2 class is transported by the
        inverse so that ``phi`` itself is an equivalence from the result to
        ``self``.
        """
        if phi.rows != self.n or phi.cols != self.n:
            raise ValueError("phi must be n x n")
        if abs(determinant(phi)) != 1:
            raise ValueError("phi must be unimodular")
        cols = [list(phi.T.row(j)) for j in range(self.n)]
        mu = {
            (a, b, c): self.evaluate(cols[a], cols[b], cols[c])
            for a, b, c in combinations_with_replacement(range(self.n), 3)
        }
        p = tuple(self.linear(c) for c in cols)
        w = tuple(x % 2 for x in inverse_unimodular(phi).apply(list(self.w)))
        return InvariantSystem(self.k, self.n, mu, w, p)

    def scaled(self, mu_factor, p_factor) -> InvariantSystem:
        return InvariantSystem(
            self.k,
            self.n,
            {t: v * mu_factor for t, v in self.mu.items()},
            self.w,
            tuple(v * p_factor for v in self.p),
            self.basis,
        )

    # -- serialization ------------------------------------------------------

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "basis": [list(b) for b in self.basis],
            "mu": [[i, j, l, v] for (i, j, l), v in self.mu.items()],
            "w": list(self.w),
            "p": list(self.p),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: Mapping) -> InvariantSystem:
        return cls(
            int(d["k"]),
            int(d["n"]),
            {(i, j, l): v for i, j, l, v in d["mu"]},
            tuple(d["w"]),
            tuple(d["p"]),
            tuple(tuple(b) for b in d.get("basis", ())),
        )

    @classmethod
    def from_json(cls, text: str) -> InvariantSystem:
        return cls.from_dict(json.loads(text))


def invariant_system(g: PlumbingGraph, k: int = 1) -> InvariantSystem:
    """Compute the invariant system of ``g`` at parameter ``k``.

    Basis order: the symbols ``u^i`` (``i != 0``) in symbol order, then the
    Hermite-normal-form kernel basis of ``B(G)^T`` placed on the ``u^0``
    coordinates.
    """
    lat, cube, pairs, pvec = _ambient_forms(g, k)
    dim = len(lat)
    basis: list[tuple[int, ...]] = []
    w: list[int] = []
    for idx, (_, i) in enumerate(lat.symbols):
        if i:
            e = [0] * dim
            e[idx] = 1
            basis.append(tuple(e))
            w.append(1)
    zeros = [lat.index[(u.id, 0)] for u in g.u_vertices]
    if g.u_vertices:
        kern = kernel_basis(biadjacency_matrix(g).T) if g.v_vertices else IntMatrix.identity(len(zeros))
        for r in range(kern.rows):
            e = [0] * dim
            for c, z in zip(kern.row(r), zeros):
                e[z] = c
            basis.append(tuple(e))
            w.append(0)
    n = len(basis)
    sparse = [{i: c for i, c in enumerate(b) if c} for b in basis]
    zero_set = set(zeros)
    mu = {}
    for a, b, c in combinations_with_replacement(range(n), 3):
        # quick structural zero test: every nonzero term needs a u^0 coordinate
        if not (zero_set & (sparse[a].keys() | sparse[b].keys() | sparse[c].keys())):
            continue
        v = _eval_mu(cube, pairs, basis[a], basis[b], basis[c])
        if v:
            mu[(a, b, c)] = v
    p = tuple(sum(x * y for x, y in zip(pvec, b)) for b in basis)
    return InvariantSystem(k, n, mu, tuple(w), p, tuple(basis), lat.symbols)


def graph_rank(g: PlumbingGraph) -> int:
    """rank H_G = sum(kplus + kminus) + |U| - rank B(G)."""
    labels = sum(u.kplus + u.kminus for u in g.u_vertices)
    if not g.u_vertices:
        return 0
    b = biadjacency_matrix(g)
    return labels + len(g.u_vertices) - (rank(b) if g.v_vertices else 0)


def is_spin(g: PlumbingGraph) -> bool:
    return g.is_spin()


def systems_equal_on_the_nose(s1: InvariantSystem, s2: InvariantSystem) -> bool:
    """Stored data coincide entry-wise (k, n, mu, w, p); bases are not compared."""
    return (s1.k, s1.n, dict(s1.mu), s1.w, s1.p) == (s2.k, s2.n, dict(s2.mu), s2.w, s2.p)


def radical_rank(s: InvariantSystem) -> int:
    """Rank of ``{x : mu(x, ., .) = 0}``."""
    n = s.n
    if n == 0:
        return 0
    t = s.dense
    rows = [[t[a][b][c] for a in range(n)] for b in range(n) for c in range(n)]
    return n - rank(IntMatrix.from_rows(rows))
