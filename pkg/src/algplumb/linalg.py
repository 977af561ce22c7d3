"""Exact integer matrices: Hermite and Smith normal forms, rank and kernels.

Everything here works on Python integers, so entries never overflow.  Sizes
are desk-scale (a few dozen rows), so the algorithms are the textbook ones
rather than the asymptotically fast variants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "hermite_normal_form",
    "kernel_basis",
    "rank",
    "smith_invariant_factors",
    "determinant",
    "inverse_unimodular",
    "solve_integer",
]


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> IntMatrix:
        data = [[int(x) for x in r] for r in rows]
        if not data:
            return cls(0, cols or 0, ())
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ValueError("ragged rows")
        return cls(len(data), width, tuple(x for r in data for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for j in range(other.cols):
                out.append(sum(r[t] * other[t, j] for t in range(self.cols)))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence[int]) -> list[int]:
        """Matrix-vector product ``self @ v``."""
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(a * b for a, b in zip(self.row(i), v)) for i in range(self.rows)]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_rows()!r})"


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hermite_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns ``(h, u)`` with ``u`` unimodular and ``u @ m == h``.  Pivots of
    ``h`` are positive, entries above a pivot lie in ``[0, pivot)``, entries
    below are zero and zero rows come last.
    """
    a = m.to_rows()
    n_rows, n_cols = m.rows, m.cols
    u = IntMatrix.identity(n_rows).to_rows()
    r = 0
    for j in range(n_cols):
        if r >= n_rows:
            break
        # fold every nonzero entry below row r into row r via 2x2 unimodular ops
        for i in range(r + 1, n_rows):
            if a[i][j] == 0:
                continue
            if a[r][j] == 0:
                a[r], a[i] = a[i], a[r]
                u[r], u[i] = u[i], u[r]
                continue
            g, x, y = _xgcd(a[r][j], a[i][j])
            p, q = a[r][j] // g, a[i][j] // g
            ar, ai = a[r], a[i]
            a[r] = [x * s + y * t for s, t in zip(ar, ai)]
            a[i] = [-q * s + p * t for s, t in zip(ar, ai)]
            ur, ui = u[r], u[i]
            u[r] = [x * s + y * t for s, t in zip(ur, ui)]
            u[i] = [-q * s + p * t for s, t in zip(ur, ui)]
        piv = a[r][j]
        if piv == 0:
            continue
        if piv < 0:
            a[r] = [-s for s in a[r]]
            u[r] = [-s for s in u[r]]
            piv = -piv
        for i in range(r):
            q = a[i][j] // piv
            if q:
                a[i] = [s - q * t for s, t in zip(a[i], a[r])]
                u[i] = [s - q * t for s, t in zip(u[i], u[r])]
        r += 1
    h = IntMatrix(n_rows, n_cols, tuple(x for row in a for x in row))
    return h, IntMatrix(n_rows, n_rows, tuple(x for row in u for x in row))


def rank(m: IntMatrix) -> int:
    """Rank over the rationals."""
    h, _ = hermite_normal_form(m)
    return sum(1 for i in range(h.rows) if any(h.row(i)))


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Saturated basis of ``{x in Z^cols : m @ x = 0}``, one vector per row.

    The basis is returned in Hermite normal form so it depends only on the
    kernel lattice, not on the elimination path.
    """
    h, u = hermite_normal_form(m.T)
    kernel_rows = [u.row(i) for i in range(h.rows) if not any(h.row(i))]
    if not kernel_rows:
        return IntMatrix(0, m.cols, ())
    k = IntMatrix.from_rows(kernel_rows)
    hk, _ = hermite_normal_form(k)
    return IntMatrix.from_rows([hk.row(i) for i in range(hk.rows) if any(hk.row(i))])


def smith_invariant_factors(m: IntMatrix) -> list[int]:
    """Nonzero invariant factors ``d1 | d2 | ...`` of ``m``."""
    a = m.to_rows()
    n_rows, n_cols = m.rows, m.cols
    diag: list[int] = []
    t = 0
    while t < min(n_rows, n_cols):
        # pick the smallest nonzero entry of the trailing block as pivot
        best = None
        for i in range(t, n_rows):
            for j in range(t, n_cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i0, j0 = best
        a[t], a[i0] = a[i0], a[t]
        for row in a:
            row[t], row[j0] = row[j0], row[t]
        done = False
        while not done:
            done = True
            piv = a[t][t]
            for i in range(t + 1, n_rows):
                q = a[i][t] // piv
                if q:
                    a[i] = [s - q * r for s, r in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, n_cols):
                q = a[t][j] // piv
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    done = False
            if not done:
                # a remainder is smaller than the pivot; move it into place
                best = None
                for i in range(t, n_rows):
                    if a[i][t] and (best is None or abs(a[i][t]) < abs(a[best][t])):
                        best = i
                a[t], a[best] = a[best], a[t]
                bestc = None
                for j in range(t, n_cols):
                    if a[t][j] and (bestc is None or abs(a[t][j]) < abs(a[t][bestc])):
                        bestc = j
                for row in a:
                    row[t], row[bestc] = row[bestc], row[t]
                continue
            # divisibility: pivot must divide the whole trailing block
            for i in range(t + 1, n_rows):
                for j in range(t + 1, n_cols):
                    if a[i][j] % piv:
                        a[t] = [s + r for s, r in zip(a[t], a[i])]
                        done = False
                        break
                if not done:
                    break
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def determinant(m: IntMatrix) -> int:
    """Exact determinant via fraction-free Bareiss elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = m.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse_unimodular(m: IntMatrix) -> IntMatrix:
    """Inverse of a matrix with determinant +1 or -1."""
    h, u = hermite_normal_form(m)
    if h != IntMatrix.identity(m.rows):
        raise ValueError("matrix is not unimodular")
    return u


def solve_integer(basis: IntMatrix, v: Sequence[int]) -> list[int] | None:
    """Coordinates ``c`` with ``sum(c[i] * basis.row(i)) == v``, or None.

    Uses exact rational elimination on the (independent) rows of ``basis``;
    returns None when ``v`` is outside the lattice they span.
    """
    n, d = basis.rows, basis.cols
    if len(v) != d:
        raise ValueError("vector length mismatch")
    # augmented column system basis.T @ c = v
    a = [[Fraction(basis[i, j]) for i in range(n)] + [Fraction(v[j])] for j in range(d)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, d) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(d):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    if any(a[i][n] != 0 for i in range(r, d)):
        return None
    if len(pivots) != n:
        raise ValueError("basis rows are linearly dependent")
    coords = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        coords[c] = a[i][n]
    if any(x.denominator != 1 for x in coords):
        return None
    return [int(x) for x in coords]


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for x in values:
        g = gcd(g, x)
    return g
