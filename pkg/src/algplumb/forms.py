"""Equivalence machinery for invariant systems.

* classical invariants (D, R^2, I, J) of the rank-2 spin case and the
  recovery of vertex triples from them,
* Jupp's congruence ``mu(W) = p(W) mod 48``,
* bounded unimodular witness search and finite-quotient (mod m) searches,
* a decision ladder combining all of the above.

Witness convention: ``phi`` is an n x n integer matrix whose column ``j`` is
the image of the j-th basis vector of ``s1`` written in the basis of ``s2``;
it is an equivalence when ``mu2(phi x, phi y, phi z) = mu1(x, y, z)``,
``p2(phi x) = p1(x)``, ``phi w1 = w2 (mod 2)`` and ``det phi = +-1``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import gcd, isqrt
from typing import Iterable, Sequence

from .invariants import InvariantSystem, constants, radical_rank
from .linalg import IntMatrix, determinant, gcd_all, inverse_unimodular, smith_invariant_factors

__all__ = [
    "BinaryFormPair",
    "ClassicalInvariants",
    "EquivalenceVerdict",
    "JuppResult",
    "classical_invariants_from_alphas",
    "classical_invariants_from_sigmas",
    "classical_invariants_general",
    "recover_triples",
    "triple_orbit",
    "jupp_check",
    "jupp_admissible",
    "unimodular_witness_search",
    "mod_m_equivalence",
    "verify_witness",
    "rank2_exact_witness",
    "decide_equivalence",
    "fingerprint",
]


def _norm(x):
    """Fractions with denominator 1 become ints."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


# -- classical invariants ---------------------------------------------------


@dataclass(frozen=True)
class BinaryFormPair:
    """Cubic ``f = c0 x^3 + c1 x^2 y + c2 x y^2 + c3 y^3`` and linear ``p = p0 x + p1 y``."""

    f: tuple
    p: tuple

    def __post_init__(self) -> None:
        if len(self.f) != 4 or len(self.p) != 2:
            raise ValueError("need four cubic and two linear coefficients")
        object.__setattr__(self, "f", tuple(_norm(Fraction(c)) for c in self.f))
        object.__setattr__(self, "p", tuple(_norm(Fraction(c)) for c in self.p))

    @classmethod
    def from_system(cls, s: InvariantSystem) -> BinaryFormPair:
        """``f(x) = mu(x,x,x)`` and ``p(x) = p_s(x) / 4`` after rescaling to k = 1.

        For spin systems at parameter k both forms carry an extra factor
        lambda_k / 4, which is divided out so that all k share one scale.
        """
        if s.n != 2:
            raise ValueError("binary forms need a rank-2 system")
        lam = constants(s.k).lambda_k
        scale = Fraction(4, lam)
        f = (s.value(0, 0, 0), 3 * s.value(0, 0, 1), 3 * s.value(0, 1, 1), s.value(1, 1, 1))
        return cls(tuple(scale * c for c in f), tuple(Fraction(c, lam) for c in s.p))

    @classmethod
    def from_alphas(cls, a1: int, a2: int, a3: int) -> BinaryFormPair:
        return cls((a1 - a3, -3 * a3, -3 * a3, a2 - a3), (a1 - a3, a2 - a3))

    def substitute(self, m: Sequence[Sequence[int]]) -> BinaryFormPair:
        """Forms composed with ``(x, y) -> (a x + b y, c x + d y)``, ``m = [[a, b], [c, d]]``."""
        (a, b), (c, d) = m
        c0, c1, c2, c3 = self.f
        # expand f(a x + b y, c x + d y) coefficient by coefficient
        X = (a, b)
        Y = (c, d)

        def mul(p, q):
            out = [0] * (len(p) + len(q) - 1)
            for i, s in enumerate(p):
                for j, t in enumerate(q):
                    out[i + j] += s * t
            return out

        xx = mul(X, X)
        yy = mul(Y, Y)
        terms = [
            mul(xx, X),
            mul(xx, Y),
            mul(X, yy),
            mul(yy, Y),
        ]
        new_f = [0, 0, 0, 0]
        for coef, t in zip((c0, c1, c2, c3), terms):
            for i in range(4):
                new_f[i] += coef * t[i]
        p0, p1 = self.p
        new_p = (p0 * a + p1 * c, p0 * b + p1 * d)
        return BinaryFormPair(tuple(new_f), new_p)


@dataclass(frozen=True)
class ClassicalInvariants:
    D: int
    R2: int
    I: int
    J: int

    def as_dict(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in
                (("D", self.D), ("R2", self.R2), ("I", self.I), ("J", self.J))}

    def as_tuple(self) -> tuple:
        return (self.D, self.R2, self.I, self.J)

    def is_zero(self) -> bool:
        return not any(self.as_tuple())


def classical_invariants_from_alphas(a1: int, a2: int, a3: int) -> ClassicalInvariants:
    D = (
        a1**2 * a2**2 + a1**2 * a3**2 + a2**2 * a3**2
        - 2 * a1**2 * a2 * a3 - 2 * a1 * a2**2 * a3 - 2 * a1 * a2 * a3**2
    )
    R = (a1 - a3) * (a2 - a3) * (a2 - a1) * (a1 + a2 + a3)
    I = (
        a1**2 * a2**2 + a1**2 * a3**2 + a2**2 * a3**2
        - a1**2 * a2 * a3 - a1 * a2**2 * a3 - a1 * a2 * a3**2
    )
    J = (
        -a1**4 * a2**2 - a1**2 * a2**4 - a1**4 * a3**2 - a1**2 * a3**4 - a2**4 * a3**2 - a2**2 * a3**4
        + 2 * a1**4 * a2 * a3 + 2 * a1 * a2**4 * a3 + 2 * a1 * a2 * a3**4
        + a1**3 * a2**2 * a3 + a1**3 * a2 * a3**2 + a1**2 * a2**3 * a3 + a1 * a2**3 * a3**2
        + a1**2 * a2 * a3**3 + a1 * a2**2 * a3**3 - 6 * a1**2 * a2**2 * a3**2
    )
    return ClassicalInvariants(D, R * R, I, J)


def classical_invariants_from_sigmas(s1: int, s2: int, s3: int) -> ClassicalInvariants:
    return ClassicalInvariants(
        s2**2 - 4 * s1 * s3,
        s1**2 * (s1**2 * s2**2 - 4 * s2**3 - 4 * s1**3 * s3 + 18 * s1 * s2 * s3 - 27 * s3**2),
        s2**2 - 3 * s1 * s3,
        -(s1**2) * s2**2 + 2 * s2**3 + 4 * s1**3 * s3 - 9 * s1 * s2 * s3,
    )


# Scale factors matching the textbook invariants to the triple-family
# polynomials: D = -disc/27, R = f(p1, -p0), I = I4/9, J = J4/27.
DISC_SCALE = Fraction(-1, 27)
I_SCALE = Fraction(1, 9)
J_SCALE = Fraction(1, 27)


def classical_invariants_general(fp: BinaryFormPair) -> ClassicalInvariants:
    """Discriminant, squared resultant and quartic invariants of ``f * p``."""
    c0, c1, c2, c3 = (Fraction(c) for c in fp.f)
    p0, p1 = (Fraction(c) for c in fp.p)
    disc = c1**2 * c2**2 - 4 * c0 * c2**3 - 4 * c1**3 * c3 - 27 * c0**2 * c3**2 + 18 * c0 * c1 * c2 * c3
    R = c0 * p1**3 - c1 * p1**2 * p0 + c2 * p1 * p0**2 - c3 * p0**3
    a = c0 * p0
    b = c0 * p1 + c1 * p0
    c = c1 * p1 + c2 * p0
    d = c2 * p1 + c3 * p0
    e = c3 * p1
    I4 = 12 * a * e - 3 * b * d + c * c
    J4 = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c**3
    return ClassicalInvariants(
        _norm(DISC_SCALE * disc), _norm(R * R), _norm(I_SCALE * I4), _norm(J_SCALE * J4)
    )


# -- triple recovery --------------------------------------------------------


def triple_orbit(t: Sequence[int]) -> tuple[int, int, int]:
    """Representative of ``t`` up to permutation and global sign."""
    a = tuple(sorted(t))
    b = tuple(sorted(-x for x in t))
    return max(a, b)


def _isqrt_exact(n) -> int | None:
    if isinstance(n, Fraction):
        if n.denominator != 1:
            return None
        n = int(n)
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def _cubic_integer_roots(s1: int, s2: int, s3: int) -> list[int] | None:
    """All three roots of ``y^3 - s1 y^2 + s2 y - s3`` if they are integers."""

    def f(y: int) -> int:
        return ((y - s1) * y + s2) * y - s3

    d = s1 * s1 - 3 * s2
    if d < 0:
        return None
    t = isqrt(d)
    if t * t < d:
        t += 1
    lo = -((-(s1 + t)) // 3)  # ceil((s1 + sqrt d) / 3) >= largest critical point
    hi = max(lo, 1 + abs(s1) + abs(s2) + abs(s3))
    # f is increasing on [lo, inf); find the smallest y there with f(y) >= 0
    a, b = lo, hi
    while a < b:
        mid = (a + b) // 2
        if f(mid) >= 0:
            b = mid
        else:
            a = mid + 1
    root = next((r for r in (a, lo - 1, lo - 2) if f(r) == 0), None)
    if root is None:
        return None
    # deflate: y^2 + (root - s1) y + q
    b1 = root - s1
    q = s2 + root * b1
    disc = b1 * b1 - 4 * q
    sq = _isqrt_exact(disc)
    if sq is None or (-b1 + sq) % 2:
        return None
    return sorted([root, (-b1 + sq) // 2, (-b1 - sq) // 2])


def _sigma_zero_triples(s2: int) -> list[tuple[int, int, int]]:
    """Triples ``(a, b, -a-b)`` with ``a^2 + ab + b^2 = -s2``."""
    n = -s2
    if n < 0:
        return []
    out = set()
    bound = isqrt(4 * n // 3 + 1) + 1
    for a in range(-bound, bound + 1):
        # solve b^2 + a b + (a^2 - n) = 0
        disc = a * a - 4 * (a * a - n)
        r = _isqrt_exact(disc)
        if r is None:
            continue
        for num in (-a + r, -a - r):
            if num % 2 == 0:
                b = num // 2
                out.add(triple_orbit((a, b, -a - b)))
    return sorted(out)


def recover_triples(ci: ClassicalInvariants, hint_p=None) -> set[tuple[int, int, int]]:
    """Vertex triples (up to permutation and global sign) with invariants ``ci``.

    When all four invariants vanish at least two of the alphas are zero and
    the third is read from ``hint_p``: an int is taken as that alpha, a
    sequence as the normalized linear form ``p`` of a BinaryFormPair (its
    content is ``|alpha|``).  Every returned triple reproduces ``ci`` exactly.
    """
    D, R2, I, J = (Fraction(x) for x in ci.as_tuple())
    if ci.is_zero():
        if hint_p is None:
            raise ValueError("all invariants vanish; the remaining alpha must be supplied via hint_p")
        if isinstance(hint_p, int):
            alpha = hint_p
        else:
            g = gcd_all(int(Fraction(x)) for x in hint_p)
            alpha = g
        return {triple_orbit((alpha, 0, 0))}
    s2sq = 4 * I - 3 * D
    P = I - D  # sigma1 * sigma3
    r = _isqrt_exact(s2sq)
    if r is None or P.denominator != 1:
        return set()
    P = int(P)
    sigma_pairs: set[tuple[int, int, int]] = set()
    zero_s1: set[int] = set()
    for s2 in {r, -r}:
        if D != 0:
            num = s2 * (2 * s2 * s2 - 9 * P) - J
            s1sq = num / D
        elif s2 != 0:
            if P == 0:
                continue
            s1sq = (R2 + 27 * P * P) / (2 * P * s2)
        else:
            continue
        s1 = _isqrt_exact(s1sq)
        if s1 is None:
            continue
        for sign in {1, -1}:
            a = sign * s1
            if a == 0:
                if P == 0:
                    zero_s1.add(s2)
                continue
            if P % a:
                continue
            sigma_pairs.add((a, s2, P // a))
    triples: set[tuple[int, int, int]] = set()
    for s1, s2, s3 in sigma_pairs:
        roots = _cubic_integer_roots(s1, s2, s3)
        if roots is not None:
            triples.add(triple_orbit(roots))
    for s2 in zero_s1:
        triples.update(_sigma_zero_triples(s2))
    return {t for t in triples if classical_invariants_from_alphas(*t) == ci}


# -- Jupp's congruence ------------------------------------------------------


@dataclass(frozen=True)
class JuppResult:
    admissible: bool
    exhaustive: bool
    counterexample: tuple[int, ...] | None = None

    def as_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "exhaustive": self.exhaustive,
            "counterexample": list(self.counterexample) if self.counterexample else None,
        }


JUPP_EXHAUSTIVE_MAX_RANK = 5


def _jupp_defect(s: InvariantSystem, W: Sequence[int]) -> int:
    return (s.cubic(W) - s.linear(W)) % 48


def jupp_check(s: InvariantSystem, samples: int = 20000, seed: int = 0) -> JuppResult:
    """Decide ``mu(W) = p(W) mod 48`` for all lifts ``W`` of ``w``.

    Writing ``W = W0 + 2x`` with ``W0`` the 0/1 lift, the defect modulo 16 is
    periodic with period 8 in every coordinate of ``x`` (the cubic expansion
    has coefficients 6, 12, 8 and the linear part 2), and modulo 3 with
    period 3.  By the Chinese remainder theorem checking ``x`` over
    ``(Z/8)^n`` for the residue mod 16 and over ``(Z/3)^n`` for the residue
    mod 3 is equivalent to checking the period-24 box.  Above rank
    ``JUPP_EXHAUSTIVE_MAX_RANK`` a seeded random sample is used instead and
    the result is flagged as non-exhaustive.
    """
    if s.k != 1:
        raise ValueError("Jupp's congruence is stated for k = 1")
    n = s.n
    w0 = list(s.w)
    if n == 0:
        return JuppResult(True, True)

    def lift(x):
        return tuple(a + 2 * b for a, b in zip(w0, x))

    if n <= JUPP_EXHAUSTIVE_MAX_RANK:
        for modulus, period in ((16, 8), (3, 3)):
            for x in product(range(period), repeat=n):
                W = lift(x)
                if (s.cubic(W) - s.linear(W)) % modulus:
                    return JuppResult(False, True, W)
        return JuppResult(True, True)
    rng = random.Random(seed)
    for _ in range(samples):
        W = lift([rng.randrange(24) for _ in range(n)])
        if _jupp_defect(s, W):
            return JuppResult(False, False, W)
    return JuppResult(True, False)


def jupp_admissible(s: InvariantSystem) -> bool:
    return jupp_check(s).admissible


# -- witness searches -------------------------------------------------------


def verify_witness(s1: InvariantSystem, s2: InvariantSystem, phi: IntMatrix) -> bool:
    """Exact check that ``phi`` is an equivalence from ``s1`` to ``s2``."""
    n = s1.n
    if s2.n != n or phi.rows != n or phi.cols != n or s1.k != s2.k:
        return False
    if n == 0:
        return True
    if abs(determinant(phi)) != 1:
        return False
    cols = [list(phi.T.row(j)) for j in range(n)]
    for a in range(n):
        for b in range(a, n):
            for c in range(b, n):
                if s2.evaluate(cols[a], cols[b], cols[c]) != s1.value(a, b, c):
                    return False
    if any(s2.linear(cols[j]) != s1.p[j] for j in range(n)):
        return False
    image = [sum(cols[j][i] for j in range(n) if s1.w[j]) % 2 for i in range(n)]
    return tuple(image) == s2.w


def _ordered_box(n: int, bound: int):
    vecs = list(product(range(-bound, bound + 1), repeat=n))
    vecs.sort(key=lambda v: (max(map(abs, v)), sum(map(abs, v)), v))
    return vecs


def _search(s1: InvariantSystem, s2: InvariantSystem, vectors, m: int | None):
    """Backtracking over columns; ``m`` is a modulus or None for exact integers."""
    n = s1.n
    red = (lambda x: x % m) if m else (lambda x: x)
    t2 = s2.dense
    p2 = s2.p

    def mu2(x, y, z):
        total = 0
        for i in range(n):
            if not x[i]:
                continue
            for j in range(n):
                if not y[j]:
                    continue
                row = t2[i][j]
                total += x[i] * y[j] * sum(row[l] * z[l] for l in range(n))
        return total

    cands = []
    for i in range(n):
        target_c = red(s1.value(i, i, i))
        target_p = red(s1.p[i])
        cands.append(
            [v for v in vectors if red(sum(a * b for a, b in zip(p2, v))) == target_p and red(mu2(v, v, v)) == target_c]
        )
    cols: list = []

    def check_det(cols_) -> bool:
        mat = IntMatrix.from_rows([[cols_[j][i] for j in range(n)] for i in range(n)])
        d = determinant(mat)
        if m:
            return gcd(d % m, m) == 1
        return abs(d) == 1

    def extendable(cols_) -> bool:
        # columns extend to an invertible matrix iff their maximal minors are coprime (to m)
        k = len(cols_)
        g = 0
        for rows in combinations(range(n), k):
            g = gcd(g, determinant(IntMatrix.from_rows([[cols_[j][r] for j in range(k)] for r in rows])))
            if g == 1:
                return True
        return gcd(g, m) == 1 if m else g == 1

    def w_ok(cols_) -> bool:
        if m is not None and m % 2:
            return True
        image = tuple(sum(cols_[j][i] for j in range(n) if s1.w[j]) % 2 for i in range(n))
        return image == s2.w

    def rec(i: int):
        if i == n:
            if check_det(cols) and w_ok(cols):
                return [list(c) for c in cols]
            return None
        for v in cands[i]:
            ok = True
            for j in range(i):
                cj = cols[j]
                if red(mu2(cj, cj, v)) != red(s1.value(j, j, i)) or red(mu2(cj, v, v)) != red(s1.value(j, i, i)):
                    ok = False
                    break
                for l in range(j + 1, i):
                    if red(mu2(cj, cols[l], v)) != red(s1.value(j, l, i)):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            cols.append(v)
            if extendable(cols):
                found = rec(i + 1)
                if found is not None:
                    return found
            cols.pop()
        return None

    found = rec(0)
    if found is None:
        return None
    return IntMatrix.from_rows([[found[j][i] for j in range(n)] for i in range(n)])


def unimodular_witness_search(s1: InvariantSystem, s2: InvariantSystem, bound: int = 10) -> IntMatrix | None:
    """First equivalence ``s1 -> s2`` with entries in ``[-bound, bound]``.

    Columns are chosen by backtracking; candidates for each column are
    ordered by max-norm, then 1-norm, then lexicographically, so the result is
    deterministic and small witnesses are found first.  Rank at most 3.
    """
    if s1.n != s2.n or s1.k != s2.k:
        raise ValueError("systems must have equal rank and k")
    if s1.n > 3:
        raise ValueError("witness search supports rank <= 3")
    if bound < 1:
        raise ValueError("bound must be positive")
    if s1.n == 0:
        return IntMatrix(0, 0, ())
    return _search(s1, s2, _ordered_box(s1.n, bound), None)


def mod_m_equivalence(s1: InvariantSystem, s2: InvariantSystem, m: int) -> bool:
    """Whether some matrix over Z/m with unit determinant transports the data mod m.

    The mod-2 class is only compared when ``m`` is even.  A False result
    certifies inequivalence over the integers.
    """
    if s1.n != s2.n or s1.k != s2.k:
        raise ValueError("systems must have equal rank and k")
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if s1.n > 3 or (s1.n == 3 and m > 3):
        raise ValueError("mod-m search supports rank <= 2, or rank 3 with m <= 3")
    if s1.n == 0:
        return True
    return _search(s1, s2, list(product(range(m), repeat=s1.n)), m) is not None


# -- decision ladder --------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceVerdict:
    tag: str  # "equivalent" | "inequivalent" | "unknown"
    witness: IntMatrix | None = None
    certificate: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "verdict": self.tag,
            "witness": self.witness.to_rows() if self.witness is not None else None,
            "certificate": self.certificate,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), separators=(",", ":"), sort_keys=True)


DEFAULT_MODULI = tuple(range(2, 65))


def smith_p(s: InvariantSystem) -> list[int]:
    return smith_invariant_factors(IntMatrix(1, s.n, s.p)) if s.n else []


def fingerprint(s: InvariantSystem) -> dict:
    """Basis-independent data: rank, spin flag, p content, mu radical, and more at rank <= 2."""
    fp = {
        "rank": s.n,
        "spin": s.is_spin,
        "smith_p": smith_p(s),
        "radical_rank": radical_rank(s),
    }
    if s.n == 1:
        fp["abs_mu"] = abs(s.value(0, 0, 0))
    if s.n == 2 and s.is_spin:
        fp["classical"] = classical_invariants_general(BinaryFormPair.from_system(s)).as_dict()
    return fp


def _inverse(phi: IntMatrix) -> IntMatrix:
    return inverse_unimodular(phi)


def _bidirectional(s1, s2, bound):
    phi = unimodular_witness_search(s1, s2, bound)
    if phi is not None:
        return phi
    back = unimodular_witness_search(s2, s1, bound)
    if back is not None:
        return _inverse(back)
    return None


def _to_first_axis(p: Sequence[int]) -> IntMatrix:
    """Unimodular ``U`` with ``p(U e1) = gcd(p)`` and ``p(U e2) = 0`` (rank 2)."""
    a, b = p
    g = gcd(a, b)
    x0, y0, x1, y1 = 1, 0, 0, 1
    r0, r1 = a, b
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if r0 < 0:
        x0, y0 = -x0, -y0
    return IntMatrix.from_rows([[x0, -b // g], [y0, a // g]])


def rank2_exact_witness(s1: InvariantSystem, s2: InvariantSystem) -> IntMatrix | None:
    """Exact equivalence test for rank-2 systems with nonzero linear form.

    After moving both linear forms to ``(g, 0)``, any equivalence has the
    shape ``[[1, 0], [c, d]]`` with ``d = +-1``; the four cubic equations pin
    ``c`` down to at most a handful of candidates (or leave it free, in which
    case its parity is all that matters for ``w``).  Returns a witness or
    None, and None is a proof of inequivalence.
    """
    if s1.n != 2 or s2.n != 2 or s1.k != s2.k:
        raise ValueError("need two rank-2 systems with equal k")
    if not any(s1.p) or not any(s2.p):
        raise ValueError("linear forms must be nonzero")
    if gcd(*s1.p) != gcd(*s2.p):
        return None
    u1 = _to_first_axis(s1.p)
    u2 = _to_first_axis(s2.p)
    t1 = s1.pullback(u1)
    t2 = s2.pullback(u2)
    A = lambda i, j, l: t1.value(i, j, l)  # noqa: E731
    T = lambda i, j, l: t2.value(i, j, l)  # noqa: E731
    for d in (1, -1):
        if d * T(1, 1, 1) != A(1, 1, 1):
            continue
        if T(1, 1, 1):
            num = A(0, 1, 1) - T(0, 1, 1)
            cs = [num // T(1, 1, 1)] if num % T(1, 1, 1) == 0 else []
        elif T(0, 1, 1):
            num = d * A(0, 0, 1) - T(0, 0, 1)
            cs = [num // (2 * T(0, 1, 1))] if num % (2 * T(0, 1, 1)) == 0 else []
        elif T(0, 0, 1):
            num = A(0, 0, 0) - T(0, 0, 0)
            cs = [num // (3 * T(0, 0, 1))] if num % (3 * T(0, 0, 1)) == 0 else []
        else:
            cs = [0, 1]
        for c in cs:
            psi = IntMatrix.from_rows([[1, 0], [c, d]])
            if verify_witness(t1, t2, psi):
                phi = u2 @ psi @ inverse_unimodular(u1)
                assert verify_witness(s1, s2, phi)
                return phi
    return None


def decide_equivalence(
    s1: InvariantSystem,
    s2: InvariantSystem,
    bound: int = 10,
    moduli: Iterable[int] = DEFAULT_MODULI,
) -> EquivalenceVerdict:
    """Equivalent (with witness), Inequivalent (with certificate) or Unknown."""
    if s1.k != s2.k:
        raise ValueError(f"k mismatch: {s1.k} vs {s2.k}")
    for name, a, b in (
        ("rank", s1.n, s2.n),
        ("spin", s1.is_spin, s2.is_spin),
        ("smith_p", smith_p(s1), smith_p(s2)),
        ("radical_rank", radical_rank(s1), radical_rank(s2)),
    ):
        if a != b:
            return EquivalenceVerdict("inequivalent", certificate={"differing": name, "values": [a, b]})
    n = s1.n
    if n == 0:
        return EquivalenceVerdict("equivalent", IntMatrix(0, 0, ()), {"method": "empty"})
    if n == 1:
        for e in (1, -1):
            phi = IntMatrix(1, 1, (e,))
            if verify_witness(s1, s2, phi):
                return EquivalenceVerdict("equivalent", phi, {"method": "rank1"})
        return EquivalenceVerdict(
            "inequivalent", certificate={"differing": "rank1_form", "values": [s1.value(0, 0, 0), s2.value(0, 0, 0)]}
        )
    if n == 2 and s1.is_spin:
        c1 = classical_invariants_general(BinaryFormPair.from_system(s1))
        c2 = classical_invariants_general(BinaryFormPair.from_system(s2))
        for name in ("D", "R2", "I", "J"):
            a, b = getattr(c1, name), getattr(c2, name)
            if a != b:
                return EquivalenceVerdict(
                    "inequivalent",
                    certificate={"differing": f"classical_invariant_{name}", "values": [str(a), str(b)]},
                )
    if n <= 3:
        phi = _bidirectional(s1, s2, bound)
        if phi is not None:
            return EquivalenceVerdict("equivalent", phi, {"method": "witness_search", "bound": bound})
        for m in moduli:
            if n == 3 and m > 3:
                continue
            if not mod_m_equivalence(s1, s2, m):
                return EquivalenceVerdict("inequivalent", certificate={"differing": "mod_m", "modulus": m})
    if n == 2 and any(s1.p):
        phi = rank2_exact_witness(s1, s2)
        if phi is not None:
            return EquivalenceVerdict("equivalent", phi, {"method": "linear_form_stabilizer"})
        return EquivalenceVerdict("inequivalent", certificate={"differing": "linear_form_stabilizer"})
    return EquivalenceVerdict("unknown", certificate={"bound": bound, "moduli": list(moduli)})
