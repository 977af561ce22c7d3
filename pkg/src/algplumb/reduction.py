"""Equivalence-preserving rewriting moves and normalization to reduced form.

Moves (locations are vertex ids in the graph the move applies to):

* ``M1``  ``(u, v)``: ``v`` is a leaf dot of ``u = (alpha, a, b)``.  Deletes
  ``u``, ``v`` and every other edge at ``u``; adds ``a + b`` components
  ``dot - 0^(1)``.
* ``M1'`` ``(u, v)``: spin ``u`` with ``alpha = 0`` is a leaf on dot ``v``.
  Deletes both.
* ``M2``  ``(v, u, u')``: ``v`` is a dot of degree 2 between ``u`` and ``u'``.
  Merges them into ``(alpha - alpha', a + b', b + a')`` and negates the
  branches hanging off ``u'``.
* ``M2'`` ``(u, v, v')``: spin ``u`` with ``alpha = 0`` has degree 2 between
  dots ``v`` and ``v'``.  Deletes ``u``, fuses ``v'`` into ``v`` and negates
  the branches hanging off ``v'``.
* ``M3``  ``(v,)``: deletes the isolated dot ``v``.
* ``M3'`` ``(u, v)``: turns a component ``v - 0^(1)`` into the isolated
  vertex ``0`` when some other component is not spin.
* ``M4``  ``(u,)``: negates the component containing ``u`` (components
  without U-vertices are skipped, negation fixes them).

For ``M2`` and ``M2'`` the negated side is the one whose branch has the larger
canonical encoding, ties broken by the larger id.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field, replace
from typing import Sequence

from .graph import (
    NotATreeError,
    PlumbingGraph,
    UVertex,
    negate_component,
    rooted_encoding,
    serialize,
)

__all__ = [
    "Move",
    "MoveError",
    "ReductionTrace",
    "applicable_moves",
    "apply_move",
    "is_reduced",
    "reduce",
    "replay",
    "graph_hash",
]

KINDS = ("M1", "M1'", "M2", "M2'", "M3", "M3'", "M4")


class MoveError(ValueError):
    """The move does not match the graph."""


@dataclass(frozen=True)
class Move:
    kind: str
    location: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown move kind {self.kind!r}")
        object.__setattr__(self, "location", tuple(self.location))

    def as_dict(self) -> dict:
        return {"kind": self.kind, "location": list(self.location)}


def graph_hash(g: PlumbingGraph) -> str:
    return hashlib.sha256(serialize(replace(g, k_hint=None)).encode()).hexdigest()


@dataclass(frozen=True)
class ReductionTrace:
    input_hash: str
    k: int
    steps: tuple[tuple[Move, str], ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "input_hash": self.input_hash,
            "k": self.k,
            "steps": [dict(m.as_dict(), hash=h) for m, h in self.steps],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d) -> ReductionTrace:
        return cls(
            d["input_hash"],
            int(d["k"]),
            tuple((Move(s["kind"], tuple(s["location"])), s["hash"]) for s in d["steps"]),
        )


# -- pattern helpers ------------------------------------------------------


def _require_forest(g: PlumbingGraph) -> None:
    if not g.is_forest():
        raise NotATreeError("reduction moves need every component to be simply-connected")


def _is_trivial_label(u: UVertex) -> bool:
    return u.alpha == 0 and (u.kplus, u.kminus) in ((1, 0), (0, 1))


def _trivial_components(g: PlumbingGraph) -> list[tuple[str, str]]:
    """Components of the form ``dot - 0^(1)`` (either sign), as ``(u, v)``."""
    out = []
    for us, vs in g.components():
        if len(us) == 1 and len(vs) == 1 and _is_trivial_label(g.u(us[0])) and g.degree(us[0]) == 1:
            out.append((us[0], vs[0]))
    return out


def _component_is_spin(g: PlumbingGraph, us: Sequence[str]) -> bool:
    return all(g.u(x).is_spin for x in us)


def _branch_u_ids(adj, root: str, parent: str) -> list[str]:
    """All vertices reachable from ``root`` without passing through ``parent``."""
    seen = {root, parent}
    stack, out = [root], [root]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                out.append(y)
                stack.append(y)
    return out


def _pick_negated(g: PlumbingGraph, adj, center: str, a: str, b: str) -> tuple[str, str]:
    """Return ``(keep, negate)`` among the two neighbors of ``center``."""
    ea = rooted_encoding(g, a, center, 1, adj)
    eb = rooted_encoding(g, b, center, 1, adj)
    if (ea, a) > (eb, b):
        return b, a
    return a, b


def applicable_moves(g: PlumbingGraph) -> list[Move]:
    """Every pattern match, grouped by kind in the order M1, M1', M2, M2', M3, M3', M4."""
    _require_forest(g)
    adj = g.adjacency()
    moves: list[Move] = []
    for u in g.u_vertices:
        for v in adj[u.id]:
            if len(adj[v]) == 1:
                moves.append(Move("M1", (u.id, v)))
    for u in g.u_vertices:
        if u.is_zero and len(adj[u.id]) == 1:
            moves.append(Move("M1'", (u.id, adj[u.id][0])))
    for v in g.v_vertices:
        if len(adj[v]) == 2:
            keep, neg = _pick_negated(g, adj, v, *adj[v])
            moves.append(Move("M2", (v, keep, neg)))
    for u in g.u_vertices:
        if u.is_zero and len(adj[u.id]) == 2:
            keep, neg = _pick_negated(g, adj, u.id, *adj[u.id])
            moves.append(Move("M2'", (u.id, keep, neg)))
    for v in g.v_vertices:
        if not adj[v]:
            moves.append(Move("M3", (v,)))
    comps = g.components()
    trivial = _trivial_components(g)
    for tu, tv in trivial:
        others_non_spin = any(
            not _component_is_spin(g, us) for us, vs in comps if tu not in us
        )
        if others_non_spin:
            moves.append(Move("M3'", (tu, tv)))
    for us, vs in comps:
        if us:  # negating a lone dot is the identity
            moves.append(Move("M4", (us[0],)))
    return moves


def apply_move(g: PlumbingGraph, m: Move) -> PlumbingGraph:
    """Apply one move; raises MoveError if it does not match ``g``."""
    if m not in applicable_moves(g):
        raise MoveError(f"{m.kind} at {m.location} does not match the graph")
    adj = g.adjacency()
    if m.kind == "M1":
        u_id, v = m.location
        u = g.u(u_id)
        out = g.without([u_id, v])
        for _ in range(u.kplus + u.kminus):
            nu = out.fresh_id("t")
            out = _add(out, UVertex(nu, 0, 1, 0), None)
            nv = out.fresh_id("s")
            out = _add(out, None, nv, [(nu, nv)])
        return out
    if m.kind == "M1'":
        return g.without(m.location)
    if m.kind == "M2":
        v, keep, neg = m.location
        branch = _branch_u_ids(adj, neg, v)
        flipped = g.negated_vertices([x for x in branch if x != neg])
        a, b = g.u(keep), g.u(neg)
        merged = UVertex(keep, a.alpha - b.alpha, a.kplus + b.kminus, a.kminus + b.kplus)
        u_vertices = tuple(merged if x.id == keep else x for x in flipped.u_vertices if x.id != neg)
        edges = []
        for e in flipped.edges:
            if v in e:
                continue
            if e[0] == neg:
                e = (keep, e[1])
            edges.append(e)
        return PlumbingGraph(
            u_vertices,
            tuple(x for x in g.v_vertices if x != v),
            tuple(edges),
            k_hint=g.k_hint,
        )
    if m.kind == "M2'":
        u_id, keep, neg = m.location
        branch = _branch_u_ids(adj, neg, u_id)
        flipped = g.negated_vertices([x for x in branch if g.is_u(x)])
        edges = []
        for e in flipped.edges:
            if e[0] == u_id:
                continue
            if e[1] == neg:
                e = (e[0], keep)
            edges.append(e)
        return PlumbingGraph(
            tuple(x for x in flipped.u_vertices if x.id != u_id),
            tuple(x for x in g.v_vertices if x != neg),
            tuple(edges),
            k_hint=g.k_hint,
        )
    if m.kind == "M3":
        return g.without(m.location)
    if m.kind == "M3'":
        u_id, v = m.location
        out = g.without([v])
        return replace(out, u_vertices=tuple(UVertex(u_id) if x.id == u_id else x for x in out.u_vertices))
    # M4
    (anchor,) = m.location
    idx = next(i for i, (us, vs) in enumerate(g.components()) if anchor in us or anchor in vs)
    return negate_component(g, idx)


def _add(g: PlumbingGraph, u: UVertex | None, v: str | None, edges=()) -> PlumbingGraph:
    return PlumbingGraph(
        g.u_vertices + ((u,) if u else ()),
        g.v_vertices + ((v,) if v else ()),
        g.edges + tuple(edges),
        k_hint=g.k_hint,
    )


def is_reduced(g: PlumbingGraph) -> bool:
    """Reduced-graph conditions: forest, dot degrees >= 3, no degree 1/2 zero vertices.

    The exceptional component ``dot - 0^(1)`` is accepted in either sign
    (``kplus = 1`` or ``kminus = 1``) since reduced classes are closed under
    negation.
    """
    if not g.is_forest():
        return False
    adj = g.adjacency()
    comps = g.components()
    trivial = _trivial_components(g)
    trivial_dots = {v for _, v in trivial}
    if trivial:
        non_spin = [us for us, vs in comps if not _component_is_spin(g, us)]
        if len(non_spin) != 1:
            return False
    for v in g.v_vertices:
        if v not in trivial_dots and len(adj[v]) < 3:
            return False
    for u in g.u_vertices:
        if u.is_zero and len(adj[u.id]) in (1, 2):
            return False
    return True


def _measure(g: PlumbingGraph) -> tuple[int, int, int]:
    trivial = _trivial_components(g)
    t_dots = {v for _, v in trivial}
    t_us = {u for u, _ in trivial}
    edges = sum(1 for a, _ in g.edges if a not in t_us)
    dots = sum(1 for v in g.v_vertices if v not in t_dots)
    return edges, dots, len(trivial)


_PHASES = (("M3",), ("M1",), ("M1'",), ("M2", "M2'"), ("M3'",))


def _next_move(g: PlumbingGraph, rng: random.Random | None) -> Move | None:
    moves = applicable_moves(g)
    trivial_us = {u for u, _ in _trivial_components(g)}
    for kinds in _PHASES:
        cands = [m for m in moves if m.kind in kinds]
        if "M1" in kinds:
            # M1 on an exceptional component reproduces it; never useful
            cands = [m for m in cands if m.location[0] not in trivial_us]
        if cands:
            return rng.choice(cands) if rng is not None else cands[0]
    return None


def reduce(
    g: PlumbingGraph, k: int = 1, rng: random.Random | None = None
) -> tuple[PlumbingGraph, ReductionTrace]:
    """Rewrite ``g`` to a reduced graph; returns it with a replayable trace.

    Phases are tried in the order M3, M1, M1', M2/M2', M3'.  Each applied move
    strictly decreases ``(edges outside exceptional components, dots outside
    them, number of exceptional components)``.  ``rng`` picks among the
    matches within a phase (the default takes the first).  The result is a
    reduced representative of the equivalence class, not a canonical form of
    it.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    _require_forest(g)
    steps: list[tuple[Move, str]] = []
    start = graph_hash(g)
    cur = g
    fuel = _measure(cur)
    while True:
        m = _next_move(cur, rng)
        if m is None:
            break
        cur = apply_move(cur, m)
        new = _measure(cur)
        assert new < fuel, f"non-decreasing measure after {m}"
        fuel = new
        steps.append((m, graph_hash(cur)))
    assert is_reduced(cur)
    return cur, ReductionTrace(start, k, tuple(steps))


def replay(g: PlumbingGraph, trace: ReductionTrace) -> PlumbingGraph:
    """Re-apply the steps of ``trace``, checking every snapshot hash."""
    if graph_hash(g) != trace.input_hash:
        raise MoveError("trace was recorded for a different input graph")
    cur = g
    for m, h in trace.steps:
        cur = apply_move(cur, m)
        if graph_hash(cur) != h:
            raise MoveError(f"snapshot mismatch after {m.kind} at {m.location}")
    return cur
