"""Algebraic plumbing graphs: the data type, its text format and canonical forms.

A graph has two vertex classes.  U-vertices carry a label
``(alpha, kplus, kminus)`` with ``kplus, kminus >= 0``; V-vertices ("dots")
are unlabeled.  Edges only join a U-vertex to a V-vertex and form a set.

Text format, one declaration per line::

    # comment
    u a alpha=5 kplus=2 kminus=7
    v b
    e a b

Missing attributes default to 0.  A line ``k N`` is accepted as an advisory
default for the dimension parameter; it never takes part in graph equality.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "UVertex",
    "PlumbingGraph",
    "GraphParseError",
    "NotATreeError",
    "ComponentReport",
    "GraphReport",
    "ReducedClass",
    "parse",
    "serialize",
    "validate",
    "negate_component",
    "canonical_reduced_class",
    "export_dot",
]


class GraphParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NotATreeError(ValueError):
    """An operation that needs simply-connected components met a cycle."""


@dataclass(frozen=True)
class UVertex:
    id: str
    alpha: int = 0
    kplus: int = 0
    kminus: int = 0

    def __post_init__(self) -> None:
        if self.kplus < 0 or self.kminus < 0:
            raise ValueError(f"vertex {self.id}: kplus/kminus must be non-negative")

    @property
    def is_spin(self) -> bool:
        return self.kplus == 0 and self.kminus == 0

    @property
    def is_zero(self) -> bool:
        return self.alpha == 0 and self.is_spin

    def negated(self) -> UVertex:
        return UVertex(self.id, -self.alpha, self.kminus, self.kplus)


_ID = re.compile(r"[A-Za-z0-9_]+\Z")


@dataclass(frozen=True)
class PlumbingGraph:
    """Labeled bipartite graph; immutable.

    ``edges`` keeps its construction order (for faithful round trips) but is
    validated to be a set of distinct ``(u_id, v_id)`` pairs.
    """

    u_vertices: tuple[UVertex, ...] = ()
    v_vertices: tuple[str, ...] = ()
    edges: tuple[tuple[str, str], ...] = ()
    k_hint: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "u_vertices", tuple(self.u_vertices))
        object.__setattr__(self, "v_vertices", tuple(self.v_vertices))
        object.__setattr__(self, "edges", tuple((str(a), str(b)) for a, b in self.edges))
        seen: set[str] = set()
        for vid in [u.id for u in self.u_vertices] + list(self.v_vertices):
            if vid in seen:
                raise ValueError(f"duplicate vertex id {vid!r}")
            seen.add(vid)
        us = {u.id for u in self.u_vertices}
        vs = set(self.v_vertices)
        es: set[tuple[str, str]] = set()
        for a, b in self.edges:
            if a not in us or b not in vs:
                raise ValueError(f"edge ({a}, {b}) must join a declared U-vertex to a declared V-vertex")
            if (a, b) in es:
                raise ValueError(f"duplicate edge ({a}, {b})")
            es.add((a, b))

    # -- lookups -----------------------------------------------------------

    @property
    def u_ids(self) -> tuple[str, ...]:
        return tuple(u.id for u in self.u_vertices)

    def u(self, uid: str) -> UVertex:
        for u in self.u_vertices:
            if u.id == uid:
                return u
        raise KeyError(uid)

    def is_u(self, vid: str) -> bool:
        return any(u.id == vid for u in self.u_vertices)

    def adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {u.id: [] for u in self.u_vertices}
        adj.update({v: [] for v in self.v_vertices})
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def degree(self, vid: str) -> int:
        return sum(1 for a, b in self.edges if vid in (a, b))

    def components(self) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
        """Connected components as ``(u_ids, v_ids)`` in first-appearance order.

        Vertices are scanned U-vertices first, then dots, each in declaration
        order; ids inside a component keep declaration order.
        """
        adj = self.adjacency()
        order = {vid: i for i, vid in enumerate(list(self.u_ids) + list(self.v_vertices))}
        seen: set[str] = set()
        out = []
        for start in order:
            if start in seen:
                continue
            stack, comp = [start], []
            seen.add(start)
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            comp.sort(key=order.__getitem__)
            us = tuple(x for x in comp if order[x] < len(self.u_vertices))
            vs = tuple(x for x in comp if order[x] >= len(self.u_vertices))
            out.append((us, vs))
        return out

    def is_forest(self) -> bool:
        return all(
            len(self.induced(us, vs).edges) == len(us) + len(vs) - 1
            for us, vs in self.components()
        )

    # -- construction helpers ---------------------------------------------

    def induced(self, u_ids: Iterable[str], v_ids: Iterable[str]) -> PlumbingGraph:
        us, vs = set(u_ids), set(v_ids)
        return PlumbingGraph(
            tuple(u for u in self.u_vertices if u.id in us),
            tuple(v for v in self.v_vertices if v in vs),
            tuple(e for e in self.edges if e[0] in us and e[1] in vs),
        )

    def without(self, ids: Iterable[str]) -> PlumbingGraph:
        drop = set(ids)
        return PlumbingGraph(
            tuple(u for u in self.u_vertices if u.id not in drop),
            tuple(v for v in self.v_vertices if v not in drop),
            tuple(e for e in self.edges if e[0] not in drop and e[1] not in drop),
            k_hint=self.k_hint,
        )

    def relabeled(self, mapping: Mapping[str, str]) -> PlumbingGraph:
        m = lambda x: mapping.get(x, x)  # noqa: E731
        return PlumbingGraph(
            tuple(replace(u, id=m(u.id)) for u in self.u_vertices),
            tuple(m(v) for v in self.v_vertices),
            tuple((m(a), m(b)) for a, b in self.edges),
            k_hint=self.k_hint,
        )

    def negated_vertices(self, u_ids: Iterable[str]) -> PlumbingGraph:
        flip = set(u_ids)
        return replace(
            self,
            u_vertices=tuple(u.negated() if u.id in flip else u for u in self.u_vertices),
        )

    def fresh_id(self, prefix: str) -> str:
        taken = set(self.u_ids) | set(self.v_vertices)
        i = 0
        while f"{prefix}{i}" in taken:
            i += 1
        return f"{prefix}{i}"

    def is_spin(self) -> bool:
        return all(u.is_spin for u in self.u_vertices)


def disjoint_union(graphs: Sequence[PlumbingGraph]) -> PlumbingGraph:
    return PlumbingGraph(
        tuple(u for g in graphs for u in g.u_vertices),
        tuple(v for g in graphs for v in g.v_vertices),
        tuple(e for g in graphs for e in g.edges),
    )


# -- text format ----------------------------------------------------------

_ATTRS = ("alpha", "kplus", "kminus")


def _tokens(line: str) -> Iterator[tuple[int, str]]:
    for m in re.finditer(r"\S+", line):
        yield m.start() + 1, m.group()


def parse(text: str | bytes) -> PlumbingGraph:
    """Parse the line-oriented graph format; raises GraphParseError."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    u_vertices: list[UVertex] = []
    v_vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    kind: dict[str, str] = {}
    edge_set: set[tuple[str, str]] = set()
    k_hint = None

    def check_id(tok: str, ln: int, col: int) -> str:
        if not _ID.match(tok):
            raise GraphParseError(f"invalid id {tok!r}", ln, col)
        return tok

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = list(_tokens(line))
        if not toks:
            continue
        col, head = toks[0]
        rest = toks[1:]
        if head == "u":
            if not rest:
                raise GraphParseError("missing id after 'u'", ln, col + 1)
            c, uid = rest[0]
            check_id(uid, ln, c)
            if uid in kind:
                raise GraphParseError(f"duplicate id {uid!r}", ln, c)
            vals = {"alpha": 0, "kplus": 0, "kminus": 0}
            expected = list(_ATTRS)
            for c, tok in rest[1:]:
                key, eq, val = tok.partition("=")
                if not eq or key not in expected:
                    raise GraphParseError(f"unexpected attribute {tok!r}", ln, c)
                expected = expected[expected.index(key) + 1 :]
                pattern = r"[+-]?\d+\Z" if key == "alpha" else r"\d+\Z"
                if not re.match(pattern, val):
                    if key != "alpha" and re.match(r"-\d+\Z", val):
                        raise GraphParseError(f"{key} must be non-negative", ln, c)
                    raise GraphParseError(f"malformed integer in {tok!r}", ln, c)
                vals[key] = int(val)
            u_vertices.append(UVertex(uid, vals["alpha"], vals["kplus"], vals["kminus"]))
            kind[uid] = "u"
        elif head == "v":
            if len(rest) != 1:
                raise GraphParseError("expected 'v ID'", ln, col)
            c, vid = rest[0]
            check_id(vid, ln, c)
            if vid in kind:
                raise GraphParseError(f"duplicate id {vid!r}", ln, c)
            v_vertices.append(vid)
            kind[vid] = "v"
        elif head == "e":
            if len(rest) != 2:
                raise GraphParseError("expected 'e U_ID V_ID'", ln, col)
            (c1, a), (c2, b) = rest
            check_id(a, ln, c1)
            check_id(b, ln, c2)
            if kind.get(a) != "u":
                raise GraphParseError(f"unknown U-vertex {a!r}", ln, c1)
            if kind.get(b) != "v":
                raise GraphParseError(f"unknown V-vertex {b!r}", ln, c2)
            if (a, b) in edge_set:
                raise GraphParseError(f"duplicate edge {a} {b}", ln, col)
            edge_set.add((a, b))
            edges.append((a, b))
        elif head == "k":
            if len(rest) != 1 or not re.match(r"\d+\Z", rest[0][1]) or int(rest[0][1]) < 1:
                raise GraphParseError("expected 'k N' with N >= 1", ln, col)
            k_hint = int(rest[0][1])
        else:
            raise GraphParseError(f"unknown declaration {head!r}", ln, col)
    return PlumbingGraph(tuple(u_vertices), tuple(v_vertices), tuple(edges), k_hint=k_hint)


def serialize(g: PlumbingGraph) -> str:
    """Canonical text form; attributes equal to 0 are omitted."""
    lines = []
    if g.k_hint is not None:
        lines.append(f"k {g.k_hint}")
    for u in g.u_vertices:
        parts = ["u", u.id]
        parts += [f"{a}={getattr(u, a)}" for a in _ATTRS if getattr(u, a)]
        lines.append(" ".join(parts))
    lines += [f"v {v}" for v in g.v_vertices]
    lines += [f"e {a} {b}" for a, b in g.edges]
    return "".join(line + "\n" for line in lines)


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class ComponentReport:
    index: int
    u_ids: tuple[str, ...]
    v_ids: tuple[str, ...]
    n_edges: int
    simply_connected: bool
    independent_cycles: int
    max_degree: int
    leaf_dots: int
    spin: bool


@dataclass(frozen=True)
class GraphReport:
    components: tuple[ComponentReport, ...]

    @property
    def simply_connected(self) -> bool:
        return all(c.simply_connected for c in self.components)

    def as_dict(self) -> dict:
        return {
            "simply_connected": self.simply_connected,
            "components": [
                {
                    "index": c.index,
                    "u": list(c.u_ids),
                    "v": list(c.v_ids),
                    "edges": c.n_edges,
                    "simply_connected": c.simply_connected,
                    "independent_cycles": c.independent_cycles,
                    "max_degree": c.max_degree,
                    "leaf_dots": c.leaf_dots,
                    "spin": c.spin,
                }
                for c in self.components
            ],
        }


def validate(g: PlumbingGraph) -> GraphReport:
    """Per-component structure report; never raises on well-formed graphs."""
    deg: dict[str, int] = defaultdict(int)
    for a, b in g.edges:
        deg[a] += 1
        deg[b] += 1
    reports = []
    for idx, (us, vs) in enumerate(g.components()):
        sub = g.induced(us, vs)
        n_edges = len(sub.edges)
        cycles = n_edges - (len(us) + len(vs)) + 1
        reports.append(
            ComponentReport(
                index=idx,
                u_ids=us,
                v_ids=vs,
                n_edges=n_edges,
                simply_connected=cycles == 0,
                independent_cycles=cycles,
                max_degree=max((deg[x] for x in us + vs), default=0),
                leaf_dots=sum(1 for v in vs if deg[v] == 1),
                spin=sub.is_spin(),
            )
        )
    return GraphReport(tuple(reports))


def negate_component(g: PlumbingGraph, c: int) -> PlumbingGraph:
    """Replace alpha by -alpha and swap (kplus, kminus) on component ``c``."""
    comps = g.components()
    if not 0 <= c < len(comps):
        raise IndexError(f"component index {c} out of range (graph has {len(comps)})")
    return g.negated_vertices(comps[c][0])


# -- canonical forms ------------------------------------------------------


def _label(g: PlumbingGraph, vid: str, sign: int, ulabels: Mapping[str, UVertex]) -> str:
    u = ulabels.get(vid)
    if u is None:
        return "v"
    if sign < 0:
        u = u.negated()
    return f"u{u.alpha},{u.kplus},{u.kminus}"


def rooted_encoding(
    g: PlumbingGraph,
    root: str,
    parent: str | None = None,
    sign: int = 1,
    adj: Mapping[str, Sequence[str]] | None = None,
) -> str:
    """AHU string of the subtree at ``root`` hanging away from ``parent``.

    Labels are embedded, children sorted, so two rooted labeled trees get
    equal strings iff they are isomorphic.  ``sign=-1`` encodes the negated
    labels.
    """
    adj = adj if adj is not None else g.adjacency()
    ulabels = {u.id: u for u in g.u_vertices}
    out: list[str] = []

    def enc(x: str, par: str | None) -> str:
        kids = sorted(enc(y, x) for y in adj[x] if y != par)
        return "(" + _label(g, x, sign, ulabels) + "".join(kids) + ")"

    out.append(enc(root, parent))
    return out[0]


def _tree_centers(vertices: Sequence[str], adj: Mapping[str, Sequence[str]]) -> list[str]:
    if len(vertices) <= 2:
        return list(vertices)
    deg = {x: len(adj[x]) for x in vertices}
    layer = [x for x in vertices if deg[x] <= 1]
    remaining = len(vertices)
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for x in layer:
            for y in adj[x]:
                deg[y] -= 1
                if deg[y] == 1:
                    nxt.append(y)
        layer = nxt
    return layer


def tree_encoding(g: PlumbingGraph, u_ids: Sequence[str], v_ids: Sequence[str], sign: int = 1) -> str:
    """Center-rooted, lexicographically minimal encoding of one tree component."""
    sub = g.induced(u_ids, v_ids)
    verts = list(u_ids) + list(v_ids)
    if len(sub.edges) != len(verts) - 1:
        raise NotATreeError(f"component containing {verts[0]!r} is not simply-connected")
    adj = sub.adjacency()
    return min(rooted_encoding(sub, c, None, sign, adj) for c in _tree_centers(verts, adj))


@dataclass(frozen=True)
class ReducedClass:
    """Canonical key of a graph's orbit under isomorphism and component signs."""

    canonical_encoding: bytes
    components: tuple[str, ...]

    def __str__(self) -> str:
        return self.canonical_encoding.decode()


def canonical_reduced_class(g: PlumbingGraph) -> ReducedClass:
    """Encoding invariant under relabeling, component order and component signs."""
    parts = []
    for us, vs in g.components():
        parts.append(min(tree_encoding(g, us, vs, 1), tree_encoding(g, us, vs, -1)))
    parts.sort()
    return ReducedClass("|".join(parts).encode(), tuple(parts))


# -- export -----------------------------------------------------------------


def export_dot(g: PlumbingGraph) -> str:
    """Undirected DOT document; U-vertices labeled ``alpha [k+,k-]``."""
    lines = ["graph G {"]
    for u in g.u_vertices:
        lines.append(f'  "{u.id}" [shape=circle, label="{u.alpha} [{u.kplus},{u.kminus}]"];')
    for v in g.v_vertices:
        lines.append(f'  "{v}" [shape=point];')
    for a, b in g.edges:
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
