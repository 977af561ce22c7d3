"""Command-line front end: ``algplumb SUBCOMMAND ...``.

JSON is the default output (sorted keys, compact separators) so identical
inputs give byte-identical output.  Exit codes: 0 success, 1 domain error,
2 usage error.  ``--k`` on the command line wins over a ``k`` line in the
graph file, which is advisory only.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Sequence

from .atlas import EnumerationBounds, collision_report, enumerate_reduced, to_jsonl
from .forms import ClassicalInvariants, decide_equivalence, jupp_check, recover_triples
from .graph import GraphParseError, PlumbingGraph, canonical_reduced_class, export_dot, parse, serialize, validate
from .invariants import InvariantSystem, graph_rank, invariant_system
from .reduction import reduce
from .topology import (
    betti,
    direct_summand_obstruction,
    family_homotopy_cp3,
    family_s2_bundle_cp2,
    family_theorem_b,
    sphere_bundle_exclusion,
)

__all__ = ["main", "build_parser", "dispatch"]


class DomainError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read_graph(path: str) -> PlumbingGraph:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise DomainError(f"{path}: {e.strerror}") from None
    try:
        return parse(data)
    except GraphParseError as e:
        raise DomainError(f"{path}:{e.line}:{e.column}: {e}") from None
    except UnicodeDecodeError:
        raise DomainError(f"{path}: not UTF-8 text") from None


def _read_system(path: str, k: int) -> InvariantSystem:
    """A graph file, or a JSON invariant system as written by ``invariants``."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise DomainError(f"{path}: {e.strerror}") from None
    if text.lstrip().startswith("{"):
        try:
            return InvariantSystem.from_json(text)
        except (ValueError, KeyError, TypeError) as e:
            raise DomainError(f"{path}: invalid invariant system: {e}") from None
    return invariant_system(_read_graph(path), k)


def _bounds(a) -> EnumerationBounds:
    kw = {}
    if a.max_candidates is not None:
        kw["max_candidates"] = a.max_candidates
    return EnumerationBounds(a.rank_max, a.alpha_max, a.label_sum_max, a.k, a.spin_only, **kw)


# -- subcommands --------------------------------------------------------------


def cmd_validate(a) -> str:
    rep = validate(_read_graph(a.graph))
    if a.format == "text":
        lines = []
        for c in rep.components:
            state = "simply-connected" if c.simply_connected else "not simply-connected"
            lines.append(f"component {c.index + 1}: {state}")
        return "".join(x + "\n" for x in lines)
    return _dump(rep.as_dict())


def cmd_invariants(a) -> str:
    s = invariant_system(_read_graph(a.graph), a.k)
    if a.format == "text":
        d = s.as_dict()
        return f"rank {s.n}\nmu {d['mu']}\nw {d['w']}\np {d['p']}\n"
    return s.to_json() + "\n"


def cmd_rank(a) -> str:
    r = graph_rank(_read_graph(a.graph))
    return f"{r}\n" if a.format == "text" else _dump({"rank": r})


def cmd_reduce(a) -> str:
    g = _read_graph(a.graph)
    rng = random.Random(a.seed) if a.seed is not None else None
    out, trace = reduce(g, a.k, rng)
    if a.format == "text":
        return serialize(out)
    if a.format == "dot":
        return export_dot(out)
    return _dump({"reduced_representative": serialize(out), "trace": trace.as_dict()})


def cmd_canonical(a) -> str:
    g = _read_graph(a.graph)
    if not g.is_forest():
        raise DomainError("canonical encoding needs every component to be simply-connected")
    if a.reduce:
        g, _ = reduce(g, a.k)
    enc = canonical_reduced_class(g).canonical_encoding.decode()
    return enc + "\n" if a.format == "text" else _dump({"encoding": enc})


def cmd_equiv(a) -> str:
    s1 = _read_system(a.a, a.k)
    s2 = _read_system(a.b, a.k)
    v = decide_equivalence(s1, s2, bound=a.bound)
    return v.tag + "\n" if a.format == "text" else v.to_json() + "\n"


def cmd_admissible(a) -> str:
    s = _read_system(a.source, 1)
    if s.k != 1:
        raise DomainError("admissibility is checked at k = 1")
    r = jupp_check(s, samples=a.samples, seed=a.seed)
    if a.format == "text":
        return ("admissible" if r.admissible else "not admissible") + ("" if r.exhaustive else " (sampled)") + "\n"
    return _dump(r.as_dict())


def cmd_betti(a) -> str:
    bv = betti(_read_graph(a.graph), a.k)
    return " ".join(map(str, bv.b)) + "\n" if a.format == "text" else _dump(bv.as_dict())


def cmd_obstructions(a) -> str:
    g = _read_graph(a.graph)
    s = invariant_system(g, a.k)
    rep = sphere_bundle_exclusion(s, betti(g, a.k))
    if a.y:
        m, obs, ok = direct_summand_obstruction(s, a.y)
        rep["direct_summand"] = {"m": m, "observed_rank": obs, "passes": ok}
    if a.format == "text":
        return "fired: " + (", ".join(rep["fired"]) or "none") + "\n"
    return _dump(rep)


def cmd_enumerate(a) -> str:
    b = _bounds(a)
    entries = enumerate_reduced(b, a.parallel)
    if a.format == "text":
        return "".join(e.canonical_encoding.decode() + "\n" for e in entries)
    return to_jsonl(entries, b.k, a.parallel)


def cmd_collisions(a) -> str:
    b = _bounds(a)
    rep = collision_report(b, a.parallel, decide=not a.no_decide, bound=a.bound)
    if a.format == "text":
        lines = []
        for grp in rep:
            tags = ",".join(v["verdict"] for v in grp.get("verdicts", []))
            lines.append(" ~ ".join(grp["members"]) + (f"  [{tags}]" if tags else ""))
        return "".join(x + "\n" for x in lines)
    return "".join(_dump(grp) for grp in rep)


def cmd_recover_triples(a) -> str:
    ci = ClassicalInvariants(a.D, a.R2, a.I, a.J)
    hint = None
    if a.hint_p is not None:
        hint = a.hint_p[0] if len(a.hint_p) == 1 else a.hint_p
    triples = sorted(recover_triples(ci, hint))
    if a.format == "text":
        return "".join(" ".join(map(str, t)) + "\n" for t in triples)
    return _dump({"triples": [list(t) for t in triples]})


def _emit_graph(g: PlumbingGraph, fmt: str, extra: dict | None = None) -> str:
    if fmt == "dot":
        return export_dot(g)
    if fmt == "text":
        return serialize(g)
    return _dump({"graph": serialize(g), **(extra or {})})


def cmd_family(a) -> str:
    if a.family == "theorem-b":
        if len(a.alphas) != a.s:
            raise DomainError(f"--alphas needs {a.s} values")
        g = family_theorem_b(a.k, a.s, a.m, a.alphas, a.signs)
        return _emit_graph(g, a.format)
    if a.family == "hcp3":
        g, expected = family_homotopy_cp3(a.i)
        return _emit_graph(g, a.format, {"expected": expected})
    return _emit_graph(family_s2_bundle_cp2(a.alpha), a.format)


def cmd_export_dot(a) -> str:
    return export_dot(_read_graph(a.graph))


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=_positive, default=1, help="dimension parameter (manifold dimension 6k)")
    common.add_argument("--format", choices=("json", "text", "dot"), default="json")

    p = argparse.ArgumentParser(prog="algplumb", description="Algebraic plumbing graph toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    for name, func, help_ in (
        ("validate", cmd_validate, "structural report per component"),
        ("invariants", cmd_invariants, "invariant system (mu, w, p) in the canonical basis"),
        ("rank", cmd_rank, "rank of the invariant lattice"),
        ("betti", cmd_betti, "Betti numbers of the boundary manifold"),
        ("export-dot", cmd_export_dot, "Graphviz rendering"),
    ):
        add(name, func, help_).add_argument("graph")

    sp = add("reduce", cmd_reduce, "reduce with a replayable move trace")
    sp.add_argument("graph")
    sp.add_argument("--seed", type=int, default=None, help="pick moves at random with this seed")

    sp = add("canonical", cmd_canonical, "canonical reduced-class encoding")
    sp.add_argument("graph")
    sp.add_argument("--reduce", action="store_true", help="reduce before encoding")

    sp = add("equiv", cmd_equiv, "decide k-equivalence of two graphs or systems")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--bound", type=_nonneg, default=10)

    sp = add("admissible", cmd_admissible, "Jupp congruence check at k = 1")
    sp.add_argument("source", help="graph file or JSON invariant system")
    sp.add_argument("--samples", type=_positive, default=20000)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("obstructions", cmd_obstructions, "sphere-bundle and direct-summand obstructions")
    sp.add_argument("graph")
    sp.add_argument("--y", type=_int_list, action="append", help="basis vector of Y (repeatable)")

    for name, func in (("enumerate", cmd_enumerate), ("collisions", cmd_collisions)):
        sp = add(name, func, f"{name} reduced graphs within bounds")
        sp.add_argument("--rank-max", type=_nonneg, required=True)
        sp.add_argument("--alpha-max", type=_nonneg, required=True)
        sp.add_argument("--label-sum-max", type=_nonneg, default=0)
        sp.add_argument("--spin-only", action="store_true")
        sp.add_argument("--max-candidates", type=_positive, default=None)
        sp.add_argument("--parallel", type=_nonneg, default=0, help="worker processes")
        if name == "collisions":
            sp.add_argument("--bound", type=_nonneg, default=10)
            sp.add_argument("--no-decide", action="store_true")

    sp = add("recover-triples", cmd_recover_triples, "triples with given classical invariants")
    for n in ("D", "R2", "I", "J"):
        sp.add_argument(n, type=int)
    sp.add_argument("--hint-p", type=_int_list, default=None)

    fam = sub.add_parser("family", help="named graph families")
    fam.set_defaults(func=cmd_family)
    fsub = fam.add_subparsers(dest="family", required=True)
    tb = fsub.add_parser("theorem-b", parents=[common])
    tb.add_argument("--s", type=_positive, required=True)
    tb.add_argument("--m", type=_nonneg, default=0)
    tb.add_argument("--alphas", type=_int_list, required=True)
    tb.add_argument("--signs", type=_int_list, default=None)
    fsub.add_parser("hcp3", parents=[common]).add_argument("--i", type=_nonneg, required=True)
    fsub.add_parser("s2cp2", parents=[common]).add_argument("--alpha", type=int, required=True)
    return p


def dispatch(argv: Sequence[str], out=None, err=None) -> int:
    """Run one command; returns the exit code."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else 2
    try:
        text = args.func(args)
    except DomainError as e:
        err.write(f"error: {e}\n")
        return 1
    except (ValueError, KeyError, IndexError) as e:
        err.write(f"error: {e}\n")
        return 1
    out.write(text)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
