"""Command-line front end.

Exit status is 0 on success, 2 on usage errors and 1 on domain errors, in
which case the library error name is printed on stderr. Numbers are printed
with 12 significant digits.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from . import degeneration, electric, graph, invariants, io, measures, skeletal
from .errors import InvalidPoint, PhiGraphError
from .graph import AtVertex, GraphPoint, MetrizedGraph

SUBCOMMAND_HELP = {
    "info": "structural summary. Output: vertices, edges, genus, polarized_genus, total_length, "
    "canonical_degree, edge_mass_sum, edge_R.<edge>",
    "phi": "φ-invariant. Output: phi",
    "epsilon": "ε-invariant. Output: epsilon",
    "resistance": "effective resistance between two points. Output: resistance",
    "green": "Green function of the admissible (or canonical) measure. Output: j_mu, c_mu, g_mu",
    "contract": "contract edges to length 0. Output: polarized_genus, vertex_map.<v>, graph "
    "(the quotient graph file object; --emit also writes it to a file)",
    "probe": "continuity probe shrinking edges by 2^-j. Output table: index, L[<edge>]..., value, deviation",
    "phi-asymptotic": "leading term of φ near the boundary of moduli. Output: phi_leading",
    "skeletal-eval": "evaluate a serialized skeletal expression. Output: value",
    "oracle": "brute-force discretization at --oracle-k pieces per edge. Output: k, phi_k, epsilon_k, c_k "
    "(and phi_richardson, order with --richardson)",
}


class UsageError(Exception):
    pass


def parse_point(g: MetrizedGraph, token: str) -> GraphPoint:
    """``vID`` (or a bare vertex id) for a vertex, ``eID:offset`` for a point on an edge."""
    if ":" in token:
        name, _, off = token.rpartition(":")
        if not any(e.id == name for e in g.edges) and name.startswith("e") and any(e.id == name[1:] for e in g.edges):
            name = name[1:]
        try:
            offset = float(off)
        except ValueError:
            raise InvalidPoint(f"bad offset in point {token!r}") from None
        return g.point(name, offset)
    if g.has_vertex(token):
        return AtVertex(token)
    if token.startswith("v") and g.has_vertex(token[1:]):
        return AtVertex(token[1:])
    raise InvalidPoint(f"no vertex {token!r}")


def _round(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            return str(x)
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def _fmt(x) -> str:
    if isinstance(x, float):
        return str(x) if math.isinf(x) or math.isnan(x) else f"{x:.12g}"
    if isinstance(x, (dict, list)):
        return json.dumps(_round(x), sort_keys=True)
    return str(x)


def _flatten(d: dict, prefix: str = "") -> list[tuple[str, object]]:
    out = []
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict) and k != "graph":
            out.extend(_flatten(v, key + "."))
        else:
            out.append((key, v))
    return out


def emit(result, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(_round(result), sort_keys=False) + "\n")
        return
    if isinstance(result, dict) and "table" in result:
        header, rows = result["table"]
        out.write("\t".join(header) + "\n")
        for row in rows:
            out.write("\t".join(_fmt(x) for x in row) + "\n")
        return
    out.write("key\tvalue\n")
    for k, v in _flatten(result):
        out.write(f"{k}\t{_fmt(v)}\n")


def _load(args) -> tuple[MetrizedGraph, dict[str, int]]:
    if getattr(args, "graph", None):
        return io.load_graph(args.graph)
    if getattr(args, "curve", None):
        return io.load_curve(args.curve)
    raise UsageError("one of --graph or --curve is required")


def _csv(s: str) -> list[str]:
    return [x for x in s.split(",") if x]


def _complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", ""))
    except ValueError:
        raise UsageError(f"--u: cannot parse {s!r} as a number") from None


def cmd_info(args):
    g, q = _load(args)
    return {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "genus": graph.genus(g),
        "polarized_genus": graph.polarized_genus(g, q),
        "total_length": graph.total_length(g),
        "canonical_degree": graph.canonical_divisor(g, q).degree,
        "edge_mass_sum": measures.edge_mass_sum(g),
        "edge_R": {e.id: measures.edge_R(g, e.id) for e in g.edges},
    }


def cmd_phi(args):
    g, q = _load(args)
    return {"phi": invariants.phi(g, q)}


def cmd_epsilon(args):
    g, q = _load(args)
    return {"epsilon": invariants.epsilon(g, q)}


def cmd_resistance(args):
    g, _ = _load(args)
    return {"resistance": electric.resistance(g, parse_point(g, args.from_), parse_point(g, args.to))}


def cmd_green(args):
    g, q = _load(args)
    mu = measures.mu_can(g) if args.measure == "can" else measures.mu_ad(g, q)
    x, y = parse_point(g, args.x), parse_point(g, args.y)
    ev = invariants.GreenEvaluator(g, mu, [x, y])
    return {"j_mu": ev.j(x, y), "c_mu": ev.c, "g_mu": ev.g(x, y)}


def cmd_contract(args):
    g, q = _load(args)
    zero = set(_csv(args.zero))
    for eid in zero:
        g.edge(eid)
    res = degeneration.contract(g, q, {e.id: (0.0 if e.id in zero else e.length) for e in g.edges})
    if args.emit:
        Path(args.emit).write_text(io.dump_graph(res.graph, res.polarization) + "\n")
    return {
        "polarized_genus": graph.polarized_genus(res.graph, res.polarization),
        "vertex_map": res.vertex_map,
        "graph": io.graph_to_dict(res.graph, res.polarization),
    }


def cmd_probe(args):
    g, q = _load(args)
    shrink = _csv(args.shrink)
    if not shrink:
        raise UsageError("--shrink: give at least one edge id")
    path, limit = degeneration.geometric_path(g, shrink, args.steps)
    rep = degeneration.continuity_probe(g, q, path, limit, invariant=args.invariant)
    edge_ids = [e.id for e in g.edges]
    header = ["index", *[f"L[{e}]" for e in edge_ids], "value", "deviation"]
    rows = [[idx, *[ls[e] for e in edge_ids], v, d] for idx, ls, v, d in rep.rows()]
    if args.format == "tsv":
        return {"table": (header, rows)}
    return {
        "rows": [dict(zip(header, r)) for r in rows],
        "limit_value": rep.limit_value,
        "max_tail_deviation": rep.max_tail_deviation,
        "within_tolerance": rep.max_tail_deviation < args.tolerance,
    }


def cmd_phi_asymptotic(args):
    g, q = _load(args)
    u = [_complex(x) for x in _csv(args.u)]
    return {"phi_leading": skeletal.phi_asymptotic(g, q, u)}


def cmd_skeletal_eval(args):
    f = skeletal.loads(Path(args.expr).read_text())
    if (args.m is None) == (args.t is None):
        raise UsageError("give exactly one of --m or --t")
    if args.m is not None:
        try:
            m = [float(x) for x in _csv(args.m)]
        except ValueError:
            raise UsageError(f"--m: cannot parse {args.m!r}") from None
        return {"value": float(skeletal.evaluate(f, m))}
    return {"value": skeletal.green_eval(f, [_complex(x) for x in _csv(args.t)])}


def cmd_oracle(args):
    g, q = _load(args)
    k = args.oracle_k
    res = invariants.discretization_oracle(g, q, k)
    out = {"k": k, "phi_k": res.phi, "epsilon_k": res.epsilon, "c_k": res.c}
    if args.richardson:
        if k % 4:
            raise UsageError("--richardson needs --oracle-k divisible by 4")
        coarse = [invariants.discretization_oracle(g, q, k // d).phi for d in (4, 2)]
        value, order = invariants.richardson(coarse[0], coarse[1], res.phi)
        out.update(phi_richardson=value, order=order)
    return out


COMMANDS = {
    "info": cmd_info,
    "phi": cmd_phi,
    "epsilon": cmd_epsilon,
    "resistance": cmd_resistance,
    "green": cmd_green,
    "contract": cmd_contract,
    "probe": cmd_probe,
    "phi-asymptotic": cmd_phi_asymptotic,
    "skeletal-eval": cmd_skeletal_eval,
    "oracle": cmd_oracle,
}


def _positive_float(s):
    try:
        x = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
    return x


def _positive_int(s):
    try:
        x = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if x < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {s!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # the copy attached to subcommands must not reset values given before the subcommand
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--format", choices=["json", "tsv"], default=d("json"), help="output format (default json)")
        p.add_argument(
            "--tolerance", type=_positive_float, default=d(1e-9), help="probe acceptance tolerance (default 1e-9)"
        )
        p.add_argument(
            "--oracle-k", type=_positive_int, default=d(32), help="pieces per edge for the oracle (default 32)"
        )
        return p

    common = global_flags(suppress=True)

    source = argparse.ArgumentParser(add_help=False)
    grp = source.add_mutually_exclusive_group()
    grp.add_argument("--graph", help="graph file (JSON)")
    grp.add_argument("--curve", help="stable curve file (JSON); its dual graph is used")

    parser = argparse.ArgumentParser(
        prog="phigraph",
        description="Invariants of polarized metrized graphs. Points are written vID or eID:offset.",
        parents=[global_flags(suppress=False)],
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    mk = lambda name, *parents: sub.add_parser(
        name, help=SUBCOMMAND_HELP[name], description=SUBCOMMAND_HELP[name], parents=[common, *parents]
    )

    for name in ("info", "phi", "epsilon"):
        mk(name, source)
    p = mk("resistance", source)
    p.add_argument("--from", dest="from_", required=True, metavar="POINT")
    p.add_argument("--to", required=True, metavar="POINT")
    p = mk("green", source)
    p.add_argument("--x", required=True, metavar="POINT")
    p.add_argument("--y", required=True, metavar="POINT")
    p.add_argument("--measure", choices=["ad", "can"], default="ad")
    p = mk("contract", source)
    p.add_argument("--zero", required=True, help="comma-separated edge ids to contract")
    p.add_argument("--emit", metavar="PATH", help="write the quotient graph file here")
    p = mk("probe", source)
    p.add_argument("--shrink", required=True, help="comma-separated edge ids to shrink")
    p.add_argument("--steps", type=_positive_int, default=20)
    p.add_argument("--invariant", choices=["phi", "epsilon"], default="phi")
    p = mk("phi-asymptotic", source)
    p.add_argument("--u", required=True, help="comma-separated coordinates, one per edge (complex allowed)")
    p = mk("skeletal-eval")
    p.add_argument("--expr", required=True, help="serialized skeletal expression (JSON)")
    p.add_argument("--m", help="comma-separated nonnegative coordinates")
    p.add_argument("--t", help="comma-separated polydisk coordinates")
    p = mk("oracle", source)
    p.add_argument("--richardson", action="store_true", help="also extrapolate from k/4, k/2, k")
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = COMMANDS[args.command](args)
    except UsageError as exc:
        err.write(f"{parser.prog} {args.command}: error: {exc}\n")
        return 2
    except PhiGraphError as exc:
        err.write(f"{type(exc).__name__}: {exc}\n")
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        err.write(f"{type(exc).__name__}: {exc}\n")
        return 1
    emit(result, args.format, out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
