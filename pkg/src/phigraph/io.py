"""JSON graph and curve files.

Graph file::

    {"vertices": [{"id": "a", "q": 1}, ...],
     "edges": [{"id": "e1", "s": "a", "t": "b", "length": 1.5}, ...]}

Curve file::

    {"components": [{"id": "C1", "genus": 1}, ...],
     "nodes": [{"a": "C1", "b": "C2", "length": 1.0}, ...]}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

from .graph import Edge, MetrizedGraph, StableCurveDescription, check_polarization, dual_graph, validate


def graph_from_dict(d: Mapping) -> tuple[MetrizedGraph, dict[str, int]]:
    vertices = tuple(str(v["id"]) for v in d["vertices"])
    q = {str(v["id"]): int(v.get("q", 0)) for v in d["vertices"]}
    edges = tuple(Edge(str(e["id"]), str(e["s"]), str(e["t"]), float(e["length"])) for e in d.get("edges", []))
    g = MetrizedGraph(vertices, edges)
    validate(g)
    check_polarization(g, q)
    return g, q


def graph_to_dict(g: MetrizedGraph, q: Mapping[str, int] | None = None) -> dict:
    q = q or {}
    return {
        "vertices": [{"id": v, "q": int(q.get(v, 0))} for v in g.vertices],
        "edges": [{"id": e.id, "s": e.s, "t": e.t, "length": e.length} for e in g.edges],
    }


def curve_from_dict(d: Mapping) -> StableCurveDescription:
    comps = tuple((str(c["id"]), int(c["genus"])) for c in d["components"])
    nodes = tuple((str(n["a"]), str(n["b"])) for n in d.get("nodes", []))
    lengths = {i: float(n["length"]) for i, n in enumerate(d.get("nodes", [])) if n.get("length") is not None}
    return StableCurveDescription(comps, nodes, lengths)


def load_graph(path: str | Path) -> tuple[MetrizedGraph, dict[str, int]]:
    return graph_from_dict(json.loads(Path(path).read_text()))


def load_curve(path: str | Path) -> tuple[MetrizedGraph, dict[str, int]]:
    """Dual graph and polarization of the curve described in ``path``."""
    return dual_graph(curve_from_dict(json.loads(Path(path).read_text())))


def dump_graph(g: MetrizedGraph, q: Mapping[str, int] | None = None) -> str:
    return json.dumps(graph_to_dict(g, q), indent=2)
