"""Degeneration of polarized graphs: contracting zero-length edges.

A length assignment ``L ∈ R_{≥0}^{E}`` on a template graph parametrizes the
quotient graph obtained by collapsing every edge with ``L(e) = 0``. The
collapsed preimage of a quotient vertex passes its polarization and its
first Betti number to that vertex, which keeps the polarized genus fixed.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from . import invariants
from .errors import NegativeLength, TotalCollapse, UnknownEdge
from .graph import Edge, MetrizedGraph, Polarization, check_polarization, polarized_genus, validate

LengthAssignment = Mapping[str, float]


@dataclass(frozen=True)
class ContractionResult:
    graph: MetrizedGraph
    polarization: dict[str, int]
    vertex_map: dict[str, str]
    edge_map: dict[str, str]


def _check_lengths(g: MetrizedGraph, L: LengthAssignment) -> dict[str, float]:
    ids = [e.id for e in g.edges]
    unknown = set(L) - set(ids)
    if unknown:
        raise UnknownEdge(f"length assignment names unknown edges {sorted(unknown)}")
    missing = [eid for eid in ids if eid not in L]
    if missing:
        raise UnknownEdge(f"length assignment misses edges {missing}")
    out = {}
    for eid in ids:
        x = float(L[eid])
        if x < 0:
            raise NegativeLength(f"edge {eid!r} has negative length {x}")
        out[eid] = x
    return out


def contract(
    g: MetrizedGraph, q: Polarization, L: LengthAssignment, allow_total_collapse: bool = True
) -> ContractionResult:
    """Quotient of ``(g, q)`` by the edges with zero length under ``L``.

    When every edge collapses the result is a single vertex carrying the whole
    polarized genus; pass ``allow_total_collapse=False`` to reject that case
    with :class:`TotalCollapse`.
    """
    validate(g)
    check_polarization(g, q)
    lengths = _check_lengths(g, L)
    zero = [e for e in g.edges if lengths[e.id] == 0.0]
    if g.edges and len(zero) == len(g.edges) and not allow_total_collapse:
        raise TotalCollapse("every edge has length 0")

    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    order = g._vertex_index
    for e in zero:
        a, b = find(e.s), find(e.t)
        if a != b:
            # the earliest vertex in canonical order names the class
            if order[b] < order[a]:
                a, b = b, a
            parent[b] = a

    vertex_map = {v: find(v) for v in g.vertices}
    reps = [v for v in g.vertices if vertex_map[v] == v]
    n_vertices = dict.fromkeys(reps, 0)
    n_edges = dict.fromkeys(reps, 0)
    qsum = dict.fromkeys(reps, 0)
    for v in g.vertices:
        n_vertices[vertex_map[v]] += 1
        qsum[vertex_map[v]] += int(q.get(v, 0))
    for e in zero:
        n_edges[vertex_map[e.s]] += 1
    q_new = {p: qsum[p] + n_edges[p] - n_vertices[p] + 1 for p in reps}

    edges = tuple(
        Edge(e.id, vertex_map[e.s], vertex_map[e.t], lengths[e.id]) for e in g.edges if lengths[e.id] > 0.0
    )
    quotient = MetrizedGraph(tuple(reps), edges)
    return ContractionResult(quotient, q_new, vertex_map, {e.id: e.id for e in edges})


def phi_function(g: MetrizedGraph, q: Polarization, L: LengthAssignment) -> float:
    """φ of the polarized graph parametrized by ``L``, zeros allowed."""
    return _invariant_function(invariants.phi, g, q, L)


def epsilon_function(g: MetrizedGraph, q: Polarization, L: LengthAssignment) -> float:
    return _invariant_function(invariants.epsilon, g, q, L)


def _invariant_function(inv, g, q, L) -> float:
    lengths = _check_lengths(g, L)
    if all(x > 0 for x in lengths.values()):
        return inv(g.with_lengths(lengths), q)
    res = contract(g, q, lengths)
    return inv(res.graph, res.polarization)


@dataclass(frozen=True)
class ProbeReport:
    lengths: list[dict[str, float]]
    values: list[float]
    limit_lengths: dict[str, float]
    limit_value: float
    deviations: list[float] = field(default_factory=list)
    tail: int = 1

    @property
    def max_tail_deviation(self) -> float:
        return max(self.deviations[-self.tail :], default=0.0)

    def rows(self) -> list[list]:
        out = []
        for i, (ls, v, d) in enumerate(zip(self.lengths, self.values, self.deviations)):
            out.append([i, ls, v, d])
        out.append(["limit", self.limit_lengths, self.limit_value, 0.0])
        return out

    def to_tsv(self, fmt: Callable[[float], str] = lambda x: f"{x:.12g}") -> str:
        """One row per path point: index, lengths, value, deviation from the limit."""
        edge_ids = list(self.limit_lengths)
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
        writer.writerow(["index", *[f"L[{e}]" for e in edge_ids], "value", "deviation"])
        for idx, ls, v, d in self.rows():
            writer.writerow([idx, *[fmt(ls[e]) for e in edge_ids], fmt(v), fmt(d)])
        return buf.getvalue()


def continuity_probe(
    g: MetrizedGraph,
    q: Polarization,
    path: Sequence[LengthAssignment],
    limit: LengthAssignment,
    invariant: str = "phi",
    tail: int | None = None,
) -> ProbeReport:
    """Evaluate φ (or ε) along ``path`` and compare with the value at ``limit``.

    ``tail`` is how many final path points count towards
    :attr:`ProbeReport.max_tail_deviation`; default is the last quarter.
    """
    fn = {"phi": phi_function, "epsilon": epsilon_function}[invariant]
    polarized_genus(g, q)
    lengths = [_check_lengths(g, L) for L in path]
    limit_lengths = _check_lengths(g, limit)
    values = [fn(g, q, L) for L in lengths]
    limit_value = fn(g, q, limit_lengths)
    deviations = [abs(v - limit_value) for v in values]
    if tail is None:
        tail = max(1, len(path) // 4)
    return ProbeReport(lengths, values, limit_lengths, limit_value, deviations, tail)


def geometric_path(
    g: MetrizedGraph, shrink: Sequence[str], steps: int, base: LengthAssignment | None = None
) -> tuple[list[dict[str, float]], dict[str, float]]:
    """Lengths with the ``shrink`` edges scaled by ``2^{-j}``, ``j = 1..steps``, and the limit."""
    base = {e.id: e.length for e in g.edges} if base is None else dict(base)
    for eid in shrink:
        g.edge(eid)
    path = [{eid: (x * 2.0**-j if eid in shrink else x) for eid, x in base.items()} for j in range(1, steps + 1)]
    limit = {eid: (0.0 if eid in shrink else x) for eid, x in base.items()}
    return path, limit
