"""Polarized metrized graphs: data model, structural invariants, subdivision.

A :class:`MetrizedGraph` is a finite connected multigraph whose edges carry
positive lengths. Loops and parallel edges are allowed. Every edge has a
fixed orientation ``s -> t`` and points in the interior of an edge are
addressed by their arc-length offset from ``s``.

A polarization is a plain mapping ``vertex id -> nonnegative int``; vertices
missing from the mapping carry weight 0.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import (
    Disconnected,
    EmptyGraph,
    InvalidPoint,
    NonpositiveLength,
    UnknownEdge,
    UnknownVertex,
    UnstablePolarization,
)

#: Global comparison tolerance for lengths and offsets.
LENGTH_TOL = 1e-12

Polarization = Mapping[str, int]


@dataclass(frozen=True)
class Edge:
    id: str
    s: str
    t: str
    length: float

    @property
    def is_loop(self) -> bool:
        return self.s == self.t


@dataclass(frozen=True)
class AtVertex:
    vertex: str


@dataclass(frozen=True)
class OnEdge:
    edge: str
    offset: float


GraphPoint = Union[AtVertex, OnEdge]


@dataclass(frozen=True)
class MetrizedGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise ValueError("duplicate edge ids")
        vs = set(self.vertices)
        for e in self.edges:
            if e.s not in vs or e.t not in vs:
                raise UnknownVertex(f"edge {e.id!r} has an endpoint outside the vertex set")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], vertices: Iterable[str] = ()) -> "MetrizedGraph":
        """Build from ``(id, s, t, length)`` tuples; vertices are gathered in order of appearance."""
        es = [Edge(str(i), str(s), str(t), float(L)) for i, s, t, L in edges]
        order = list(dict.fromkeys([str(v) for v in vertices] + [x for e in es for x in (e.s, e.t)]))
        return cls(tuple(order), tuple(es))

    # -- lookups -----------------------------------------------------------

    @cached_property
    def _edge_index(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def edge(self, eid: str) -> Edge:
        try:
            return self._edge_index[eid]
        except KeyError:
            raise UnknownEdge(f"no edge {eid!r}") from None

    def index(self, v: str) -> int:
        try:
            return self._vertex_index[v]
        except KeyError:
            raise UnknownVertex(f"no vertex {v!r}") from None

    def has_vertex(self, v: str) -> bool:
        return v in self._vertex_index

    @cached_property
    def valences(self) -> dict[str, int]:
        val = dict.fromkeys(self.vertices, 0)
        for e in self.edges:
            val[e.s] += 1
            val[e.t] += 1
        return val

    def valence(self, v: str) -> int:
        self.index(v)
        return self.valences[v]

    @cached_property
    def incidence(self) -> dict[str, list[Edge]]:
        inc = defaultdict(list)
        for e in self.edges:
            inc[e.s].append(e)
            if not e.is_loop:
                inc[e.t].append(e)
        return inc

    def with_lengths(self, lengths: Mapping[str, float]) -> "MetrizedGraph":
        """Same combinatorial graph with edge lengths replaced."""
        return MetrizedGraph(
            self.vertices,
            tuple(Edge(e.id, e.s, e.t, float(lengths.get(e.id, e.length))) for e in self.edges),
        )

    def scaled(self, factor: float) -> "MetrizedGraph":
        return MetrizedGraph(self.vertices, tuple(Edge(e.id, e.s, e.t, e.length * factor) for e in self.edges))

    def without_edge(self, eid: str) -> "MetrizedGraph":
        self.edge(eid)
        return MetrizedGraph(self.vertices, tuple(e for e in self.edges if e.id != eid))

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {self.vertices[0]}
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for e in self.incidence[v]:
                w = e.t if e.s == v else e.s
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(self.vertices)

    # -- points ------------------------------------------------------------

    def point(self, edge: str, offset: float) -> GraphPoint:
        """Normalized point at ``offset`` along ``edge``; endpoints map to vertices."""
        e = self.edge(edge)
        offset = float(offset)
        if offset < -LENGTH_TOL or offset > e.length + LENGTH_TOL:
            raise InvalidPoint(f"offset {offset} outside edge {edge!r} of length {e.length}")
        if offset <= LENGTH_TOL:
            return AtVertex(e.s)
        if offset >= e.length - LENGTH_TOL:
            return AtVertex(e.t)
        return OnEdge(edge, offset)

    def check_point(self, p: GraphPoint) -> GraphPoint:
        if isinstance(p, AtVertex):
            if not self.has_vertex(p.vertex):
                raise InvalidPoint(f"no vertex {p.vertex!r}")
            return p
        if isinstance(p, OnEdge):
            try:
                e = self.edge(p.edge)
            except UnknownEdge as exc:
                raise InvalidPoint(str(exc)) from None
            if not (LENGTH_TOL < p.offset < e.length - LENGTH_TOL):
                raise InvalidPoint(f"offset {p.offset} is not interior to edge {p.edge!r}")
            return p
        raise InvalidPoint(f"not a graph point: {p!r}")


@dataclass(frozen=True)
class Divisor:
    coefficients: Mapping[GraphPoint, int] = field(default_factory=dict)

    @property
    def degree(self):
        return sum(self.coefficients.values())

    def __getitem__(self, p: GraphPoint):
        return self.coefficients.get(p, 0)


@dataclass(frozen=True)
class StableCurveDescription:
    """Components ``(id, geometric genus)`` and nodes joining pairs of components."""

    components: tuple[tuple[str, int], ...]
    nodes: tuple[tuple[str, str], ...]
    edge_lengths: Mapping[int, float] = field(default_factory=dict)


# -- operations --------------------------------------------------------------


def validate(g: MetrizedGraph) -> None:
    if not g.vertices:
        raise EmptyGraph("vertex set is empty")
    for e in g.edges:
        if not e.length > 0:
            raise NonpositiveLength(f"edge {e.id!r} has length {e.length}")
    if not g.is_connected():
        raise Disconnected("graph is not connected")


def genus(g: MetrizedGraph) -> int:
    """First Betti number ``|E| - |V| + 1``."""
    validate(g)
    return len(g.edges) - len(g.vertices) + 1


def total_length(g: MetrizedGraph) -> float:
    validate(g)
    return float(sum(e.length for e in g.edges))


def check_polarization(g: MetrizedGraph, q: Polarization) -> None:
    for v in q:
        g.index(v)
    for v in g.vertices:
        qv = q.get(v, 0)
        if qv < 0 or int(qv) != qv:
            raise UnstablePolarization(v, f"polarization at {v!r} must be a nonnegative integer, got {qv!r}")
        if g.valences[v] - 2 + 2 * qv < 0:
            raise UnstablePolarization(v)


def canonical_divisor(g: MetrizedGraph, q: Polarization) -> Divisor:
    validate(g)
    check_polarization(g, q)
    coeffs = {}
    for v in g.vertices:
        c = g.valences[v] - 2 + 2 * int(q.get(v, 0))
        if c:
            coeffs[AtVertex(v)] = c
    return Divisor(coeffs)


def polarized_genus(g: MetrizedGraph, q: Polarization) -> int:
    check_polarization(g, q)
    return genus(g) + sum(int(q.get(v, 0)) for v in g.vertices)


class Relabeling:
    """Maps points of a graph to the corresponding points of a subdivision of it."""

    def __init__(self, base: MetrizedGraph, refined: MetrizedGraph, cuts: Mapping[str, list[tuple[float, str]]]):
        self.base = base
        self.refined = refined
        self._cuts = cuts

    def __call__(self, p: GraphPoint) -> GraphPoint:
        p = self.base.check_point(p)
        if isinstance(p, AtVertex) or p.edge not in self._cuts:
            return p
        cuts = self._cuts[p.edge]
        start = 0.0
        for k, (off, vid) in enumerate(cuts):
            if abs(p.offset - off) <= LENGTH_TOL:
                return AtVertex(vid)
            if p.offset < off:
                return self.refined.point(f"{p.edge}/{k}", p.offset - start)
            start = off
        return self.refined.point(f"{p.edge}/{len(cuts)}", p.offset - start)


def _fresh_id(taken: set, stem: str) -> str:
    vid, n = stem, 0
    while vid in taken:
        n += 1
        vid = f"{stem}~{n}"
    taken.add(vid)
    return vid


def subdivide_many(g: MetrizedGraph, points: Iterable[GraphPoint]) -> tuple[MetrizedGraph, dict, Relabeling]:
    """Insert every interior point of ``points`` as a vertex in one pass.

    Returns the refined graph, a map ``point -> vertex id`` covering all of
    ``points``, and the relabeling of old points into the refined graph. Edge
    ``e`` cut at ``k`` offsets becomes edges ``e/0 .. e/k`` in order from
    ``s(e)``.
    """
    points = [g.check_point(p) for p in points]
    offsets: dict[str, set[float]] = defaultdict(set)
    for p in points:
        if isinstance(p, OnEdge):
            offsets[p.edge].add(p.offset)
    taken = set(g.vertices)
    new_vertices = list(g.vertices)
    new_edges = []
    cuts: dict[str, list[tuple[float, str]]] = {}
    for e in g.edges:
        if e.id not in offsets:
            new_edges.append(e)
            continue
        merged: list[float] = []
        for off in sorted(offsets[e.id]):
            if not merged or off - merged[-1] > LENGTH_TOL:
                merged.append(off)
        ids = [_fresh_id(taken, f"{e.id}@{k}") for k in range(len(merged))]
        new_vertices.extend(ids)
        cuts[e.id] = list(zip(merged, ids))
        chain = [e.s] + ids + [e.t]
        stops = [0.0] + merged + [e.length]
        for k in range(len(chain) - 1):
            new_edges.append(Edge(f"{e.id}/{k}", chain[k], chain[k + 1], stops[k + 1] - stops[k]))
    refined = MetrizedGraph(tuple(new_vertices), tuple(new_edges))
    relabel = Relabeling(g, refined, cuts)
    where = {}
    for p in points:
        q = relabel(p)
        where[p] = q.vertex
    return refined, where, relabel


def subdivide(g: MetrizedGraph, p: GraphPoint) -> tuple[MetrizedGraph, str, Relabeling]:
    validate(g)
    refined, where, relabel = subdivide_many(g, [p])
    return refined, where[g.check_point(p)], relabel


def subdivide_uniform(g: MetrizedGraph, k: int) -> tuple[MetrizedGraph, dict[str, list[str]]]:
    """Cut every edge into ``k`` equal pieces.

    Returns the refined graph and, per original edge, the ordered chain of
    vertex ids from ``s(e)`` to ``t(e)``.
    """
    pts = [OnEdge(e.id, e.length * i / k) for e in g.edges for i in range(1, k)]
    refined, where, _ = subdivide_many(g, pts)
    chains = {
        e.id: [e.s] + [where[OnEdge(e.id, e.length * i / k)] for i in range(1, k)] + [e.t] for e in g.edges
    }
    return refined, chains


def spanning_tree(g: MetrizedGraph) -> tuple[dict[str, tuple[str, Edge] | None], list[Edge]]:
    """BFS tree from the first vertex: ``parent`` links and the non-tree edges."""
    validate(g)
    root = g.vertices[0]
    parent: dict[str, tuple[str, Edge] | None] = {root: None}
    used = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for e in g.incidence[v]:
            w = e.t if e.s == v else e.s
            if w not in parent:
                parent[w] = (v, e)
                used.add(e.id)
                queue.append(w)
    return parent, [e for e in g.edges if e.id not in used]


def _path_to_root(parent, v: str) -> list[tuple[str, int]]:
    """Signed edges walking from ``v`` up to the root."""
    path = []
    while parent[v] is not None:
        u, e = parent[v]
        # walking v -> u along e
        path.append((e.id, +1 if e.s == v else -1))
        v = u
    return path


def cycle_basis(g: MetrizedGraph) -> list[list[tuple[str, int]]]:
    """Fundamental cycles of a BFS spanning tree.

    Each cycle is a closed walk given as ``(edge id, ±1)`` pairs, ``+1``
    meaning the walk traverses the edge from ``s`` to ``t``.
    """
    parent, extra = spanning_tree(g)
    cycles = []
    for e in extra:
        if e.is_loop:
            cycles.append([(e.id, +1)])
            continue
        up_t = _path_to_root(parent, e.t)
        up_s = _path_to_root(parent, e.s)
        # strip the common tail above the meeting point
        while up_t and up_s and up_t[-1] == up_s[-1]:
            up_t.pop()
            up_s.pop()
        back = [(eid, -sign) for eid, sign in reversed(up_s)]
        cycles.append([(e.id, +1)] + up_t + back)
    return cycles


def dual_graph(c: StableCurveDescription) -> tuple[MetrizedGraph, dict[str, int]]:
    """Dual graph of a stable curve: a vertex per component, an edge per node.

    Node ``i`` becomes edge ``n{i}`` with length ``edge_lengths[i]`` (default 1).
    """
    vertices = tuple(str(cid) for cid, _ in c.components)
    q = {str(cid): int(gen) for cid, gen in c.components}
    edges = tuple(
        Edge(f"n{i}", str(a), str(b), float(c.edge_lengths.get(i, 1.0))) for i, (a, b) in enumerate(c.nodes)
    )
    g = MetrizedGraph(vertices, edges)
    validate(g)
    return g, q
