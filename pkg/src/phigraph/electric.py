"""Electrical network analysis on metrized graphs.

Edge ``e`` is a resistor of resistance ``L(e)``. The voltage function
``j_z(x, y)`` is the potential at ``x`` when a unit current enters at ``y``
and leaves at ``z``, grounded so that the potential at ``z`` is 0. The
resistance function is ``r(x, y) = j_y(x, x)``.

Interior points are always handled by temporarily subdividing the graph, so
every computation reduces to a weighted vertex Laplacian.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import SingularSystem, UnknownVertex
from .graph import AtVertex, GraphPoint, MetrizedGraph, cycle_basis, subdivide_many, validate


@dataclass(frozen=True)
class VertexPotential:
    graph: MetrizedGraph
    source: str
    ground: str
    potential: Mapping[str, float]

    def __getitem__(self, v: str) -> float:
        return self.potential[v]

    def laplacian_residual(self) -> float:
        """Max deviation of the discrete Laplacian from ``δ_source − δ_ground``."""
        lap = dict.fromkeys(self.graph.vertices, 0.0)
        for e in self.graph.edges:
            if e.is_loop:
                continue
            flow = (self.potential[e.s] - self.potential[e.t]) / e.length
            lap[e.s] += flow
            lap[e.t] -= flow
        if self.source != self.ground:
            lap[self.source] -= 1.0
            lap[self.ground] += 1.0
        return max(abs(x) for x in lap.values())


def laplacian(g: MetrizedGraph) -> np.ndarray:
    """Weighted vertex Laplacian with conductances ``1/L(e)``; loops drop out."""
    n = len(g.vertices)
    lap = np.zeros((n, n))
    idx = g._vertex_index
    for e in g.edges:
        if e.is_loop:
            continue
        i, j, c = idx[e.s], idx[e.t], 1.0 / e.length
        lap[i, i] += c
        lap[j, j] += c
        lap[i, j] -= c
        lap[j, i] -= c
    return lap


def grounded_inverse(g: MetrizedGraph, ground: int = 0) -> np.ndarray:
    """Inverse of the Laplacian with row/column ``ground`` deleted, zero-padded.

    Entry ``(x, y)`` is ``j_z(x, y)`` for ``z`` the ground vertex.
    """
    lap = laplacian(g)
    n = lap.shape[0]
    keep = np.r_[0:ground, ground + 1 : n]
    out = np.zeros((n, n))
    if n > 1:
        out[np.ix_(keep, keep)] = np.linalg.solve(lap[np.ix_(keep, keep)], np.eye(n - 1))
    return out


def resistance_matrix(g: MetrizedGraph) -> np.ndarray:
    """All-pairs vertex resistances, indexed by ``g.vertices`` order."""
    validate(g)
    gi = grounded_inverse(g)
    d = np.diag(gi)
    r = d[:, None] + d[None, :] - 2.0 * gi
    np.fill_diagonal(r, 0.0)
    return r


def vertex_voltages(g: MetrizedGraph, y: str, z: str) -> VertexPotential:
    validate(g)
    for v in (y, z):
        if not g.has_vertex(v):
            raise UnknownVertex(f"no vertex {v!r}")
    if y == z:
        return VertexPotential(g, y, z, dict.fromkeys(g.vertices, 0.0))
    lap = laplacian(g)
    n = len(g.vertices)
    iz, iy = g.index(z), g.index(y)
    keep = [i for i in range(n) if i != iz]
    rhs = np.zeros(n)
    rhs[iy] = 1.0
    sol = np.linalg.solve(lap[np.ix_(keep, keep)], rhs[keep])
    pot = np.zeros(n)
    pot[keep] = sol
    return VertexPotential(g, y, z, dict(zip(g.vertices, pot.tolist())))


def flow_oracle_voltages(g: MetrizedGraph, y: str, z: str) -> VertexPotential:
    """Vertex potentials from the per-edge current system.

    Unknown ``x_e = (j(t(e)) − j(s(e))) / L(e)`` for every edge; one current
    conservation row per vertex other than ``z`` and one zero-circulation row
    per basis cycle. The currents are then integrated outward from ``z``.
    """
    validate(g)
    for v in (y, z):
        if not g.has_vertex(v):
            raise UnknownVertex(f"no vertex {v!r}")
    if y == z:
        return VertexPotential(g, y, z, dict.fromkeys(g.vertices, 0.0))
    eidx = {e.id: k for k, e in enumerate(g.edges)}
    m = len(g.edges)
    rows, rhs = [], []
    for v in g.vertices:
        if v == z:
            continue
        row = np.zeros(m)
        for e in g.edges:
            if e.t == v:
                row[eidx[e.id]] += 1.0
            if e.s == v:
                row[eidx[e.id]] -= 1.0
        rows.append(row)
        rhs.append(1.0 if v == y else 0.0)
    for cyc in cycle_basis(g):
        row = np.zeros(m)
        for eid, sign in cyc:
            row[eidx[eid]] += sign * g.edge(eid).length
        rows.append(row)
        rhs.append(0.0)
    a = np.array(rows).reshape(len(rows), m)
    if a.shape[0] != m:
        raise SingularSystem(f"{a.shape[0]} equations for {m} unknowns")
    if m and np.linalg.cond(a) > 1e14:
        raise SingularSystem("flow system is numerically singular")
    x = np.linalg.solve(a, np.array(rhs)) if m else np.zeros(0)

    pot = {z: 0.0}
    frontier = [z]
    while frontier:
        v = frontier.pop()
        for e in g.incidence[v]:
            if e.is_loop:
                continue
            xe = x[eidx[e.id]]
            if e.s == v and e.t not in pot:
                pot[e.t] = pot[v] + e.length * xe
                frontier.append(e.t)
            elif e.t == v and e.s not in pot:
                pot[e.s] = pot[v] - e.length * xe
                frontier.append(e.s)
    return VertexPotential(g, y, z, {v: pot[v] for v in g.vertices})


def voltage(g: MetrizedGraph, x: GraphPoint, y: GraphPoint, z: GraphPoint) -> float:
    """``j_z(x, y)`` at arbitrary points."""
    validate(g)
    refined, where, _ = subdivide_many(g, [x, y, z])
    return vertex_voltages(refined, where[g.check_point(y)], where[g.check_point(z)])[where[g.check_point(x)]]


def resistance(g: MetrizedGraph, x: GraphPoint, y: GraphPoint) -> float:
    """Effective resistance ``r(x, y) = j_y(x, x)``."""
    x, y = g.check_point(x), g.check_point(y)
    if x == y:
        return 0.0
    return voltage(g, x, x, y)


def slope_bound_check(g: MetrizedGraph, y: GraphPoint, z: GraphPoint) -> float:
    """Largest ``|Δj| / L`` over the edges of the graph subdivided at ``y`` and ``z``."""
    validate(g)
    refined, where, _ = subdivide_many(g, [y, z])
    pot = vertex_voltages(refined, where[g.check_point(y)], where[g.check_point(z)])
    slopes = [abs(pot[e.t] - pot[e.s]) / e.length for e in refined.edges]
    return max(slopes, default=0.0)


def vertex_resistance(g: MetrizedGraph, a: str, b: str) -> float:
    return resistance(g, AtVertex(a), AtVertex(b))
