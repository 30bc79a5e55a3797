"""Measures made of vertex atoms plus constant per-edge densities.

This class is closed under the operations needed here and contains the
canonical measure, the canonical-divisor measure and the admissible measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .electric import vertex_resistance
from .errors import GenusTooSmall, UnknownEdge
from .graph import MetrizedGraph, Polarization, canonical_divisor, polarized_genus, validate


@dataclass(frozen=True)
class Measure:
    graph: MetrizedGraph
    atoms: Mapping[str, float] = field(default_factory=dict)
    densities: Mapping[str, float] = field(default_factory=dict)

    def atom(self, v: str) -> float:
        return self.atoms.get(v, 0.0)

    def density(self, eid: str) -> float:
        return self.densities.get(eid, 0.0)

    def edge_mass(self, eid: str) -> float:
        return self.density(eid) * self.graph.edge(eid).length

    def __add__(self, other: "Measure") -> "Measure":
        atoms = {v: self.atom(v) + other.atom(v) for v in self.graph.vertices}
        dens = {e.id: self.density(e.id) + other.density(e.id) for e in self.graph.edges}
        return Measure(self.graph, atoms, dens)

    def __mul__(self, c: float) -> "Measure":
        return Measure(
            self.graph,
            {v: c * a for v, a in self.atoms.items()},
            {e: c * d for e, d in self.densities.items()},
        )

    __rmul__ = __mul__

    def on(self, graph: MetrizedGraph) -> "Measure":
        """The same measure re-attached to a graph with identical ids (e.g. rescaled)."""
        return Measure(graph, self.atoms, self.densities)


def total_mass(m: Measure) -> float:
    atoms = sum(m.atoms[v] for v in sorted(m.atoms))
    edges = sum(m.edge_mass(e.id) for e in m.graph.edges)
    return float(atoms + edges)


def edge_R(g: MetrizedGraph, eid: str) -> float:
    """Resistance between the endpoints of ``e`` once its interior is removed.

    ``inf`` for bridges and 0 for loops.
    """
    validate(g)
    e = g.edge(eid)
    if e.is_loop:
        return 0.0
    rest = g.without_edge(eid)
    if not rest.is_connected():
        return math.inf
    return vertex_resistance(rest, e.s, e.t)


def mu_can(g: MetrizedGraph) -> Measure:
    validate(g)
    atoms = {v: 1.0 - 0.5 * g.valences[v] for v in g.vertices}
    dens = {}
    for e in g.edges:
        R = edge_R(g, e.id)
        dens[e.id] = 0.0 if math.isinf(R) else 1.0 / (e.length + R)
    return Measure(g, atoms, dens)


def delta_K(g: MetrizedGraph, q: Polarization) -> Measure:
    K = canonical_divisor(g, q)
    return Measure(g, {p.vertex: float(c) for p, c in K.coefficients.items()}, {})


def mu_ad(g: MetrizedGraph, q: Polarization) -> Measure:
    gen = polarized_genus(g, q)
    if gen < 1:
        raise GenusTooSmall(f"admissible measure needs polarized genus >= 1, got {gen}")
    return (2.0 * mu_can(g) + delta_K(g, q)) * (1.0 / (2 * gen))


def edge_mass_sum(g: MetrizedGraph) -> float:
    """``Σ_e L(e) / (L(e) + R(e))``, which equals the genus of ``g``."""
    m = mu_can(g)
    return float(sum(m.edge_mass(e.id) for e in g.edges))


def check_edges(m: Measure, g: MetrizedGraph) -> None:
    ids = {e.id for e in g.edges}
    for eid in m.densities:
        if eid not in ids:
            raise UnknownEdge(f"measure density on unknown edge {eid!r}")
