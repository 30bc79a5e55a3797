"""Green functions, the ε- and φ-invariants, exact edge quadrature.

All integrands that occur here are polynomials of degree at most 3 on
pieces of edges, with kinks only where the moving point meets a fixed one.
The evaluator therefore subdivides the graph once, at every edge midpoint,
every query offset and the midpoint of each resulting piece, computes one
resistance matrix on that refinement, and evaluates integrals with Simpson's
rule piece by piece. Everything is expressed through resistances via

    j_z(x, y) = (r(x, z) + r(y, z) − r(x, y)) / 2,

so that ``j_μ(x, y) = (R_μ(x) + R_μ(y) − μ(Γ) r(x, y)) / 2`` with
``R_μ(x) = ∫ r(x, z) dμ(z)``, and ``c_μ = ½ ∬ r dμ dμ``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from numpy.polynomial import Polynomial

from .electric import laplacian, resistance_matrix, vertex_voltages
from .errors import DomainMismatch, GenusTooSmall, NotProbability
from .graph import (
    AtVertex,
    GraphPoint,
    MetrizedGraph,
    OnEdge,
    Polarization,
    polarized_genus,
    subdivide_many,
    subdivide_uniform,
    total_length,
    validate,
)
from .measures import Measure, delta_K, mu_ad, total_mass

MASS_TOL = 1e-9


def _check_probability(mu: Measure) -> None:
    m = total_mass(mu)
    if abs(m - 1.0) > MASS_TOL:
        raise NotProbability(f"measure has total mass {m}, expected 1")


class QuadratureGrid:
    """Refinement of ``g`` on which every integral here is an exact Simpson sum.

    Each edge is cut at its midpoint and at any requested offsets (the
    *breakpoints*); each resulting piece is cut once more at its midpoint.
    ``R_μ`` is exact at vertices and breakpoints.
    """

    def __init__(self, g: MetrizedGraph, extra_points: Iterable[GraphPoint] = ()):
        validate(g)
        self.graph = g
        extra: dict[str, set[float]] = {e.id: set() for e in g.edges}
        for p in extra_points:
            p = g.check_point(p)
            if isinstance(p, OnEdge):
                extra[p.edge].add(p.offset)
        self.pieces: dict[str, list[tuple[float, float]]] = {}
        points: list[GraphPoint] = []
        for e in g.edges:
            stops = sorted({0.0, e.length / 2, e.length} | extra[e.id])
            pieces = list(zip(stops[:-1], stops[1:]))
            self.pieces[e.id] = pieces
            for lo, hi in pieces:
                for off in (lo, (lo + hi) / 2):
                    if off > 0:
                        points.append(OnEdge(e.id, off))
        refined, where, self.relabel = subdivide_many(g, points)
        self.refined = refined
        self._where = where
        self.r = resistance_matrix(refined)

    def index(self, p: GraphPoint) -> int:
        p = self.graph.check_point(p)
        if isinstance(p, AtVertex):
            return self.refined.index(p.vertex)
        return self.refined.index(self.relabel(p).vertex)

    def at(self, eid: str, offset: float) -> int:
        return self.index(self.graph.point(eid, offset))

    def weights(self, mu: Measure) -> np.ndarray:
        """Node weights turning ``∫ f dμ`` into a dot product.

        Exact for ``f`` polynomial of degree ≤ 3 on every piece.
        """
        w = np.zeros(len(self.refined.vertices))
        for v in sorted(mu.atoms):
            w[self.refined.index(v)] += mu.atoms[v]
        for e in self.graph.edges:
            rho = mu.density(e.id)
            if rho == 0.0:
                continue
            for lo, hi in self.pieces[e.id]:
                h = (hi - lo) * rho / 6.0
                w[self.at(e.id, lo)] += h
                w[self.at(e.id, (lo + hi) / 2)] += 4 * h
                w[self.at(e.id, hi)] += h
        return w


class GreenEvaluator:
    """Green function data for a fixed graph and measure.

    Query points must be passed as ``extra_points`` at construction if they
    lie in the interior of an edge.
    """

    def __init__(self, g: MetrizedGraph, mu: Measure, extra_points: Iterable[GraphPoint] = ()):
        self.graph = g
        self.mu = mu
        self.grid = QuadratureGrid(g, extra_points)
        self.mass = total_mass(mu)
        self._R = self.grid.r @ self.grid.weights(mu)

    def R(self, p: GraphPoint) -> float:
        """``∫ r(p, z) dμ(z)``."""
        return float(self._R[self.grid.index(p)])

    def _R_edge(self, eid: str) -> tuple[float, float, float]:
        L = self.graph.edge(eid).length
        return tuple(float(self._R[self.grid.at(eid, t)]) for t in (0.0, L / 2, L))

    def r(self, x: GraphPoint, y: GraphPoint) -> float:
        return float(self.grid.r[self.grid.index(x), self.grid.index(y)])

    def j(self, x: GraphPoint, y: GraphPoint) -> float:
        return 0.5 * (self.R(x) + self.R(y) - self.mass * self.r(x, y))

    @property
    def c(self) -> float:
        if not hasattr(self, "_c"):
            # R_μ is a quadratic on each whole edge
            total = sum(self.mu.atoms[v] * self.R(AtVertex(v)) for v in sorted(self.mu.atoms))
            for e in self.graph.edges:
                rho = self.mu.density(e.id)
                if rho:
                    a, m, b = self._R_edge(e.id)
                    total += rho * e.length * (a + 4 * m + b) / 6.0
            self._c = 0.5 * total
        return self._c

    def g(self, x: GraphPoint, y: GraphPoint) -> float:
        return self.j(x, y) - self.c

    def diagonal(self) -> "EdgePiecewisePoly":
        c = self.c
        vertex_values = {v: self.R(AtVertex(v)) - c for v in self.graph.vertices}
        pieces = {}
        for e in self.graph.edges:
            a, m, b = (x - c for x in self._R_edge(e.id))
            pieces[e.id] = ((0.0, e.length), (_quadratic_through(a, m, b, e.length),))
        return EdgePiecewisePoly(self.graph, vertex_values, pieces)


def _quadratic_through(a: float, m: float, b: float, L: float) -> Polynomial:
    """Quadratic in the offset taking values a, m, b at 0, L/2, L."""
    return Polynomial([a, (-3 * a + 4 * m - b) / L, (2 * a - 4 * m + 2 * b) / L**2])


@dataclass(frozen=True)
class EdgePiecewisePoly:
    """A continuous function on a graph, polynomial on pieces of each edge.

    ``pieces[e] = (breakpoints, polys)`` with ``breakpoints`` running from 0
    to ``L(e)`` and ``polys[i]`` a polynomial in the offset along ``e``
    valid between ``breakpoints[i]`` and ``breakpoints[i + 1]``.
    """

    graph: MetrizedGraph
    vertex_values: Mapping[str, float]
    pieces: Mapping[str, tuple[tuple[float, ...], tuple[Polynomial, ...]]]

    def __call__(self, p: GraphPoint) -> float:
        p = self.graph.check_point(p)
        if isinstance(p, AtVertex):
            return float(self.vertex_values[p.vertex])
        stops, polys = self.pieces[p.edge]
        k = int(np.searchsorted(stops, p.offset, side="right")) - 1
        return float(polys[min(max(k, 0), len(polys) - 1)](p.offset))

    def continuity_defect(self) -> float:
        """Largest mismatch between adjacent pieces or against vertex values."""
        worst = 0.0
        for e in self.graph.edges:
            stops, polys = self.pieces[e.id]
            worst = max(worst, abs(polys[0](0.0) - self.vertex_values[e.s]))
            worst = max(worst, abs(polys[-1](stops[-1]) - self.vertex_values[e.t]))
            for k in range(1, len(polys)):
                worst = max(worst, abs(polys[k](stops[k]) - polys[k - 1](stops[k])))
        return float(worst)


def integrate_against(f: EdgePiecewisePoly, mu: Measure) -> float:
    """``∫ f dμ``; exact for pieces of degree ≤ 3."""
    ids = {e.id: e.length for e in f.graph.edges}
    if ids != {e.id: e.length for e in mu.graph.edges} or set(f.graph.vertices) != set(mu.graph.vertices):
        raise DomainMismatch("function and measure live on different graphs")
    total = sum(mu.atoms[v] * f.vertex_values[v] for v in sorted(mu.atoms))
    for e in f.graph.edges:
        rho = mu.density(e.id)
        if not rho:
            continue
        stops, polys = f.pieces[e.id]
        for lo, hi, poly in zip(stops[:-1], stops[1:], polys):
            total += rho * (hi - lo) * (poly(lo) + 4 * poly((lo + hi) / 2) + poly(hi)) / 6.0
    return float(total)


# -- public operations -------------------------------------------------------


def j_mu(g: MetrizedGraph, mu: Measure, x: GraphPoint, y: GraphPoint) -> float:
    return GreenEvaluator(g, mu, [x, y]).j(x, y)


def c_mu(g: MetrizedGraph, mu: Measure) -> float:
    _check_probability(mu)
    return GreenEvaluator(g, mu).c


def c_mu_reference(g: MetrizedGraph, mu: Measure, y: str) -> float:
    """``c_μ = ∬ j_z(x, y) dμ(x) dμ(z)`` straight from grounded potentials.

    Independent of the resistance identity used elsewhere; ``y`` is any
    vertex. For each ground ``z`` at a vertex or an edge midpoint the
    potentials are solved on the refinement, integrated in ``x`` piece by
    piece, then integrated in ``z`` (a quadratic on each edge).
    """
    _check_probability(mu)
    grid = QuadratureGrid(g)
    w = grid.weights(mu)
    ref = grid.refined

    def inner(zi: int) -> float:
        pot = vertex_voltages(ref, y, ref.vertices[zi])
        vals = np.array([pot[v] for v in ref.vertices])
        return float(vals @ w)

    total = sum(mu.atoms[v] * inner(ref.index(v)) for v in sorted(mu.atoms))
    for e in g.edges:
        rho = mu.density(e.id)
        if rho:
            a, m, b = (inner(grid.at(e.id, t)) for t in (0.0, e.length / 2, e.length))
            total += rho * e.length * (a + 4 * m + b) / 6.0
    return float(total)


def g_mu(g: MetrizedGraph, mu: Measure, x: GraphPoint, y: GraphPoint) -> float:
    _check_probability(mu)
    return GreenEvaluator(g, mu, [x, y]).g(x, y)


def diagonal_green(g: MetrizedGraph, mu: Measure) -> EdgePiecewisePoly:
    """Tabulates ``x ↦ g_μ(x, x)`` as one quadratic per edge."""
    _check_probability(mu)
    return GreenEvaluator(g, mu).diagonal()


def _require_genus(g: MetrizedGraph, q: Polarization) -> int:
    gen = polarized_genus(g, q)
    if gen < 1:
        raise GenusTooSmall(f"polarized genus must be >= 1, got {gen}")
    return gen


def epsilon(g: MetrizedGraph, q: Polarization) -> float:
    """``∬ r(x, y) δ_K(x) μ_ad(y)``."""
    _require_genus(g, q)
    ev = GreenEvaluator(g, mu_ad(g, q))
    dk = delta_K(g, q)
    return float(sum(dk.atoms[v] * ev.R(AtVertex(v)) for v in sorted(dk.atoms)))


def phi(g: MetrizedGraph, q: Polarization) -> float:
    """φ-invariant: ``−ℓ/4 + ¼ ∫ g_{μ_ad}(x,x) ((10g+2) μ_ad − δ_K)``."""
    gen = _require_genus(g, q)
    mu = mu_ad(g, q)
    diag = GreenEvaluator(g, mu).diagonal()
    weight = (10 * gen + 2) * mu + (-1.0) * delta_K(g, q)
    return -0.25 * total_length(g) + 0.25 * integrate_against(diag, weight)


# -- brute-force oracle ------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    k: int
    phi: float
    epsilon: float
    c: float


def discretization_oracle(g: MetrizedGraph, q: Polarization, k: int) -> OracleResult:
    """Brute-force φ, ε and c_{μ_ad} from a k-piece discretization.

    Every edge is cut into ``k`` equal pieces and the admissible density on a
    piece is lumped into an atom at its midpoint. Voltages come from the
    Laplacian pseudoinverse of the refinement, used directly in the
    definitions ``j_μ(x,y) = Σ_z μ(z) j_z(x,y)`` and ``c = Σ_x μ(x) j_μ(x,y)``.
    Errors decay like ``1/k²``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    gen = _require_genus(g, q)
    mu = mu_ad(g, q)
    dk = delta_K(g, q)
    refined, chains = subdivide_uniform(g, 2 * k)
    n = len(refined.vertices)
    w = np.zeros(n)
    kvec = np.zeros(n)
    for v, a in mu.atoms.items():
        w[refined.index(v)] += a
    for v, a in dk.atoms.items():
        kvec[refined.index(v)] += a
    for e in g.edges:
        rho = mu.density(e.id)
        if rho:
            for i in range(k):
                w[refined.index(chains[e.id][2 * i + 1])] += rho * e.length / k
    P = np.linalg.pinv(laplacian(refined), hermitian=True)
    d = np.diag(P)
    W = w.sum()
    y = refined.index(g.vertices[0])
    Pw = P @ w
    jy = W * P[:, y] - Pw - w @ P[:, y] + w @ d
    c = float(w @ jy)
    jdiag = W * d - 2 * Pw + w @ d
    gdiag = jdiag - c
    phi_k = -0.25 * total_length(g) + 0.25 * float(gdiag @ ((10 * gen + 2) * w - kvec))
    rmat = d[:, None] + d[None, :] - 2 * P
    eps_k = float(kvec @ rmat @ w)
    return OracleResult(k, phi_k, eps_k, c)


def richardson(f1: float, f2: float, f4: float, order: float = 2.0) -> tuple[float, float]:
    """Extrapolate values at mesh h, h/2, h/4; also return the observed order."""
    d1, d2 = abs(f1 - f2), abs(f2 - f4)
    observed = math.log2(d1 / d2) if d1 > 0 and d2 > 0 else math.inf
    return f4 + (f4 - f2) / (2.0**order - 1.0), observed
