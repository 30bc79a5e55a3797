"""Random polarized graphs for property tests and benchmarks."""
from __future__ import annotations

import random

from .graph import Edge, MetrizedGraph, StableCurveDescription


def _lengths(rng: random.Random, n: int, lo: float, hi: float) -> list[float]:
    return [rng.uniform(lo, hi) for _ in range(n)]


def random_graph(
    rng: random.Random,
    max_edges: int = 10,
    min_edges: int = 1,
    loops: bool = True,
    lengths: tuple[float, float] = (0.1, 10.0),
) -> MetrizedGraph:
    """Connected multigraph: a random spanning tree plus extra edges (loops and parallels allowed)."""
    m = rng.randint(min_edges, max_edges)
    n = rng.randint(1, m + 1)
    if n == 1 and not loops:
        n = 2
        m = max(m, 1)
    vs = [f"v{i}" for i in range(n)]
    pairs = [(vs[rng.randrange(i)], vs[i]) for i in range(1, n)]
    while len(pairs) < m:
        a, b = rng.choice(vs), rng.choice(vs)
        if a == b and not loops:
            continue
        pairs.append((a, b))
    rng.shuffle(pairs)
    Ls = _lengths(rng, len(pairs), *lengths)
    edges = tuple(Edge(f"e{i}", a, b, L) for i, ((a, b), L) in enumerate(zip(pairs, Ls)))
    return MetrizedGraph(tuple(vs), edges)


def random_polarization(rng: random.Random, g: MetrizedGraph, extra: int = 2) -> dict[str, int]:
    """Smallest stable polarization plus up to ``extra`` random units per vertex."""
    q = {}
    for v in g.vertices:
        need = max(0, -((g.valence(v) - 2) // 2))  # ceil((2 - valence) / 2)
        q[v] = need + rng.randint(0, extra)
    return q


def random_tree(rng: random.Random, max_genus: int = 6, max_vertices: int = 6, lengths=(0.1, 10.0)):
    """Random metric tree with a stable polarization of polarized genus in [1, max_genus]."""
    while True:
        n = rng.randint(2, max_vertices)
        vs = [f"v{i}" for i in range(n)]
        edges = tuple(
            Edge(f"e{i - 1}", vs[rng.randrange(i)], vs[i], rng.uniform(*lengths)) for i in range(1, n)
        )
        g = MetrizedGraph(tuple(vs), edges)
        q = {v: (1 if g.valence(v) == 1 else 0) for v in vs}
        for v in vs:
            q[v] += rng.randint(0, 1)
        if sum(q.values()) <= max_genus:
            return g, q


def random_tree_curve(rng: random.Random, max_genus: int = 6) -> StableCurveDescription:
    """Stable curve whose dual graph is a tree, so every node is separating."""
    g, q = random_tree(rng, max_genus=max_genus)
    comps = tuple((v, q[v]) for v in g.vertices)
    nodes = tuple((e.s, e.t) for e in g.edges)
    return StableCurveDescription(comps, nodes, {i: e.length for i, e in enumerate(g.edges)})


def with_cycle(rng: random.Random, max_edges: int = 6) -> MetrizedGraph:
    """Random graph of genus at least one."""
    while True:
        g = random_graph(rng, max_edges=max_edges, min_edges=2)
        if len(g.edges) - len(g.vertices) + 1 >= 1:
            return g
