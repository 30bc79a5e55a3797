import math

import numpy as np
import pytest

from phigraph import errors, generators, invariants, measures
from phigraph.graph import AtVertex, Edge, MetrizedGraph, OnEdge, polarized_genus, subdivide, total_length

GAUSS_X, GAUSS_W = np.polynomial.legendre.leggauss(4)


def gauss_integral(g, mu, f, cuts=None):
    """∫ f dμ with 4-point Gauss–Legendre on each piece between ``cuts`` (default: none)."""
    total = sum(a * f(AtVertex(v)) for v, a in mu.atoms.items())
    for e in g.edges:
        rho = mu.density(e.id)
        if not rho:
            continue
        stops = sorted({0.0, e.length, *(cuts or {}).get(e.id, ())})
        for lo, hi in zip(stops[:-1], stops[1:]):
            for x, w in zip(GAUSS_X, GAUSS_W):
                t = lo + (hi - lo) * (x + 1) / 2
                total += rho * w * (hi - lo) / 2 * f(OnEdge(e.id, t))
    return total


def theta(L=(1.0, 1.0, 1.0)):
    return MetrizedGraph(("a", "b"), tuple(Edge(f"e{i}", "a", "b", x) for i, x in enumerate(L)))


def random_case(rng, max_edges=6):
    g = generators.random_graph(rng, max_edges=max_edges)
    return g, generators.random_polarization(rng, g)


def test_segment_and_circle():
    for L in (0.3, 2.0):
        seg = MetrizedGraph(("a", "b"), (Edge("e", "a", "b", L),))
        assert invariants.phi(seg, {"a": 1, "b": 1}) == pytest.approx(L, abs=1e-12)
        circ = MetrizedGraph(("v",), (Edge("e", "v", "v", L),))
        assert invariants.phi(circ, {"v": 0}) == pytest.approx(0.0, abs=1e-12)
        assert invariants.c_mu(circ, measures.mu_can(circ)) == pytest.approx(L / 12)


@pytest.mark.parametrize("gen", [2, 3, 5])
def test_loop_on_vertex_of_positive_genus(gen):
    # r(v, ·) on a circle is d(L-d)/L, so ε = 2(g-1)/g · L/6 by direct integration
    L = 1.7
    g = MetrizedGraph(("v",), (Edge("e", "v", "v", L),))
    q = {"v": gen - 1}
    assert invariants.epsilon(g, q) == pytest.approx(2 * (gen - 1) / gen * L / 6, rel=1e-12)
    assert invariants.phi(g, q) == pytest.approx((gen - 1) * L / (6 * gen), rel=1e-10)


def test_c_independent_of_reference_point(rng):
    for _ in range(10):
        g, q = random_case(rng)
        mu = measures.mu_ad(g, q)
        c = invariants.c_mu(g, mu)
        for v in g.vertices[:3]:
            assert invariants.c_mu_reference(g, mu, v) == pytest.approx(c, abs=1e-9)


def test_green_symmetric_and_normalized(rng):
    for _ in range(8):
        g, q = random_case(rng, max_edges=5)
        mu = measures.mu_ad(g, q)
        e = rng.choice(g.edges)
        x = OnEdge(e.id, 0.3 * e.length)
        y = AtVertex(rng.choice(g.vertices))
        # query points needed for the Gauss nodes are registered up front
        nodes = []
        for f in g.edges:
            stops = sorted({0.0, f.length, *([x.offset] if f.id == e.id else [])})
            for lo, hi in zip(stops[:-1], stops[1:]):
                nodes += [OnEdge(f.id, lo + (hi - lo) * (t + 1) / 2) for t in GAUSS_X]
        ev = invariants.GreenEvaluator(g, mu, [x, *nodes])
        assert ev.g(x, y) == pytest.approx(ev.g(y, x), abs=1e-12)
        total = gauss_integral(g, mu, lambda p: ev.g(x, p), cuts={e.id: [x.offset]})
        assert abs(total) < 1e-8


def test_diagonal_is_one_quadratic_per_edge(rng):
    g, q = random_case(rng)
    mu = measures.mu_ad(g, q)
    diag = invariants.diagonal_green(g, mu)
    assert diag.continuity_defect() < 1e-9
    for e in g.edges:
        _, polys = diag.pieces[e.id]
        assert all(p.degree() <= 2 for p in polys)
        t = 0.123 * e.length
        ev = invariants.GreenEvaluator(g, mu, [OnEdge(e.id, t)])
        assert diag(OnEdge(e.id, t)) == pytest.approx(ev.g(OnEdge(e.id, t), OnEdge(e.id, t)), abs=1e-9)


def test_simpson_weights_integrate_cubics_exactly(rng):
    g, q = random_case(rng)
    mu = measures.mu_ad(g, q)
    grid = invariants.QuadratureGrid(g)
    w = grid.weights(mu)
    coef = {e.id: rng.uniform(-1, 1) for e in g.edges}

    def f(p):
        if isinstance(p, AtVertex):
            return 1.0
        e = g.edge(p.edge)
        t = p.offset
        return 1.0 + coef[e.id] * t * (e.length - t) * (t + 1.0)

    vals = np.zeros(len(grid.refined.vertices))
    vals[:] = np.nan
    for v in g.vertices:
        vals[grid.index(AtVertex(v))] = 1.0
    for e in g.edges:
        for lo, hi in grid.pieces[e.id]:
            for t in (lo, (lo + hi) / 2, hi):
                p = g.point(e.id, t)
                vals[grid.index(p)] = f(p)
    assert float(np.nansum(vals * w)) == pytest.approx(gauss_integral(g, mu, f), abs=1e-10)


def test_scaling(rng):
    for _ in range(10):
        g, q = random_case(rng)
        lam = rng.uniform(0.2, 5)
        h = g.scaled(lam)
        assert invariants.phi(h, q) == pytest.approx(lam * invariants.phi(g, q), rel=1e-9, abs=1e-12)
        assert invariants.epsilon(h, q) == pytest.approx(lam * invariants.epsilon(g, q), rel=1e-9, abs=1e-12)


def test_subdivision_invariance(rng):
    for _ in range(10):
        g, q = random_case(rng)
        e = rng.choice(g.edges)
        refined, vid, _ = subdivide(g, OnEdge(e.id, 0.41 * e.length))
        q2 = dict(q, **{vid: 0})
        assert invariants.phi(refined, q2) == pytest.approx(invariants.phi(g, q), abs=1e-9)
        assert invariants.epsilon(refined, q2) == pytest.approx(invariants.epsilon(g, q), abs=1e-9)


def test_phi_through_energy_and_epsilon(rng):
    # expanding g(x,x) = R(x) - c gives φ = -ℓ/4 + 3g·c - ε/4
    for _ in range(20):
        g, q = random_case(rng)
        gen = polarized_genus(g, q)
        c = invariants.c_mu(g, measures.mu_ad(g, q))
        rhs = -total_length(g) / 4 + 3 * gen * c - invariants.epsilon(g, q) / 4
        assert invariants.phi(g, q) == pytest.approx(rhs, abs=1e-9)


def test_phi_nonnegative(rng):
    for _ in range(40):
        g, q = random_case(rng)
        assert invariants.phi(g, q) >= -1e-9


def test_oracle_on_theta():
    g = theta()
    q = {"a": 0, "b": 0}
    vals = [invariants.discretization_oracle(g, q, k) for k in (8, 16, 32)]
    extrap, order = invariants.richardson(*(v.phi for v in vals))
    assert extrap == pytest.approx(invariants.phi(g, q), abs=1e-6)
    assert order == pytest.approx(2.0, abs=0.1)
    c_ex, _ = invariants.richardson(*(v.c for v in vals))
    assert c_ex == pytest.approx(invariants.c_mu(g, measures.mu_ad(g, q)), abs=1e-6)
    eps_ex, _ = invariants.richardson(*(v.epsilon for v in vals))
    assert eps_ex == pytest.approx(invariants.epsilon(g, q), abs=1e-6)


def test_errors():
    g = theta()
    with pytest.raises(errors.NotProbability):
        invariants.c_mu(g, 2.0 * measures.mu_can(g))
    other = theta((1.0, 2.0, 4.0))
    f = invariants.diagonal_green(g, measures.mu_can(g))
    with pytest.raises(errors.DomainMismatch):
        invariants.integrate_against(f, measures.mu_can(other))
    with pytest.raises(errors.InvalidPoint):
        invariants.j_mu(g, measures.mu_can(g), OnEdge("nope", 0.5), AtVertex("a"))
