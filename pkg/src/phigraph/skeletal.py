"""Skeletal functions: degree-1 homogeneous functions on the orthant.

Expressions are built from nonnegative linear forms, pointwise minima and
rational linear combinations, plus a node wrapping the φ-function of a
polarized graph. Evaluated at ``(−log|t_1|, …, −log|t_r|)`` they give Green
functions on the punctured polydisk.
"""
from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number, Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .degeneration import phi_function
from .errors import (
    ArityMismatch,
    BadMesh,
    BadType,
    EmptyExponentSet,
    GenusTooSmall,
    NegativeInput,
    OutOfDomain,
    ZeroExponent,
)
from .graph import MetrizedGraph, Polarization, genus, polarized_genus


class SkeletalFunction:
    arity: int

    def __call__(self, m: Sequence[Number]):
        return evaluate(self, m)

    def _eval(self, m):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class LinearForm(SkeletalFunction):
    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if any(c < 0 for c in self.coefficients):
            raise ValueError("linear form coefficients must be nonnegative")

    @property
    def arity(self) -> int:
        return len(self.coefficients)

    def _eval(self, m):
        return sum((c * x for c, x in zip(self.coefficients, m) if c), start=0)


@dataclass(frozen=True, eq=False)
class Min(SkeletalFunction):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("min of nothing")
        _same_arity(self.children)

    @property
    def arity(self) -> int:
        return self.children[0].arity

    def _eval(self, m):
        return min(c._eval(m) for c in self.children)


@dataclass(frozen=True, eq=False)
class LinComb(SkeletalFunction):
    weights: tuple
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.weights) != len(self.children) or not self.children:
            raise ValueError("need one weight per child")
        _same_arity(self.children)

    @property
    def arity(self) -> int:
        return self.children[0].arity

    def _eval(self, m):
        return sum((w * c._eval(m) for w, c in zip(self.weights, self.children)), start=0)


@dataclass(frozen=True, eq=False)
class GraphPhi(SkeletalFunction):
    """φ-function of a polarized graph; variable ``i`` is the length of edge ``i``."""

    graph: MetrizedGraph
    polarization: Mapping[str, int]

    def __post_init__(self):
        if polarized_genus(self.graph, self.polarization) < 1:
            raise GenusTooSmall("GraphPhi needs polarized genus >= 1")

    @property
    def arity(self) -> int:
        return len(self.graph.edges)

    def _eval(self, m):
        lengths = {e.id: float(x) for e, x in zip(self.graph.edges, m)}
        return phi_function(self.graph, self.polarization, lengths)


def _same_arity(children):
    ar = {c.arity for c in children}
    if len(ar) != 1:
        raise ArityMismatch(f"children have arities {sorted(ar)}")


def evaluate(f: SkeletalFunction, m: Sequence[Number]):
    """Value of ``f`` at ``m ≥ 0``; exact when ``f`` has no graph nodes and ``m`` is rational."""
    m = tuple(m)
    if len(m) != f.arity:
        raise ArityMismatch(f"expected {f.arity} coordinates, got {len(m)}")
    if any(x < 0 for x in m):
        raise NegativeInput(f"coordinates must be nonnegative: {m}")
    return f._eval(m)


def from_monomials(T: Iterable[Sequence[int]]) -> LinearForm | Min:
    """Skeletal function ``m ↦ min_{α∈T} α·m`` of the blow-up of a monomial ideal."""
    T = [tuple(int(a) for a in alpha) for alpha in T]
    if not T:
        raise EmptyExponentSet("exponent set is empty")
    if len({len(a) for a in T}) != 1:
        raise ArityMismatch("exponent vectors of different lengths")
    for alpha in T:
        if any(a < 0 for a in alpha):
            raise ValueError(f"negative exponent in {alpha}")
        if not any(alpha):
            raise ZeroExponent("zero exponent vector")
    forms = [LinearForm(a) for a in dict.fromkeys(T)]
    return forms[0] if len(forms) == 1 else Min(forms)


def monomial_pullback_multiplicity(T: Iterable[Sequence[int]], m: Sequence[int]) -> int:
    """``min_{α∈T} α·m`` in integer arithmetic."""
    T = [tuple(int(a) for a in alpha) for alpha in T]
    if not T:
        raise EmptyExponentSet("exponent set is empty")
    for alpha in T:
        if not any(alpha):
            raise ZeroExponent("zero exponent vector")
        if len(alpha) != len(m):
            raise ArityMismatch("exponent and multiplicity vectors differ in length")
    m = [int(x) for x in m]
    if any(x < 0 for x in m):
        raise NegativeInput("multiplicities must be nonnegative")
    return min(sum(a * x for a, x in zip(alpha, m)) for alpha in T)


def min_of(f1: SkeletalFunction, f2: SkeletalFunction) -> Min:
    return Min((f1, f2))


def lin_comb(a: Rational, f1: SkeletalFunction, b: Rational, f2: SkeletalFunction) -> LinComb:
    return LinComb((a, b), (f1, f2))


def neg(f: SkeletalFunction) -> LinComb:
    return LinComb((-1,), (f,))


def signed_linear(coeffs: Sequence[Number]) -> SkeletalFunction:
    """A linear form with arbitrary signs, as a difference of nonnegative forms."""
    pos = tuple(c if c > 0 else 0 for c in coeffs)
    negc = tuple(-c if c < 0 else 0 for c in coeffs)
    if not any(negc):
        return LinearForm(pos)
    return LinComb((1, -1), (LinearForm(pos), LinearForm(negc)))


def green_eval(f: SkeletalFunction, t: Sequence[complex]) -> float:
    """``f(−log|t_1|, …, −log|t_r|)`` on the punctured polydisk."""
    t = [complex(x) for x in t]
    if len(t) < f.arity:
        raise ArityMismatch(f"need at least {f.arity} coordinates, got {len(t)}")
    for i, x in enumerate(t):
        if abs(x) >= 1:
            raise OutOfDomain(f"|t_{i + 1}| = {abs(x)} is not < 1")
        if i < f.arity and x == 0:
            raise OutOfDomain(f"t_{i + 1} = 0 lies on the boundary divisor")
    return float(evaluate(f, [-math.log(abs(x)) for x in t[: f.arity]]))


# -- approximation on the simplex ---------------------------------------------


def simplex_grid(r: int, N: int) -> list[tuple[int, ...]]:
    """Integer points ``k ≥ 0`` with ``Σ k = N``; ``k / N`` is the barycentric grid."""
    if r < 1 or N < 1:
        raise BadMesh(f"need r >= 1 and N >= 1, got r={r}, N={N}")
    out = []
    for bars in itertools.combinations(range(N + r - 1), r - 1):
        stops = (-1,) + bars + (N + r - 1,)
        out.append(tuple(stops[i + 1] - stops[i] - 1 for i in range(r)))
    return out


def _to_partial(k):
    return tuple(itertools.accumulate(k[:-1]))


def _from_partial(s, N):
    full = (0,) + tuple(s) + (N,)
    return tuple(full[i + 1] - full[i] for i in range(len(full) - 1))


def kuhn_cells(r: int, N: int) -> list[list[tuple[int, ...]]]:
    """Simplices of the Kuhn triangulation of the grid, as lists of grid points.

    In partial-sum coordinates ``s_i = k_1 + … + k_i`` the simplex is the
    order region ``0 ≤ s_1 ≤ … ≤ s_{r−1} ≤ N``, a union of Kuhn cells of the
    cube ``[0, N]^{r−1}``.
    """
    d = r - 1
    if d == 0:
        return [[(N,)]]
    cells = []
    for base in itertools.product(range(N), repeat=d):
        for perm in itertools.permutations(range(d)):
            pts = [tuple(base)]
            cur = list(base)
            for i in perm:
                cur[i] += 1
                pts.append(tuple(cur))
            if all(all(p[i] <= p[i + 1] for i in range(d - 1)) for p in pts):
                cells.append([_from_partial(p, N) for p in pts])
    return cells


def pl_interpolate(samples: Mapping[tuple[int, ...], float], N: int, m: Sequence[float]) -> float:
    """Direct evaluation of the Kuhn PL interpolant at a point of the simplex."""
    r = len(m)
    total = float(sum(m))
    s = [N * x / total for x in itertools.accumulate(m[:-1])]
    d = r - 1
    if d == 0:
        return samples[(N,)]
    base = [min(int(math.floor(x)), N - 1) for x in s]
    u = [x - b for x, b in zip(s, base)]
    perm = sorted(range(d), key=lambda i: (-u[i], -i))
    cur = list(base)
    val = (1 - u[perm[0]]) * samples[_from_partial(cur, N)]
    for pos, i in enumerate(perm):
        cur[i] += 1
        nxt = u[perm[pos + 1]] if pos + 1 < d else 0.0
        val += (u[i] - nxt) * samples[_from_partial(cur, N)]
    return val


def approximate(samples: Mapping[tuple[int, ...], float], N: int, tol: float = 1e-12) -> SkeletalFunction:
    """Skeletal expression interpolating grid samples on the simplex.

    ``samples`` maps integer grid points ``k`` (``Σ k = N``) to the target
    value at ``k / N``. The result uses only linear forms, minima and linear
    combinations; on the simplex it equals the PL interpolant on the Kuhn
    triangulation, and off the simplex its degree-1 homogeneous extension.
    It is the max-min lattice form: with ``ℓ_i`` the linear piece on cell
    ``C_i`` and ``S_i`` the pieces dominating ``ℓ_i`` on ``C_i``,
    ``f = max_i min_{j∈S_i} ℓ_j``.
    """
    if N < 1:
        raise BadMesh(f"mesh must be 1/N with N >= 1, got N={N}")
    keys = list(samples)
    if not keys:
        raise BadMesh("no samples")
    r = len(keys[0])
    grid = simplex_grid(r, N)
    missing = [k for k in grid if k not in samples]
    if missing or len(samples) != len(grid):
        raise BadMesh(f"samples must cover exactly the {len(grid)} grid points of mesh 1/{N}")
    if not all(math.isfinite(float(v)) for v in samples.values()):
        raise BadMesh("samples must be finite")

    cells = kuhn_cells(r, N)
    pieces: list[np.ndarray] = []
    cell_pieces: list[int] = []
    cell_vertices: list[np.ndarray] = []
    for cell in cells:
        V = np.array(cell, dtype=float) / N
        vals = np.array([float(samples[k]) for k in cell])
        coef = np.linalg.solve(V, vals)
        for idx, p in enumerate(pieces):
            if np.allclose(p, coef, rtol=0, atol=tol):
                cell_pieces.append(idx)
                break
        else:
            pieces.append(coef)
            cell_pieces.append(len(pieces) - 1)
        cell_vertices.append(V)

    forms = [signed_linear([float(c) for c in p]) for p in pieces]
    if len(forms) == 1:
        return forms[0]
    scale = tol * (1.0 + max(abs(float(v)) for v in samples.values()))
    mins = []
    seen = set()
    for V, i in zip(cell_vertices, cell_pieces):
        own = V @ pieces[i]
        S = tuple(j for j, p in enumerate(pieces) if np.all(V @ p >= own - scale))
        if S in seen:
            continue
        seen.add(S)
        mins.append(forms[S[0]] if len(S) == 1 else Min(tuple(forms[j] for j in S)))
    if len(mins) == 1:
        return mins[0]
    return neg(Min(tuple(neg(h) for h in mins)))


# -- φ of polarized graphs as a skeletal function ------------------------------


def phi_skeletal(g: MetrizedGraph, q: Polarization) -> GraphPhi:
    gen = polarized_genus(g, q)
    if gen < 1:
        raise GenusTooSmall(f"polarized genus must be >= 1, got {gen}")
    if gen < 2:
        warnings.warn("polarized genus 1 lies outside the moduli setting", stacklevel=2)
    return GraphPhi(g, dict(q))


def phi_tree_closed_form(types: Iterable[tuple[int, float]], g: int) -> float:
    """``Σ 2j(g−j)/g · δ_j`` over ``(j, δ_j)`` pairs."""
    if g < 2:
        raise BadType(f"genus must be >= 2, got {g}")
    total = 0.0
    for j, delta in types:
        if not 1 <= j <= g // 2:
            raise BadType(f"type {j} outside 1..{g // 2}")
        if delta < 0:
            raise BadType(f"negative length {delta} for type {j}")
        total += 2 * j * (g - j) / g * delta
    return total


def tree_edge_types(g: MetrizedGraph, q: Polarization) -> dict[str, int]:
    """Type of every edge of a tree: the smaller polarized genus of the two sides."""
    if genus(g) != 0:
        raise BadType("edge types are only defined here for trees")
    gen = polarized_genus(g, q)
    types = {}
    for e in g.edges:
        side = _side(g.without_edge(e.id), e.s)
        i = sum(int(q.get(v, 0)) for v in side)
        types[e.id] = min(i, gen - i)
    return types


def _side(g: MetrizedGraph, start: str) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for e in g.incidence[v]:
            w = e.t if e.s == v else e.s
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def phi_tree(g: MetrizedGraph, q: Polarization) -> float:
    """φ of a polarized tree from its edge types."""
    types = tree_edge_types(g, q)
    return phi_tree_closed_form([(types[e.id], e.length) for e in g.edges], polarized_genus(g, q))


def phi_asymptotic(g: MetrizedGraph, q: Polarization, u: Sequence[complex]) -> float:
    """Leading term ``φ̃(Γ, q; −log|u_1|, …)`` of φ for nearby smooth fibers.

    ``u_i`` pairs with the ``i``-th edge of ``g``. The remainder is not estimated.
    """
    gen = polarized_genus(g, q)
    if gen < 2:
        raise GenusTooSmall(f"asymptotics need polarized genus >= 2, got {gen}")
    if len(u) != len(g.edges):
        raise ArityMismatch(f"need one coordinate per edge ({len(g.edges)}), got {len(u)}")
    return green_eval(GraphPhi(g, dict(q)), u)


# -- serialization ------------------------------------------------------------


def _num_out(x):
    if isinstance(x, Fraction) and x.denominator != 1:
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return int(x)
    return float(x)


def _num_in(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return x
    return float(x)


def to_dict(f: SkeletalFunction) -> dict:
    from .io import graph_to_dict

    if isinstance(f, LinearForm):
        return {"kind": "linear", "coefficients": [_num_out(c) for c in f.coefficients]}
    if isinstance(f, Min):
        return {"kind": "min", "children": [to_dict(c) for c in f.children]}
    if isinstance(f, LinComb):
        return {
            "kind": "lincomb",
            "weights": [_num_out(w) for w in f.weights],
            "children": [to_dict(c) for c in f.children],
        }
    if isinstance(f, GraphPhi):
        return {"kind": "graphphi", "graph": graph_to_dict(f.graph, f.polarization)}
    raise TypeError(f"not a skeletal expression: {f!r}")


def from_dict(d: Mapping) -> SkeletalFunction:
    from .io import graph_from_dict

    kind = d.get("kind")
    if kind == "linear":
        return LinearForm(tuple(_num_in(c) for c in d["coefficients"]))
    if kind == "min":
        return Min(tuple(from_dict(c) for c in d["children"]))
    if kind == "lincomb":
        return LinComb(tuple(_num_in(w) for w in d["weights"]), tuple(from_dict(c) for c in d["children"]))
    if kind == "graphphi":
        g, q = graph_from_dict(d["graph"])
        return GraphPhi(g, q)
    raise ValueError(f"unknown skeletal node kind {kind!r}")


def dumps(f: SkeletalFunction) -> str:
    return json.dumps(to_dict(f), sort_keys=True)


def loads(s: str) -> SkeletalFunction:
    return from_dict(json.loads(s))
