"""Invariants of polarized metrized graphs: voltages, canonical and admissible
measures, Green functions, the φ and ε invariants, their behaviour under edge
contraction, and a small calculus of skeletal (piecewise-linear) functions."""
from .errors import PhiGraphError
from .graph import (
    AtVertex,
    Divisor,
    Edge,
    MetrizedGraph,
    OnEdge,
    StableCurveDescription,
    canonical_divisor,
    dual_graph,
    genus,
    polarized_genus,
    total_length,
)
from .electric import flow_oracle_voltages, resistance, slope_bound_check, vertex_voltages, voltage
from .measures import Measure, delta_K, mu_ad, mu_can, total_mass
from .invariants import c_mu, discretization_oracle, epsilon, g_mu, j_mu, phi, richardson
from .degeneration import contract, continuity_probe, epsilon_function, phi_function
from .skeletal import GraphPhi, LinComb, LinearForm, Min, approximate, evaluate, phi_asymptotic, phi_tree_closed_form

__all__ = [name for name in dir() if not name.startswith("_")]
