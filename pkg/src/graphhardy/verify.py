"""Seeded random trials of the algebraic identities.

Each trial draws a connected graph on at most ``max_vertices`` vertices
with weights in ``(0, 2]`` and evaluates one identity on it.  Trial ``i``
of seed ``s`` uses the generator ``default_rng([s, i])``, so any single
trial can be replayed in isolation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coarea import coarea_integral, level_flux, stokes_residual
from .errors import InputError
from .families import random_graph
from .graph import GraphFunction, build_finite_graph
from .schrodinger import (
    SchrodingerOperator,
    chain_rule_residual,
    gst_identity_residual,
    product_rule_residual,
)

IDENTITIES = ("product", "chain", "gst", "stokes", "coarea")
_POSITIVE_DOMAIN = ("inverse-t", "log")


@dataclass(frozen=True)
class TrialResult:
    trial: int
    identity: str
    vertices: int
    residual: float
    lhs: float | None = None
    rhs: float | None = None


def _values(rng, graph, lo=None, hi=None):
    if lo is None:
        vals = rng.normal(size=len(graph))
    else:
        vals = rng.uniform(lo, hi, size=len(graph))
    return GraphFunction.from_values(dict(zip(graph.vertices, vals.tolist())))


def _graph(rng, max_vertices, with_potential=False):
    n = int(rng.integers(2, max_vertices + 1))
    return random_graph(n, rng, q_range=(-1.0, 1.0) if with_potential else None)


def run_trial(identity: str, seed: int, trial: int, max_vertices: int = 50,
              f: str = "one", level_pairs: int = 12) -> TrialResult:
    """Evaluate ``identity`` on trial ``trial`` of ``seed``.

    Pointwise identities report the largest residual over all vertices;
    the Stokes formula is checked on ``level_pairs`` pairs of levels, half
    of them taken at values of ``u``.
    """
    if identity not in IDENTITIES:
        raise InputError(f"unknown identity {identity!r}")
    rng = np.random.default_rng([seed, trial])
    if identity == "gst":
        G = _graph(rng, max_vertices, with_potential=True)
        H = SchrodingerOperator(G)
        v = _values(rng, G, 0.1, 2.0)
        phi = _values(rng, G)
        return TrialResult(trial, identity, len(G), gst_identity_residual(H, v, phi))
    G = _graph(rng, max_vertices)
    H = SchrodingerOperator(G)
    if identity == "product":
        a, b = _values(rng, G), _values(rng, G)
        res = max(product_rule_residual(H, a, b, x) for x in G.vertices)
        return TrialResult(trial, identity, len(G), res)
    if identity == "chain":
        a, b = _values(rng, G, 0.1, 2.0), _values(rng, G, 0.1, 2.0)
        res = max(chain_rule_residual(H, a, b, x) for x in G.vertices)
        return TrialResult(trial, identity, len(G), res)
    u = _values(rng, G, 0.1, 3.0) if f in _POSITIVE_DOMAIN else _values(rng, G)
    if identity == "coarea":
        out = coarea_integral(G, u, f, G.vertices)
        return TrialResult(trial, identity, len(G), out.residual, out.lhs, out.rhs)
    flux = level_flux(G, u, G.vertices)
    bp = flux.breakpoints
    mids = 0.5 * (bp[1:] + bp[:-1])
    levels = np.concatenate([rng.choice(bp, level_pairs), rng.choice(mids, level_pairs)])
    pairs = np.sort(levels.reshape(-1, 2), axis=1)
    res = max(stokes_residual(G, u, float(a), float(b), flux=flux) for a, b in pairs)
    return TrialResult(trial, identity, len(G), res)


def run_trials(identities, seed: int, trials: int, max_vertices: int = 50, f: str = "one"):
    return [run_trial(name, seed, i, max_vertices, f) for i in range(trials) for name in identities]


def asymmetric_graph(seed: int):
    """Fault injection: an edge list giving one edge two different weights."""
    rng = np.random.default_rng(seed)
    w = float(rng.uniform(0.5, 1.5))
    return build_finite_graph([(0, 1, w), (1, 2, 1.0), (1, 0, w + 0.5)])
