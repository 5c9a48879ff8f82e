"""Built-in graph families with standard (unit) weights, plus random test graphs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import UnsupportedFamily
from .graph import OracleGraph, build_finite_graph, restrict


def halfline() -> OracleGraph:
    """``N_0 = {0, 1, 2, ...}`` with unit weights between consecutive integers."""

    def nbrs(n):
        return ((n - 1, 1.0), (n + 1, 1.0)) if n > 0 else ((1, 1.0),)

    return OracleGraph(nbrs, 0, metadata=_meta("halfline", transient=False), name="halfline")


def halfline_dirichlet() -> OracleGraph:
    """The half-line with Dirichlet condition at 0.

    Lives on ``{1, 2, ...}``; the removed edge to 0 shows up as ``q(1) = 1``.
    """
    g = restrict(halfline(), [0], root=1)
    g.name = "halfline-dirichlet"
    return g


def integer_line() -> OracleGraph:
    return OracleGraph(lambda n: ((n - 1, 1.0), (n + 1, 1.0)), 0,
                       metadata=_meta("line", transient=False), name="Z")


def lattice(d: int) -> OracleGraph:
    """``Z^d`` with unit weights between nearest neighbours, rooted at the origin."""
    if d < 1:
        raise UnsupportedFamily(f"lattice dimension must be >= 1, got {d}")

    def nbrs(x):
        out = []
        for i in range(d):
            for e in (-1, 1):
                y = list(x)
                y[i] += e
                out.append((tuple(y), 1.0))
        return out

    return OracleGraph(nbrs, (0,) * d, metadata=_meta(f"lattice({d})", transient=d >= 3),
                       name=f"Z^{d}")


def regular_tree(degree: int) -> OracleGraph:
    """The ``degree``-regular tree; a vertex is the tuple of child indices
    along the path from the root.  Transient for ``degree >= 3``."""
    if degree < 2:
        raise UnsupportedFamily("regular tree needs degree >= 2")

    def nbrs(x):
        kids = degree if len(x) == 0 else degree - 1
        out = [(x + (i,), 1.0) for i in range(kids)]
        if x:
            out.append((x[:-1], 1.0))
        return out

    return OracleGraph(nbrs, (), metadata=_meta(f"tree({degree})", transient=degree >= 3),
                       name=f"T_{degree}")


def path_graph(n: int, potential: Mapping | None = None):
    """Finite path ``0 - 1 - ... - (n-1)``."""
    return build_finite_graph([(i, i + 1, 1.0) for i in range(n - 1)], potential,
                              root=0, vertices=range(n))


def random_graph(n: int, rng: np.random.Generator, weight_range=(0.0, 2.0),
                 q_range=None, extra_edge_prob=0.15):
    """Connected random graph on ``{0..n-1}``: random spanning tree plus extra edges.

    Weights are uniform on ``(lo, hi]``; with ``q_range`` a uniform potential
    is attached.
    """
    lo, hi = weight_range

    def weight():
        # uniform on (lo, hi]
        return hi - (hi - lo) * rng.random()

    edges = {}
    order = rng.permutation(n)
    for i in range(1, n):
        j = order[rng.integers(0, i)]
        a, b = sorted((int(order[i]), int(j)))
        edges[(a, b)] = weight()
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) not in edges and rng.random() < extra_edge_prob:
                edges[(a, b)] = weight()
    pot = None
    if q_range is not None:
        pot = {i: float(rng.uniform(*q_range)) for i in range(n)}
    return build_finite_graph([(a, b, w) for (a, b), w in sorted(edges.items())], pot,
                              root=0, vertices=range(n))


def _meta(name, transient):
    return {"family": name, "standard_weights": True, "bounded_degree": True,
            "transient": transient}


@dataclass(frozen=True)
class FamilySpec:
    """Named family plus parameters, as selected on the command line."""

    name: str
    params: Mapping = field(default_factory=dict)

    def build(self):
        if self.name == "halfline":
            return halfline()
        if self.name == "halfline-dirichlet":
            return halfline_dirichlet()
        if self.name == "line":
            return integer_line()
        if self.name == "lattice":
            return lattice(int(self.params.get("dim", 3)))
        if self.name == "tree":
            return regular_tree(int(self.params.get("degree", 3)))
        raise UnsupportedFamily(f"unknown family {self.name!r}")
