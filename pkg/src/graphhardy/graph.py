"""Weighted graphs, graph functions and exhaustions by balls.

Two graph representations share one small interface (``neighbors``,
``potential``, ``root``):

* :class:`FiniteGraph` stores an explicit symmetric adjacency, built and
  validated by :func:`build_finite_graph`;
* :class:`OracleGraph` generates neighbours on demand, which is how the
  infinite families (half-line, lattices, trees) are represented.

Vertices are integers or tuples of integers.  Everything that iterates over
vertices does so in BFS order from the root with ties broken by vertex id,
so sums and matrix assemblies are reproducible.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AsymmetricInput,
    Disconnected,
    InputError,
    NonpositiveFunction,
    NonpositiveWeight,
    SelfLoop,
)

Vertex = Hashable


class GraphFunction:
    """A real valued function on the vertices of a graph.

    Either a closed-form callable or a finitely supported table.  ``support``
    is ``None`` for closed forms, and a frozenset outside of which the
    function vanishes otherwise.
    """

    __slots__ = ("_fn", "support", "name")

    def __init__(self, fn: Callable[[Vertex], float], support=None, name: str | None = None):
        self._fn = fn
        self.support = None if support is None else frozenset(support)
        self.name = name

    @classmethod
    def from_values(cls, values: Mapping[Vertex, float], name: str | None = None) -> "GraphFunction":
        table = MappingProxyType({x: float(val) for x, val in values.items()})
        return cls(lambda x: table.get(x, 0.0), support=table.keys(), name=name)

    @classmethod
    def constant(cls, c: float) -> "GraphFunction":
        c = float(c)
        return cls(lambda x: c, name=f"const({c!r})")

    def __call__(self, x: Vertex) -> float:
        return float(self._fn(x))

    def values(self, vertices: Iterable[Vertex]) -> np.ndarray:
        return np.array([self(x) for x in vertices], dtype=float)

    @property
    def is_finitely_supported(self) -> bool:
        return self.support is not None

    def __repr__(self):
        kind = "finite" if self.support is not None else "closed-form"
        return f"GraphFunction({self.name or '?'}, {kind})"


def as_function(f) -> Callable[[Vertex], float]:
    """Accept a GraphFunction, a plain callable or a mapping."""
    if isinstance(f, Mapping):
        return GraphFunction.from_values(f)
    return f


def support_of(f):
    return getattr(f, "support", None)


class WeightedGraph:
    """Common interface of finite and procedural graphs."""

    root: Vertex
    is_finite: bool = False
    metadata: Mapping = MappingProxyType({})

    def neighbors(self, x: Vertex) -> tuple[tuple[Vertex, float], ...]:
        raise NotImplementedError

    def potential(self, x: Vertex) -> float:
        raise NotImplementedError

    def weighted_degree(self, x: Vertex) -> float:
        return float(sum(b for _, b in self.neighbors(x)))

    def degree(self, x: Vertex) -> int:
        return len(self.neighbors(x))

    def weight(self, x: Vertex, y: Vertex) -> float:
        for z, b in self.neighbors(x):
            if z == y:
                return b
        return 0.0


class FiniteGraph(WeightedGraph):
    """Explicit finite graph; build it with :func:`build_finite_graph`."""

    is_finite = True

    def __init__(self, adjacency, potential, root, metadata=None):
        self._adj = MappingProxyType({x: tuple(nb) for x, nb in adjacency.items()})
        self._q = MappingProxyType(dict(potential))
        self.root = root
        self.metadata = MappingProxyType(dict(metadata or {}))
        self._order = _bfs_order(self._adj, root)

    def neighbors(self, x):
        return self._adj.get(x, ())

    def potential(self, x):
        return self._q.get(x, 0.0)

    def __contains__(self, x):
        return x in self._adj

    def __len__(self):
        return len(self._adj)

    @property
    def vertices(self) -> tuple:
        """Vertices in BFS order from the root (id tie-break)."""
        return self._order

    def edges(self):
        """Yield ``(x, y, b)`` once per undirected edge, in vertex order."""
        rank = {x: i for i, x in enumerate(self._order)}
        for x in self._order:
            for y, b in self._adj[x]:
                if rank[x] < rank[y]:
                    yield x, y, b

    def __repr__(self):
        return f"FiniteGraph(n={len(self)}, root={self.root!r})"


class OracleGraph(WeightedGraph):
    """Locally finite graph given by a neighbour generator.

    ``neighbor_fn(x)`` returns an iterable of ``(y, b)`` pairs.  Symmetry is
    the caller's responsibility; :func:`check_symmetry` spot-checks it.
    """

    def __init__(self, neighbor_fn, root, potential_fn=None, metadata=None, name=None):
        self._nbr = neighbor_fn
        self._q = potential_fn
        self.root = root
        self.metadata = MappingProxyType(dict(metadata or {}))
        self.name = name or "oracle"

    def neighbors(self, x):
        return tuple(sorted(((y, float(b)) for y, b in self._nbr(x)), key=lambda t: t[0]))

    def potential(self, x):
        return 0.0 if self._q is None else float(self._q(x))

    def __repr__(self):
        return f"OracleGraph({self.name}, root={self.root!r})"


def _bfs_order(adj, root):
    seen = {root}
    order = [root]
    level = [root]
    while level:
        nxt = set()
        for x in level:
            for y, _ in adj[x]:
                if y not in seen:
                    seen.add(y)
                    nxt.add(y)
        level = sorted(nxt)
        order.extend(level)
    return tuple(order)


def build_finite_graph(edges: Iterable[Sequence], potential: Mapping | None = None,
                       root=None, vertices: Iterable | None = None, metadata=None) -> FiniteGraph:
    """Validate an edge list and return the symmetric finite graph.

    Each undirected edge may be listed once, or in both orientations with the
    same weight.  Raises ``NonpositiveWeight``, ``SelfLoop``,
    ``AsymmetricInput`` or ``Disconnected``.
    """
    weights: dict[tuple, float] = {}
    verts = {_vertex(v) for v in vertices or ()}
    for item in edges:
        x, y, b = item
        x, y, b = _vertex(x), _vertex(y), float(b)
        if x == y:
            raise SelfLoop(f"self-loop at {x!r}")
        if not b > 0 or not np.isfinite(b):
            raise NonpositiveWeight(f"edge ({x!r}, {y!r}) has weight {b!r}")
        key = (x, y) if _key(x) <= _key(y) else (y, x)
        if key in weights and weights[key] != b:
            raise AsymmetricInput(
                f"conflicting weights {weights[key]!r} and {b!r} for edge {key!r}")
        weights[key] = b
        verts.update(key)
    potential = {_vertex(k): float(v) for k, v in (potential or {}).items()}
    verts.update(potential)
    if not verts:
        raise InputError("graph has no vertices")
    adj: dict = {x: [] for x in verts}
    for (x, y), b in weights.items():
        adj[x].append((y, b))
        adj[y].append((x, b))
    for x in adj:
        adj[x].sort(key=lambda t: _key(t[0]))
    if root is None:
        root = min(verts, key=_key)
    root = _vertex(root)
    if root not in adj:
        raise InputError(f"root {root!r} is not a vertex")
    graph = FiniteGraph(adj, potential, root, metadata)
    if len(graph.vertices) != len(adj):
        raise Disconnected(
            f"{len(adj) - len(graph.vertices)} vertices unreachable from root {root!r}")
    return graph


def _vertex(x):
    if isinstance(x, (list, tuple)):
        return tuple(int(c) for c in x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    raise InputError(f"vertex ids must be integers or integer tuples, got {x!r}")


def _key(x):
    # ints sort before tuples; only matters for mixed-id graphs
    return (0, x, ()) if isinstance(x, int) else (1, 0, x)


def ball(graph: WeightedGraph, N: int, root=None) -> tuple:
    """Vertices at combinatorial distance ``<= N`` from ``root``.

    Returned in BFS order, each distance shell sorted by vertex id.
    """
    if N < 0:
        raise InputError("radius must be nonnegative")
    root = graph.root if root is None else root
    seen = {root}
    order = [root]
    level = [root]
    for _ in range(N):
        nxt = set()
        for x in level:
            for y, _ in graph.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    nxt.add(y)
        if not nxt:
            break
        level = sorted(nxt)
        order.extend(level)
    return tuple(order)


def shells(graph: WeightedGraph, N: int, root=None) -> list[tuple]:
    """Distance shells ``S_0, ..., S_N`` (empty tail once the graph is exhausted)."""
    root = graph.root if root is None else root
    seen = {root}
    out = [(root,)]
    level = [root]
    for _ in range(N):
        nxt = set()
        for x in level:
            for y, _ in graph.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    nxt.add(y)
        level = sorted(nxt)
        out.append(tuple(level))
    return out


def boundary_layer(graph: WeightedGraph, region) -> frozenset:
    """Vertices of ``region`` having at least one neighbour outside it."""
    inside = region if isinstance(region, (set, frozenset)) else set(region)
    return frozenset(x for x in inside if any(y not in inside for y, _ in graph.neighbors(x)))


def outer_boundary(graph: WeightedGraph, region) -> tuple:
    inside = region if isinstance(region, (set, frozenset)) else set(region)
    out = {y for x in inside for y, _ in graph.neighbors(x) if y not in inside}
    return tuple(sorted(out))


@dataclass(frozen=True)
class Exhaustion:
    """Balls ``B_N`` around ``root``; results are memoised per radius."""

    graph: WeightedGraph
    root: Vertex = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.root is None:
            object.__setattr__(self, "root", self.graph.root)

    def ball(self, N: int) -> tuple:
        if N not in self._cache:
            self._cache[N] = ball(self.graph, N, self.root)
        return self._cache[N]

    def boundary_layer(self, N: int) -> frozenset:
        return boundary_layer(self.graph, self.ball(N))


def materialize(graph: WeightedGraph, radius: int, root=None) -> FiniteGraph:
    """The induced finite subgraph on ``B_radius`` (potential carried over).

    Edges leaving the ball are dropped, so the far end becomes a free
    (Neumann) boundary.
    """
    verts = ball(graph, radius, root)
    inside = set(verts)
    edges = [(x, y, b) for x in verts for y, b in graph.neighbors(x)
             if y in inside and _key(x) < _key(y)]
    pot = {x: graph.potential(x) for x in verts if graph.potential(x) != 0.0}
    return build_finite_graph(edges, pot, root=verts[0], vertices=verts,
                              metadata={**graph.metadata, "materialized_radius": radius})


def restrict(graph: WeightedGraph, removed: Iterable, root=None) -> WeightedGraph:
    """Restriction of the form to functions vanishing on ``removed``.

    The result lives on ``X \\ K`` and carries the extra potential
    ``q(x) + sum_{z in K} b(x, z)``; this is the Dirichlet operator obtained
    by freezing the values on ``K`` to zero.
    """
    K = frozenset(_vertex(z) for z in removed)
    if root is None:
        root = graph.root
    if root in K:
        raise InputError("new root must not be removed")

    def nbrs(x):
        return [(y, b) for y, b in graph.neighbors(x) if y not in K]

    def pot(x):
        return graph.potential(x) + sum(b for y, b in graph.neighbors(x) if y in K)

    meta = {**graph.metadata, "dirichlet": tuple(sorted(K, key=_key))}
    if graph.is_finite:
        keep = [x for x in graph.vertices if x not in K]
        keep_set = set(keep)
        edges = [(x, y, b) for x in keep for y, b in nbrs(x) if _key(x) < _key(y)]
        q = {x: pot(x) for x in keep if pot(x) != 0.0}
        if root not in keep_set:
            raise InputError("root not in restricted graph")
        return build_finite_graph(edges, q, root=root, vertices=keep, metadata=meta)
    return OracleGraph(nbrs, root, pot, metadata=meta,
                       name=f"{getattr(graph, 'name', 'graph')}\\K")


def check_symmetry(graph: WeightedGraph, radius: int = 5, root=None) -> int:
    """Spot-check ``b(x,y) = b(y,x)`` on the ball; returns the number of
    directed edges checked.

    Raises ``AsymmetricInput`` on any mismatch or ``SelfLoop``.
    """
    checked = 0
    for x in ball(graph, radius, root):
        for y, b in graph.neighbors(x):
            if y == x:
                raise SelfLoop(f"self-loop at {x!r}")
            back = graph.weight(y, x)
            if back != b:
                raise AsymmetricInput(f"b({x!r},{y!r})={b!r} but b({y!r},{x!r})={back!r}")
            checked += 1
    return checked


@dataclass(frozen=True)
class AssumptionReport:
    """Advisory check of the properness / anti-oscillation assumptions.

    ``level_counts`` maps each value of ``u0`` on the ball to its
    multiplicity.  Properness cannot be decided from a finite sample, hence
    ``advisory`` is always true.
    """

    edge_ratio_sup: float
    argmax_edge: tuple | None
    level_counts: Mapping[float, int]
    max_level_count: int
    sample_radius: int
    advisory: bool = True


def check_assumptions(u0, graph: WeightedGraph, sample_radius: int, root=None) -> AssumptionReport:
    u0 = as_function(u0)
    verts = ball(graph, sample_radius, root)
    inside = set(verts)
    vals = {x: u0(x) for x in verts}
    bad = [x for x, val in vals.items() if not val > 0]
    if bad:
        raise NonpositiveFunction(f"u0 is not positive at {bad[:5]!r}")
    sup, arg = -np.inf, None
    for x in verts:
        for y, _ in graph.neighbors(x):
            if y in inside:
                r = vals[x] / vals[y]
                if r > sup:
                    sup, arg = r, (x, y)
    if arg is None:
        sup = 1.0
    counts = Counter(vals.values())
    table = dict(sorted(counts.items()))
    return AssumptionReport(float(sup), arg, MappingProxyType(table),
                            max(counts.values()), sample_radius)


# --- JSON file format -------------------------------------------------------

def _encode_id(x):
    return list(x) if isinstance(x, tuple) else x


def _encode_key(x):
    return ",".join(str(c) for c in x) if isinstance(x, tuple) else str(x)


def _decode_key(s: str):
    s = s.strip()
    if "," in s or s.startswith("("):
        return tuple(int(c) for c in s.strip("()[]").split(",") if c.strip())
    return int(s)


def graph_to_json(graph: FiniteGraph) -> dict:
    return {
        "vertices": [_encode_id(x) for x in graph.vertices],
        "edges": [[_encode_id(x), _encode_id(y), b] for x, y, b in graph.edges()],
        "potential": {_encode_key(x): graph.potential(x)
                      for x in graph.vertices if graph.potential(x) != 0.0},
        "root": _encode_id(graph.root),
    }


def graph_from_json(data: Mapping) -> FiniteGraph:
    try:
        vertices = [_vertex(x) for x in data.get("vertices", [])]
        edges = [(e[0], e[1], e[2]) for e in data["edges"]]
        pot = {_decode_key(k): float(v) for k, v in (data.get("potential") or {}).items()}
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed graph JSON: {exc}") from exc
    root = data.get("root")
    return build_finite_graph(edges, pot, root=root, vertices=vertices)


def load_graph(path) -> FiniteGraph:
    with open(path) as fh:
        return graph_from_json(json.load(fh))


def save_graph(graph: FiniteGraph, path) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_json(graph), fh, indent=1)
