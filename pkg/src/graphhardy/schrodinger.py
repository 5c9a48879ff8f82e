"""The formal Schrodinger operator ``H = L + q`` and its quadratic form.

Besides evaluating ``H`` and the form ``h``, this module exposes the
algebraic identities the Hardy-weight construction rests on (product rule,
square-root chain rule, ground state transform) as residual functions, so
they can be checked numerically on any graph.

Residual convention: every ``*_residual`` returns ``|LHS - RHS| / (1 + M)``
where ``M`` is the largest absolute value among the terms that were summed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .errors import (
    InfiniteSupport,
    NonpositiveGroundState,
    NonpositiveInput,
)
from .graph import GraphFunction, WeightedGraph, _key, as_function, ball, support_of


@dataclass(frozen=True)
class SchrodingerOperator:
    """``H f(x) = sum_y b(x,y) (f(x) - f(y)) + q(x) f(x)`` on ``graph``."""

    graph: WeightedGraph

    def __call__(self, f, x) -> float:
        return apply(self, f, x)

    def laplacian(self, f, x) -> float:
        fx = f(x)
        return math.fsum(b * (fx - f(y)) for y, b in self.graph.neighbors(x))


def apply(H: SchrodingerOperator, f, x) -> float:
    f = as_function(f)
    fx = f(x)
    terms = [b * (fx - f(y)) for y, b in H.graph.neighbors(x)]
    terms.append(H.graph.potential(x) * fx)
    return math.fsum(terms)


@dataclass(frozen=True)
class QuadraticFormValue:
    gradient_part: float
    potential_part: float

    @property
    def total(self) -> float:
        return self.gradient_part + self.potential_part


def _support(phi, what="phi"):
    s = support_of(phi)
    if s is None:
        raise InfiniteSupport(f"{what} has no declared finite support")
    return s


def edges_meeting(graph: WeightedGraph, vertices: Iterable):
    """Undirected edges with at least one endpoint in ``vertices``, each once,
    in a deterministic order."""
    S = sorted(set(vertices), key=_key)
    rank = {x: i for i, x in enumerate(S)}
    for x in S:
        for y, b in graph.neighbors(x):
            ry = rank.get(y)
            if ry is not None and ry < rank[x]:
                continue
            yield x, y, b


def bilinear_form(H: SchrodingerOperator, phi, psi) -> QuadraticFormValue:
    """``h(phi, psi)`` for finitely supported ``phi`` and ``psi``."""
    phi, psi = as_function(phi), as_function(psi)
    S = _support(phi) | _support(psi, "psi")
    grad = math.fsum(b * (phi(x) - phi(y)) * (psi(x) - psi(y))
                     for x, y, b in edges_meeting(H.graph, S))
    pot = math.fsum(H.graph.potential(x) * phi(x) * psi(x) for x in sorted(S, key=_key))
    return QuadraticFormValue(grad, pot)


def quadratic_form(H: SchrodingerOperator, phi) -> QuadraticFormValue:
    """``h(phi) = 1/2 sum b (phi(x)-phi(y))^2 + sum q phi^2``.

    The one-half is realised by visiting every undirected edge once.
    """
    phi = as_function(phi)
    S = _support(phi)
    grad = math.fsum(b * (phi(x) - phi(y)) ** 2 for x, y, b in edges_meeting(H.graph, S))
    pot = math.fsum(H.graph.potential(x) * phi(x) ** 2 for x in sorted(S, key=_key))
    return QuadraticFormValue(grad, pot)


def weighted_mass(w, phi) -> float:
    """``w(phi) = sum_x w(x) phi(x)^2`` over the support of ``phi``."""
    phi = as_function(phi)
    return math.fsum(w(x) * phi(x) ** 2 for x in sorted(_support(phi), key=_key))


def gst_form(H: SchrodingerOperator, v, phi, psi=None) -> float:
    """The ``v``-twisted form ``1/2 sum b v(x) v(y) (phi(x)-phi(y))(psi(x)-psi(y))``."""
    v, phi = as_function(v), as_function(phi)
    psi = phi if psi is None else as_function(psi)
    S = _support(phi) | _support(psi, "psi")
    terms = []
    for x, y, b in edges_meeting(H.graph, S):
        vx, vy = v(x), v(y)
        if not (vx > 0 and vy > 0):
            raise NonpositiveGroundState(f"v must be positive, got v({x!r})={vx}, v({y!r})={vy}")
        terms.append(b * vx * vy * (phi(x) - phi(y)) * (psi(x) - psi(y)))
    return math.fsum(terms)


def _divide(phi, v, S):
    vals = {}
    for x in S:
        vx = v(x)
        if not vx > 0:
            raise NonpositiveGroundState(f"v({x!r}) = {vx} is not positive")
        vals[x] = phi(x) / vx
    return GraphFunction.from_values(vals)


def gst_identity_residual(H: SchrodingerOperator, v, phi, f=None) -> float:
    """Residual of ``h(phi) = h_v(phi/v) + <f phi, phi>`` with ``Hv = f v``.

    ``f`` defaults to ``(Hv)/v`` evaluated on the support of ``phi``.
    """
    v, phi = as_function(v), as_function(phi)
    S = sorted(_support(phi), key=_key)
    if f is None:
        fvals = {}
        for x in S:
            vx = v(x)
            if not vx > 0:
                raise NonpositiveGroundState(f"v({x!r}) = {vx} is not positive")
            fvals[x] = apply(H, v, x) / vx
        f = fvals.__getitem__
    lhs = quadratic_form(H, phi).total
    twisted = gst_form(H, v, _divide(phi, v, S))
    pot = math.fsum(f(x) * phi(x) ** 2 for x in S)
    return abs(lhs - twisted - pot) / (1.0 + max(abs(lhs), abs(twisted), abs(pot)))


def product_rule_residual(H: SchrodingerOperator, f, g, x) -> float:
    """Residual of ``H(fg) = f Hg + g Lf - sum b (f(x)-f(y)) (g(x)-g(y))`` at ``x``."""
    f, g = as_function(f), as_function(g)
    lhs = apply(H, lambda z: f(z) * g(z), x)
    fx, gx = f(x), g(x)
    t1 = fx * apply(H, g, x)
    t2 = gx * H.laplacian(f, x)
    t3 = math.fsum(b * (fx - f(y)) * (gx - g(y)) for y, b in H.graph.neighbors(x))
    rhs = t1 + t2 - t3
    return abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(t1), abs(t2), abs(t3)))


def chain_rule_residual(H: SchrodingerOperator, f, g, x) -> float:
    """Residual of the square-root chain rule at ``x``::

        2 (fg)^(1/2) H[(fg)^(1/2)] = f Hg + g Hf
            + sum_y b [g(x)^(1/2)(f(x)^(1/2)-f(y)^(1/2))
                       - f(x)^(1/2)(g(x)^(1/2)-g(y)^(1/2))]^2
    """
    f, g = as_function(f), as_function(g)
    pts = (x,) + tuple(y for y, _ in H.graph.neighbors(x))
    for z in pts:
        if not (f(z) > 0 and g(z) > 0):
            raise NonpositiveInput(f"f, g must be positive near {x!r}; failed at {z!r}")
    root = lambda z: math.sqrt(f(z) * g(z))  # noqa: E731
    lhs = 2.0 * root(x) * apply(H, root, x)
    fx, gx = f(x), g(x)
    sfx, sgx = math.sqrt(fx), math.sqrt(gx)
    t1 = fx * apply(H, g, x)
    t2 = gx * apply(H, f, x)
    t3 = math.fsum(b * (sgx * (sfx - math.sqrt(f(y))) - sfx * (sgx - math.sqrt(g(y)))) ** 2
                   for y, b in H.graph.neighbors(x))
    rhs = t1 + t2 + t3
    return abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(t1), abs(t2), abs(t3)))


def local_scale(H: SchrodingerOperator, u, x) -> float:
    """Magnitude of the terms summed in ``Hu(x)``; used to scale tolerances."""
    ux = u(x)
    s = sum(b * (abs(ux) + abs(u(y))) for y, b in H.graph.neighbors(x))
    return s + abs(H.graph.potential(x) * ux)


@dataclass(frozen=True)
class SuperharmonicReport:
    """Outcome of checking ``Hu >= 0`` on a finite region.

    ``violations`` are vertices with ``Hu < -tol * scale``; ``harmonic_except``
    those with ``|Hu| > tol * scale``.  ``is_positive`` records ``u > 0`` on
    the region.
    """

    is_superharmonic: bool
    is_positive: bool
    violations: frozenset
    harmonic_except: frozenset
    values: dict

    @property
    def is_positive_superharmonic(self) -> bool:
        return self.is_superharmonic and self.is_positive


def superharmonic_report(H: SchrodingerOperator, u, region, tol: float = 1e-10) -> SuperharmonicReport:
    u = as_function(u)
    values, bad, nonharm = {}, set(), set()
    positive = True
    for x in region:
        val = apply(H, u, x)
        values[x] = val
        s = tol * local_scale(H, u, x)
        if val < -s:
            bad.add(x)
        if abs(val) > s:
            nonharm.add(x)
        if not u(x) > 0:
            positive = False
    return SuperharmonicReport(not bad, positive, frozenset(bad), frozenset(nonharm), values)


@dataclass(frozen=True)
class EnergyTrend:
    """Partial sums of the extended form ``h(f)`` over balls ``B_N``.

    ``verdict`` is ``"diverges"`` when the partial sums exceed ``cap`` while
    still increasing, ``"bounded"`` otherwise.  A finite computation can
    never certify divergence; the table is the real output.
    """

    radii: tuple
    partial_sums: tuple
    verdict: str


def truncated_energy(H: SchrodingerOperator, f, radii, cap: float = math.inf, root=None) -> EnergyTrend:
    """Evaluate ``1/2 sum_{x,y in B_N} b (f(x)-f(y))^2 + sum_{B_N} q f^2``.

    Partial sums are nondecreasing in ``N`` when ``q >= 0`` (monotone limit
    defining ``h`` on all functions).
    """
    f = as_function(f)
    radii = tuple(sorted(int(r) for r in radii))
    verts = ball(H.graph, radii[-1], root)
    dist = _distances(H.graph, verts, root)
    sums, grad_pot = [], []
    # edge (x,y) enters B_N once both endpoints do; vertex terms once x does
    for x in verts:
        dx = dist[x]
        grad_pot.append((dx, H.graph.potential(x) * f(x) ** 2))
        for y, b in H.graph.neighbors(x):
            dy = dist.get(y)
            if dy is not None and (dy, _key(y)) < (dx, _key(x)):
                grad_pot.append((dx, b * (f(x) - f(y)) ** 2))
    grad_pot.sort(key=lambda t: t[0])
    idx, acc = 0, []
    for N in radii:
        while idx < len(grad_pot) and grad_pot[idx][0] <= N:
            acc.append(grad_pot[idx][1])
            idx += 1
        sums.append(math.fsum(acc))
    increasing = len(sums) < 2 or sums[-1] > sums[-2]
    verdict = "diverges" if sums[-1] > cap and increasing else "bounded"
    return EnergyTrend(radii, tuple(sums), verdict)


def _distances(graph, verts, root=None):
    root = graph.root if root is None else root
    dist = {root: 0}
    for x in verts:
        for y, _ in graph.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
    return {x: dist[x] for x in verts}


def restricted_matrix(H: SchrodingerOperator, region, dtype=float):
    """Matrix of ``h`` on functions supported in ``region`` (zero outside).

    Returns ``(A, vertices)``: ``A`` is sparse symmetric with
    ``A[i,i] = sum_y b(x_i, y) + q(x_i)`` over *all* neighbours and
    ``A[i,j] = -b(x_i, x_j)``; ``vertices`` fixes the row order.
    """
    verts = tuple(region)
    index = {x: i for i, x in enumerate(verts)}
    rows, cols, vals = [], [], []
    diag = np.zeros(len(verts), dtype=dtype)
    for i, x in enumerate(verts):
        d = H.graph.potential(x)
        for y, b in H.graph.neighbors(x):
            d += b
            j = index.get(y)
            if j is not None:
                rows.append(i)
                cols.append(j)
                vals.append(-b)
        diag[i] = d
    n = len(verts)
    A = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    A = A + sp.diags(diag)
    return A.tocsr(), verts
