"""Level-crossing flux, the Stokes-type formula and the coarea identity.

For a function ``u`` the flux through level ``t`` is

    g(t) = sum over edges with u(y) < t <= u(x) of b(x,y) (u(x) - u(y)),

each undirected edge counted once (its orientation is fixed by ``u``).
Everything here works on a finite region, so the results are exact
statements about the truncation.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .errors import ConstantFunction, DomainError, InputError, LevelSetTouchesBoundary, NegativeF
from .graph import FiniteGraph, WeightedGraph, as_function, ball, boundary_layer, outer_boundary
from .schrodinger import edges_meeting


@dataclass(frozen=True)
class LevelFlux:
    """Piecewise-constant ``g`` on the breakpoints of ``u``.

    ``values[i]`` is ``g`` on ``(breakpoints[i], breakpoints[i+1]]``.
    """

    u: Callable
    breakpoints: np.ndarray
    values: np.ndarray

    def __call__(self, t: float) -> float:
        bp = self.breakpoints
        if not bp[0] < t <= bp[-1]:
            return 0.0
        return float(self.values[bisect.bisect_left(bp, t) - 1])

    def intervals(self):
        bp = self.breakpoints
        for i, g in enumerate(self.values):
            yield float(bp[i]), float(bp[i + 1]), float(g)

    def bounds(self) -> tuple[float, float]:
        """``(min g, max g)`` over the represented intervals."""
        return float(self.values.min()), float(self.values.max())

    def jumps(self) -> np.ndarray:
        """Breakpoints strictly inside the range where ``g`` changes value."""
        change = np.nonzero(np.diff(self.values))[0]
        return self.breakpoints[change + 1]


def _oriented_edges(graph, u, region):
    out = []
    for x, y, b in edges_meeting(graph, region):
        ux, uy = u(x), u(y)
        if ux == uy:
            continue
        lo, hi = (uy, ux) if uy < ux else (ux, uy)
        out.append((lo, hi, b))
    return out


def level_flux(graph: WeightedGraph, u, region: Sequence) -> LevelFlux:
    """Exact ``g`` from the edges meeting ``region``.

    Breakpoints are the distinct values of ``u`` on ``region`` and its outer
    boundary, since edges leaving the region are part of the flux.
    """
    u = as_function(u)
    region = tuple(region)
    if len({u(x) for x in region}) < 2:
        raise ConstantFunction("u takes a single value on the region")
    vals = {u(x) for x in region} | {u(y) for y in outer_boundary(graph, region)}
    bp = np.array(sorted(vals), dtype=float)
    index = {v: i for i, v in enumerate(bp.tolist())}
    starts = [[] for _ in range(len(bp))]
    ends = [[] for _ in range(len(bp))]
    for lo, hi, b in _oriented_edges(graph, u, region):
        d = b * (hi - lo)
        starts[index[lo]].append(d)
        ends[index[hi]].append(d)
    # g on interval i = (sum of increments of edges with lo <= bp[i]) minus (those with hi <= bp[i])
    opened = closed = 0.0
    g = np.empty(len(bp) - 1)
    for i in range(len(bp) - 1):
        opened = math.fsum([opened, *starts[i]])
        closed = math.fsum([closed, *ends[i]])
        g[i] = opened - closed
    scale = opened
    g[np.abs(g) <= 1e-15 * scale] = 0.0
    return LevelFlux(u, bp, g)


def _region_for(graph, region, radius, root):
    if region is not None:
        return tuple(region)
    if radius is not None:
        return ball(graph, radius, root)
    if isinstance(graph, FiniteGraph):
        return graph.vertices
    raise InputError("an infinite graph needs a finite region or radius")


def level_set(graph: WeightedGraph, u, t1: float, t2: float, region) -> tuple:
    """``{x in region : t1 <= u(x) < t2}``.

    This is the set whose ``Lu`` mass equals ``g(t1) - g(t2)`` under the
    half-open convention of ``g``; it coincides with ``{t1 < u <= t2}``
    whenever neither level is a value of ``u``.
    """
    u = as_function(u)
    return tuple(x for x in region if t1 <= u(x) < t2)


def stokes_residual(graph: WeightedGraph, u, t1: float, t2: float, region=None,
                    radius: int | None = None, root=None, flux: LevelFlux | None = None) -> float:
    """Scaled residual of ``g(t2) = g(t1) - sum_{x in A} Lu(x)``.

    A precomputed ``flux`` for the same ``u`` and region may be passed in.
    Raises ``LevelSetTouchesBoundary`` when ``A`` contains a vertex of the
    region with a neighbour outside it, since ``Lu`` there sees values the
    truncation does not control.
    """
    if t1 > t2:
        raise InputError("need t1 <= t2")
    u = as_function(u)
    region = _region_for(graph, region, radius, root)
    A = level_set(graph, u, t1, t2, region)
    touching = set(A) & boundary_layer(graph, region)
    if touching:
        raise LevelSetTouchesBoundary(f"level set meets the region boundary at {sorted(touching, key=repr)[:5]!r}")
    if flux is None:
        flux = level_flux(graph, u, region)
    terms = []
    for x in A:
        ux = u(x)
        terms.extend(b * (ux - u(y)) for y, b in graph.neighbors(x))
    g1, g2 = flux(t1), flux(t2)
    lu = math.fsum(terms)
    scale = max([abs(g1), abs(g2)] + [abs(t) for t in terms])
    return abs(g2 - g1 + lu) / (1.0 + scale)


# --- the coarea identity ----------------------------------------------------

@dataclass(frozen=True)
class Integrand:
    """Nonnegative ``f`` with an optional closed-form ``int_a^b f``."""

    name: str
    f: Callable[[float], float]
    integral: Callable[[float, float], float] | None = None
    positive_domain: bool = False


def _power(alpha: float) -> Integrand:
    if alpha == -1.0:
        return named_integrand("inverse-t")

    def integral(a, b):
        return (b ** (alpha + 1) - a ** (alpha + 1)) / (alpha + 1)

    return Integrand(f"power:{alpha:g}", lambda t: t ** alpha, integral, alpha != int(alpha) or alpha < 0)


def named_integrand(name: str) -> Integrand:
    """``one``, ``inverse-t``, ``log`` or ``power:alpha``."""
    if name == "one":
        return Integrand("one", lambda t: 1.0, lambda a, b: b - a)
    if name == "inverse-t":
        return Integrand("inverse-t", lambda t: 1.0 / t, lambda a, b: math.log(b / a), True)
    if name == "log":
        def integral(a, b):
            return (b * math.log(b) - b) - (a * math.log(a) - a) if a > 0 else b * math.log(b) - b
        return Integrand("log", math.log, integral, True)
    if name.startswith("power:"):
        return _power(float(name.split(":", 1)[1]))
    raise InputError(f"unknown integrand {name!r}")


def _as_integrand(f) -> Integrand:
    if isinstance(f, Integrand):
        return f
    if isinstance(f, str):
        return named_integrand(f)
    if callable(f):
        return Integrand(getattr(f, "__name__", "f"), f)
    raise InputError("f must be a name, an Integrand or a callable")


class CoareaResult(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def coarea_integral(graph: WeightedGraph, u, f, region: Sequence, points: Sequence = ()) -> CoareaResult:
    """Both sides of the coarea identity on ``region``.

    ``lhs = 1/2 sum_{x,y} b (u(x)-u(y)) int_{u(y)}^{u(x)} f`` over edges
    meeting the region, ``rhs = int f g`` over the breakpoint intervals.
    Closed forms are used for named integrands, adaptive quadrature
    otherwise (``points`` are passed on as known kinks of ``f``).
    The residual is ``|lhs - rhs| / max(|lhs|, |rhs|)``.
    """
    u = as_function(u)
    fi = _as_integrand(f)
    flux = level_flux(graph, u, region)
    bp = flux.breakpoints
    if fi.positive_domain and bp[0] < 0:
        raise DomainError(f"{fi.name} needs the range of u inside (0, inf)")
    probes = np.concatenate([bp, 0.5 * (bp[1:] + bp[:-1])])
    if fi.positive_domain and bp[0] == 0:
        probes = probes[probes > 0]
    if any(fi.f(float(t)) < 0 for t in probes):
        raise NegativeF(f"{fi.name} takes negative values on the range of u")

    def integral(a, b):
        if fi.integral is not None:
            return fi.integral(a, b)
        inner = [p for p in points if a < p < b]
        val, _ = integrate.quad(fi.f, a, b, points=inner or None, epsabs=0.0, epsrel=1e-13, limit=200)
        return val

    try:
        lhs = math.fsum(b * (hi - lo) * integral(lo, hi) for lo, hi, b in _oriented_edges(graph, u, region))
        rhs = math.fsum(g * integral(a, b) for a, b, g in flux.intervals() if g != 0.0)
    except (ZeroDivisionError, ValueError) as exc:
        # e.g. 1/t over a level range that starts at 0
        raise DomainError(f"{fi.name} is not integrable over the range of u") from exc
    denom = max(abs(lhs), abs(rhs))
    return CoareaResult(lhs, rhs, abs(lhs - rhs) / denom if denom > 0 else 0.0)
