"""Optimal Hardy weights from two positive supersolutions.

Given positive ``H``-superharmonic ``u`` and ``v`` (harmonic outside a
finite set) the weight is

    w = H[(uv)^(1/2)] / (uv)^(1/2),

and at vertices where ``Hu = Hv = 0`` it equals the nonnegative edge sum

    w(x) = 1/2 sum_y b(x,y) [ (u(y)/u(x))^(1/2) - (v(y)/v(x))^(1/2) ]^2.

For the bounded-quotient variant the pair ``(u, v - u)`` replaces ``(u, v)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import (
    DomainError,
    NonpositiveSupersolution,
    NotSuperharmonic,
    OrderViolation,
)
from .graph import GraphFunction, as_function, ball, shells
from .schrodinger import SchrodingerOperator, local_scale, superharmonic_report

VARIANTS = ("unbounded-quotient", "bounded-quotient")


@dataclass(frozen=True)
class WeightEvaluation:
    """Both evaluations of the weight at one vertex.

    ``w`` is the value the weight takes: the edge formula at certified
    harmonic vertices, the operator quotient elsewhere.
    """

    vertex: object
    w: float
    w_operator: float
    w_edge: float
    Hu: float
    Hv: float
    harmonic: bool


@dataclass(frozen=True)
class HardyWeight:
    """Weight ``w`` built by the supersolution construction, with provenance.

    ``first`` and ``second`` are the two functions entering the formulas:
    ``(u, v)`` for the unbounded-quotient variant, ``(u, v - u)`` for the
    bounded one.  ``exceptional_set`` lists the vertices of the verification
    ball where ``first`` or ``second`` is not harmonic.
    """

    H: SchrodingerOperator
    u: object
    v: object
    first: object
    second: object
    variant: str
    exceptional_set: frozenset
    verification_radius: int
    tol: float = 1e-10
    provenance: Mapping = field(default_factory=dict)

    def __call__(self, x) -> float:
        f, g = self.first, self.second
        nbrs = self.H.graph.neighbors(x)
        q = self.H.graph.potential(x)
        fx, gx = f(x), g(x)
        fy = [f(y) for y, _ in nbrs]
        gy = [g(y) for y, _ in nbrs]
        bs = [b for _, b in nbrs]
        if _is_harmonic(fx, fy, bs, q, self.tol) and _is_harmonic(gx, gy, bs, q, self.tol):
            terms = [b * ((a * gx - fx * c) / (fx * gx) / (math.sqrt(a / fx) + math.sqrt(c / gx))) ** 2
                     for a, c, b in zip(fy, gy, bs)]
            return 0.5 * math.fsum(terms)
        terms = [b * (1.0 - math.sqrt((a / fx) * (c / gx))) for a, c, b in zip(fy, gy, bs)]
        terms.append(q)
        return math.fsum(terms)

    def ground_state(self) -> GraphFunction:
        f, g = self.first, self.second
        return GraphFunction(lambda x: math.sqrt(f(x) * g(x)), name="(uv)^1/2")

    def as_function(self, scale: float = 1.0) -> GraphFunction:
        return GraphFunction(lambda x: scale * self(x), name=f"{scale}*w" if scale != 1 else "w")

    def edge_formula(self, x) -> float:
        return _edge_formula(self.H, self.first, self.second, x)

    def operator_quotient(self, x) -> float:
        return _operator_quotient(self.H, self.first, self.second, x)

    def evaluate(self, x) -> WeightEvaluation:
        f, g = self.first, self.second
        Hf, Hg = self.H(f, x), self.H(g, x)
        harmonic = (abs(Hf) <= self.tol * local_scale(self.H, f, x)
                    and abs(Hg) <= self.tol * local_scale(self.H, g, x))
        w_edge = self.edge_formula(x)
        w_op = self.operator_quotient(x)
        return WeightEvaluation(x, w_edge if harmonic else w_op, w_op, w_edge, Hf, Hg, harmonic)


def _is_harmonic(fx, fy, bs, q, tol) -> bool:
    val = math.fsum([b * (fx - a) for a, b in zip(fy, bs)] + [q * fx])
    scale = sum(b * (abs(fx) + abs(a)) for a, b in zip(fy, bs)) + abs(q * fx)
    return abs(val) <= tol * scale


def _edge_formula(H, f, g, x) -> float:
    fx, gx = f(x), g(x)
    terms = []
    for y, b in H.graph.neighbors(x):
        fy, gy = f(y), g(y)
        p, r = fy / fx, gy / gx
        # (sqrt p - sqrt r)^2 = (p - r)^2 / (sqrt p + sqrt r)^2, p - r without cancellation
        diff = (fy * gx - fx * gy) / (fx * gx)
        terms.append(b * (diff / (math.sqrt(p) + math.sqrt(r))) ** 2)
    return 0.5 * math.fsum(terms)


def _operator_quotient(H, f, g, x) -> float:
    fx, gx = f(x), g(x)
    terms = [b * (1.0 - math.sqrt((f(y) / fx) * (g(y) / gx))) for y, b in H.graph.neighbors(x)]
    terms.append(H.graph.potential(x))
    return math.fsum(terms)


def _verify_pair(H, f, g, radius, tol, allow, root, names):
    verts = ball(H.graph, radius + 1, root)
    for fn, name in zip((f, g), names):
        bad = [x for x in verts if not fn(x) > 0]
        if bad:
            raise NonpositiveSupersolution(f"{name} is not positive at {bad[:5]!r}")
    region = ball(H.graph, radius, root)
    exceptional = set()
    for fn, name in zip((f, g), names):
        rep = superharmonic_report(H, fn, region, tol)
        if rep.violations:
            msg = f"{name} is not H-superharmonic at {sorted(rep.violations, key=repr)[:5]!r}"
            if not allow:
                raise NotSuperharmonic(msg, rep.violations)
            warnings.warn(msg, stacklevel=3)
        exceptional |= rep.harmonic_except
    outer = set(shells(H.graph, radius, root)[radius]) if radius > 0 else set()
    on_boundary = bool(exceptional & outer)
    if on_boundary:
        warnings.warn("non-harmonic vertices on the boundary shell of the verification ball; "
                      "the exceptional set may not be finite", stacklevel=3)
    return frozenset(exceptional), on_boundary, outer


def _orientation(f, g, region, outer):
    """Whether ``u0 = f/g`` looks unbounded (kept) or tends to zero (inverted)."""
    if not outer:
        return "undetermined"
    root_val = math.log(f(region[0]) / g(region[0]))
    shell = [math.log(f(x) / g(x)) for x in outer]
    return "sup-infinite" if sum(shell) / len(shell) >= root_val else "inverted"


def construct_weight(H: SchrodingerOperator, u, v, verify_radius: int = 20, tol: float = 1e-10,
                     allow_not_superharmonic: bool = False, root=None) -> HardyWeight:
    """Build ``w = H[(uv)^(1/2)] / (uv)^(1/2)`` and certify the inputs on a ball.

    ``u`` and ``v`` must be positive on ``B_{verify_radius + 1}`` and
    ``H``-superharmonic on ``B_{verify_radius}``; a failure of the latter
    raises ``NotSuperharmonic`` unless ``allow_not_superharmonic`` is set.

    When ``u0 = u/v`` appears to tend to zero rather than infinity, the roles
    of ``u`` and ``v`` are swapped in the recorded orientation; the weight is
    symmetric in ``(u, v)`` so its values are unaffected.
    """
    u, v = as_function(u), as_function(v)
    exc, on_bd, outer = _verify_pair(H, u, v, verify_radius, tol, allow_not_superharmonic,
                                     root, ("u", "v"))
    region = ball(H.graph, verify_radius, root)
    prov = {"u0_orientation": _orientation(u, v, region, outer),
            "exceptional_on_boundary": on_bd}
    return HardyWeight(H, u, v, u, v, "unbounded-quotient", exc, verify_radius, tol, prov)


def construct_weight_bounded(H: SchrodingerOperator, u, v, verify_radius: int = 20,
                             tol: float = 1e-10, allow_not_superharmonic: bool = False,
                             root=None) -> HardyWeight:
    """Weight from the pair ``(u, v - u)`` for a bounded quotient ``u0 = u/v``.

    Requires ``0 < u < v`` on the sampled ball (``OrderViolation``
    otherwise).  The anti-oscillation quantity
    ``sup u0(x)(1-u0(y)) / (u0(y)(1-u0(x)))`` over sampled edges and the
    sampled ``sup u0`` are recorded in ``provenance``.
    """
    u, v = as_function(u), as_function(v)
    verts = ball(H.graph, verify_radius + 1, root)
    for x in verts:
        if not v(x) - u(x) > 0:
            raise OrderViolation(f"v - u = {v(x) - u(x)!r} at {x!r}")
    rest = GraphFunction(lambda x: v(x) - u(x), name="v-u")
    exc, on_bd, outer = _verify_pair(H, u, rest, verify_radius, tol, allow_not_superharmonic,
                                     root, ("u", "v-u"))
    inside = set(verts)
    ratio = 1.0
    for x in verts:
        for y, _ in H.graph.neighbors(x):
            if y in inside:
                ratio = max(ratio, (u(x) * rest(y)) / (u(y) * rest(x)))
    prov = {"anti_oscillation_sup": ratio,
            "sampled_sup_u0": max(u(x) / v(x) for x in verts),
            "exceptional_on_boundary": on_bd}
    return HardyWeight(H, u, v, u, rest, "bounded-quotient", exc, verify_radius, tol, prov)


def bounded_quotient_transform(u0) -> GraphFunction:
    """``v0 = u0 / (1 - u0)``, the unbounded quotient of the pair ``(u, v - u)``."""
    u0 = as_function(u0)
    return GraphFunction(lambda x: _v0(u0(x)), name="u0/(1-u0)")


def _v0(a):
    return math.inf if a == 1.0 else a / (1.0 - a)


def quotient_sup_transform(sup_u0: float) -> float:
    """``sup v0 = 1 / (1/sup u0 - 1)``; infinite exactly when ``sup u0 = 1``."""
    return _v0(sup_u0)


# --- the half-line ------------------------------------------------------------

def _series_coefficient(k: int) -> float:
    return float(Fraction(math.comb(4 * k, 2 * k), (4 * k - 1) * 2 ** (4 * k - 1)))


_COEFFS = tuple(_series_coefficient(k) for k in range(1, 9))


def weight_series_halfline(n) -> float:
    """Half-line weight from its power series in ``1/n^2`` (``n >= 2``).

    Terms are added until one drops below ``1e-16`` times the running sum.
    """
    if n < 2:
        raise DomainError("the series representation needs n >= 2")
    x2 = 1.0 / (float(n) * float(n))
    terms = []
    total = 0.0
    k = 1
    while True:
        term = _series_coefficient(k) * x2 ** k
        terms.append(term)
        total += term
        if term < 1e-16 * total:
            break
        k += 1
    return math.fsum(terms)


def halfline_weight(n):
    """Closed form ``2 - (1 + 1/n)^(1/2) - (1 - 1/n)^(1/2)``, vectorised, ``n >= 1``.

    Evaluated without cancellation: the leading terms of the series when
    ``1/n < 1e-4``, otherwise the rationalised form
    ``2 x^2 / ((1 + sqrt(1-x)) (1 + sqrt(1+x)) (sqrt(1+x) + sqrt(1-x)))``.
    """
    n = np.asarray(n, dtype=float)
    if np.any(n < 1):
        raise DomainError("half-line weight is defined for n >= 1")
    x = 1.0 / n
    out = np.empty_like(x)
    small = x < 1e-4
    xs = x[small] ** 2
    acc = np.zeros_like(xs)
    for c in reversed(_COEFFS[:4]):
        acc = (acc + c) * xs
    out[small] = acc
    xl = x[~small]
    a, b = np.sqrt(1.0 + xl), np.sqrt(1.0 - xl)
    out[~small] = 2.0 * xl * xl / ((1.0 + b) * (1.0 + a) * (a + b))
    return out if out.ndim else float(out)


def halfline_supersolutions():
    """``u(n) = n`` and ``v = 1`` on the Dirichlet half-line."""
    return (GraphFunction(lambda n: float(n), name="n"), GraphFunction.constant(1.0))
