"""Finite-truncation diagnostics for optimality of a Hardy weight.

Three properties are probed:

* criticality, through the energies of a log-cutoff null sequence and
  through the bottom of the generalized spectrum of ``(h, w)`` on balls;
* null-criticality, through partial sums of ``w psi^2``;
* optimality near infinity, through the spectrum of ``(h, c w)`` on annuli
  for ``c > 1``.

None of these can prove anything; each returns the table it is based on
and a verdict derived from documented thresholds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EigSolverFailure, InfiniteSupport, InputError, NonpositiveFunction, ZeroWeightRegion
from .graph import GraphFunction, WeightedGraph, _key, as_function, ball
from .schrodinger import SchrodingerOperator, apply, gst_form, restricted_matrix


# --- the null sequence --------------------------------------------------------

def log_cutoff(n: float, t):
    """``phi_n``: 1 on ``[1/n, n]``, logarithmic ramps down to 0 at ``1/n^2``
    and ``n^2``, zero elsewhere.  Vectorised in ``t``."""
    if n < 2:
        raise InputError("cutoff parameter must be >= 2")
    t = np.asarray(t, dtype=float)
    L = math.log(n)
    out = np.zeros_like(t)
    inner = (t >= n ** -2.0) & (t < 1.0 / n)
    out[inner] = 2.0 + np.log(t[inner]) / L
    out[(t >= 1.0 / n) & (t <= n)] = 1.0
    outer = (t > n) & (t <= float(n) ** 2)
    out[outer] = 2.0 - np.log(t[outer]) / L
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class NullSequenceElement:
    """``e_n = phi_n(u0)`` with its energy ``(h - w)(psi e_n)``."""

    n: float
    e_n: GraphFunction
    energy: float
    support: tuple
    search_radius: int


def _level_support(graph, u0, lo, hi, max_radius, root):
    """Vertices with ``lo <= u0 <= hi``, by BFS layers from ``root``.

    The search ends after the first layer without such vertices once at
    least one has been found; this relies on ``u0`` being proper.
    """
    root = graph.root if root is None else root
    seen = {root}
    layer = [root]
    found = []
    for radius in range(max_radius + 1):
        hits = [x for x in layer if lo <= u0(x) <= hi]
        found.extend(hits)
        if found and not hits:
            return tuple(found), radius
        nxt = set()
        for x in layer:
            for y, _ in graph.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    nxt.add(y)
        if not nxt:
            return tuple(found), radius
        layer = sorted(nxt, key=_key)
    raise InfiniteSupport(f"level set {{{lo:g} <= u0 <= {hi:g}}} not exhausted within radius {max_radius}")


def sequence_energy(H: SchrodingerOperator, w, psi, e: GraphFunction) -> float:
    """``(h - w)(psi e)`` through the ground state transform::

        h_psi(e) + sum ((H psi)(x) - w(x) psi(x)) psi(x) e(x)^2
    """
    S = sorted(e.support, key=_key)
    twisted = gst_form(H, psi, e)
    pot = math.fsum((apply(H, psi, x) - w(x) * psi(x)) * psi(x) * e(x) ** 2 for x in S)
    return twisted + pot


def null_sequence(H: SchrodingerOperator, w, u0, psi, n: float, max_radius: int = 1 << 22,
                  root=None) -> NullSequenceElement:
    """Build ``e_n = phi_n(u0)`` and its energy relative to ``w``.

    ``psi`` is the ground state used in the transform (``(uv)^(1/2)`` for a
    constructed weight).  Raises ``InfiniteSupport`` when the support is not
    exhausted within ``max_radius``.
    """
    u0, psi = as_function(u0), as_function(psi)
    for x in ball(H.graph, 1, root):
        if not u0(x) > 0:
            raise NonpositiveFunction(f"u0({x!r}) = {u0(x)} is not positive")
    lo, hi = float(n) ** -2, float(n) ** 2
    support, radius = _level_support(H.graph, u0, lo, hi, max_radius, root)
    vals = {x: log_cutoff(n, u0(x)) for x in support}
    vals = {x: v for x, v in vals.items() if v > 0}
    if not vals:
        raise InfiniteSupport("the cutoff vanishes on the explored truncation")
    e = GraphFunction.from_values(vals, name=f"e_{n:g}")
    return NullSequenceElement(n, e, sequence_energy(H, w, psi, e), tuple(sorted(vals, key=_key)), radius)


@dataclass(frozen=True)
class DecayCertificate:
    """Energies of the null sequence and the trend tests run on them.

    ``fit_constant`` is the least-squares ``C`` in ``energy ~ C / log n``;
    ``slope`` is the least-squares slope of energy against ``1/log n``;
    ``residual_trend`` is the slope of ``energy * log n`` against ``log n``
    (nonnegative when the ``C / log n`` law is approached from below or held).
    """

    n: tuple
    energies: tuple
    strictly_decreasing: bool
    fit_constant: float
    slope: float
    residual_trend: float
    passed: bool


def energy_decay_certificate(H: SchrodingerOperator, w, u0, psi, n_list: Sequence[float],
                             max_radius: int = 1 << 22, root=None) -> DecayCertificate:
    ns = tuple(sorted(n_list))
    if len(ns) < 2:
        raise InputError("need at least two cutoff parameters")
    E = np.array([null_sequence(H, w, u0, psi, n, max_radius, root).energy for n in ns])
    logs = np.log(np.array(ns, dtype=float))
    x = 1.0 / logs
    C = float(np.dot(E, x) / np.dot(x, x))
    slope = float(np.polyfit(x, E, 1)[0])
    trend = float(np.polyfit(logs, E * logs, 1)[0])
    decreasing = bool(np.all(np.diff(E) < 0))
    return DecayCertificate(ns, tuple(E.tolist()), decreasing, C, slope, trend,
                            decreasing and slope > 0 and trend >= 0)


# --- null-criticality ---------------------------------------------------------

@dataclass(frozen=True)
class GrowthFit:
    model: str
    params: tuple
    rss: float


@dataclass(frozen=True)
class DivergenceTable:
    """Partial sums ``sum_{B_N} w psi^2`` with log and power growth fits.

    ``verdict`` is ``"diverging"`` when the last increment is at least
    ``ratio_threshold`` times the previous one, else ``"converging"``
    (a positive-critical look).
    """

    radii: tuple
    partial_sums: tuple
    log_fit: GrowthFit
    power_fit: GrowthFit
    increment_ratio: float
    verdict: str


def _fits(radii, sums):
    logs = np.log(np.asarray(radii, dtype=float))
    S = np.asarray(sums)
    a, b = np.polyfit(logs, S, 1)
    log_fit = GrowthFit("a*log(N)+b", (float(a), float(b)), float(np.sum((a * logs + b - S) ** 2)))
    if np.all(S > 0):
        p, c = np.polyfit(logs, np.log(S), 1)
        power_fit = GrowthFit("c*N^p", (float(math.exp(c)), float(p)),
                              float(np.sum((np.exp(c) * np.exp(p * logs) - S) ** 2)))
    else:
        power_fit = GrowthFit("c*N^p", (math.nan, math.nan), math.nan)
    return log_fit, power_fit


def null_criticality_divergence(H: SchrodingerOperator, psi, w, radii: Sequence[int],
                                ratio_threshold: float = 0.5, root=None) -> DivergenceTable:
    """Partial sums of ``w psi^2`` over balls, accumulated shell by shell."""
    psi = as_function(psi)
    radii = tuple(sorted(int(r) for r in radii))
    if len(radii) < 3:
        raise InputError("need at least three radii")
    verts = ball(H.graph, radii[-1], root)
    dist = _distances(H.graph, verts, root)
    terms = sorted(((dist[x], w(x) * psi(x) ** 2) for x in verts), key=lambda t: t[0])
    sums, acc, i = [], 0.0, 0
    comp = []
    for N in radii:
        while i < len(terms) and terms[i][0] <= N:
            comp.append(terms[i][1])
            i += 1
        acc = math.fsum(comp)
        comp = [acc]
        sums.append(acc)
    log_fit, power_fit = _fits(radii, sums)
    inc = np.diff(sums)
    ratio = float(inc[-1] / inc[-2]) if inc[-2] > 0 else math.inf
    verdict = "diverging" if ratio >= ratio_threshold else "converging"
    return DivergenceTable(radii, tuple(sums), log_fit, power_fit, ratio, verdict)


def _distances(graph, verts, root):
    root = graph.root if root is None else root
    dist = {root: 0}
    for x in verts:
        for y, _ in graph.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
    return dist


# --- generalized Rayleigh quotients ---------------------------------------------

@dataclass(frozen=True)
class EigenSolveSpec:
    """Backend choice for the bottom of the pencil ``(h, w)``.

    Tridiagonal pencils without zero-weight vertices use a banded solver;
    up to ``dense_max`` unknowns a dense one; larger problems use
    shift-invert Lanczos started from the normalized weight-mass vector.
    """

    dense_max: int = 2000
    tol: float = 1e-12
    max_iterations: int = 5000


@dataclass(frozen=True)
class RegionFamily:
    """Balls ``B_N`` or annuli ``B_N \\ B_inner`` around ``root``."""

    kind: str
    radii: tuple
    inner: int | None = None
    root: object = None

    def regions(self, graph: WeightedGraph):
        if self.kind not in ("balls", "annuli"):
            raise InputError(f"region kind must be 'balls' or 'annuli', got {self.kind!r}")
        if self.kind == "annuli" and self.inner is None:
            raise InputError("annuli need an inner radius")
        radii = tuple(sorted(int(r) for r in self.radii))
        big = ball(graph, radii[-1], self.root)
        dist = _distances(graph, big, self.root)
        for N in radii:
            lo = self.inner if self.kind == "annuli" else -1
            yield N, tuple(x for x in big if lo < dist[x] <= N)


@dataclass(frozen=True)
class ClassificationThresholds:
    """Calibration defaults for reading a ``lambda*`` sequence.

    Below ``1 - hardy_slack`` the Hardy inequality itself fails
    (``supercritical``); a decreasing sequence ending in
    ``[1 - hardy_slack, 1 + critical_band]`` looks critical; anything else
    looks subcritical.
    """

    hardy_slack: float = 1e-6
    critical_band: float = 0.25


@dataclass(frozen=True)
class SpectralReport:
    weight: object
    radii: tuple
    lambda_star: tuple
    methods: tuple
    sizes: tuple
    classification: str
    monotone: bool


def _classify(lams, thresholds: ClassificationThresholds):
    lams = np.asarray(lams)
    if np.min(lams) < 1.0 - thresholds.hardy_slack:
        return "supercritical"
    decreasing = bool(np.all(np.diff(lams) <= thresholds.hardy_slack * np.abs(lams[1:])))
    if lams[-1] <= 1.0 + thresholds.critical_band and decreasing:
        return "critical-looking"
    return "subcritical-looking"


def _is_tridiagonal(A):
    coo = A.tocoo()
    return bool(np.all(np.abs(coo.row - coo.col) <= 1))


def bottom_eigenvalue(A, mass: np.ndarray, spec: EigenSolveSpec = EigenSolveSpec()) -> tuple[float, str]:
    """Smallest ``lambda`` with ``A x = lambda diag(mass) x`` on the range of ``mass``.

    Unknowns with zero mass are eliminated by a Schur complement.  Returns
    ``(lambda, method)``.
    """
    A = sp.csr_matrix(A)
    mass = np.asarray(mass, dtype=float)
    if np.any(mass < 0):
        raise InputError("weight must be nonnegative")
    pos = np.nonzero(mass > 0)[0]
    zero = np.nonzero(mass == 0)[0]
    if pos.size == 0:
        raise ZeroWeightRegion("weight vanishes on the region")
    if zero.size == 0 and _is_tridiagonal(A):
        s = 1.0 / np.sqrt(mass)
        d = A.diagonal() * s * s
        e = A.diagonal(1) * s[:-1] * s[1:]
        if d.size == 1:
            return float(d[0]), "tridiagonal"
        try:
            lam = sla.eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))
        except (sla.LinAlgError, ValueError) as exc:
            raise EigSolverFailure(str(exc)) from exc
        return float(lam[0]), "tridiagonal"
    if A.shape[0] <= spec.dense_max:
        M = A.toarray()
        S = M[np.ix_(pos, pos)]
        if zero.size:
            try:
                S = S - M[np.ix_(pos, zero)] @ sla.solve(M[np.ix_(zero, zero)], M[np.ix_(zero, pos)],
                                                         assume_a="pos")
            except sla.LinAlgError as exc:
                raise EigSolverFailure(f"zero-weight block is not positive definite: {exc}") from exc
        s = 1.0 / np.sqrt(mass[pos])
        try:
            lam = sla.eigh(S * s[:, None] * s[None, :], eigvals_only=True, subset_by_index=(0, 0))
        except sla.LinAlgError as exc:
            raise EigSolverFailure(str(exc)) from exc
        return float(lam[0]), "dense" if not zero.size else "dense+schur"
    return _shift_invert(A, mass, pos, zero, spec)


def _shift_invert(A, mass, pos, zero, spec):
    # A^{-1} [b; 0] restricted to pos applies the inverse Schur complement
    try:
        lu = spla.splu(sp.csc_matrix(A))
    except RuntimeError as exc:
        raise EigSolverFailure(f"h is singular on the region: {exc}") from exc
    n, m = A.shape[0], pos.size

    def schur_inv(b):
        full = np.zeros(n)
        full[pos] = b.ravel()
        return lu.solve(full)[pos]

    def schur(b):
        if not zero.size:
            return A[pos][:, pos] @ b
        full = np.zeros(n)
        full[pos] = b.ravel()
        A22 = sp.csc_matrix(A[zero][:, zero])
        y = spla.spsolve(A22, -(A[zero][:, pos] @ b.ravel()))
        full[zero] = y
        return (A @ full)[pos]

    if m < 3:
        # too small for ARPACK; assemble the Schur complement column by column
        S = np.column_stack([schur(e) for e in np.eye(m)])
        s = 1.0 / np.sqrt(mass[pos])
        return float(sla.eigvalsh(S * s[:, None] * s[None, :])[0]), "dense+schur"
    W = sp.diags(mass[pos])
    v0 = mass[pos] / np.linalg.norm(mass[pos])
    try:
        vals = spla.eigsh(spla.LinearOperator((m, m), matvec=schur, dtype=float), k=1, M=W, sigma=0.0,
                          which="LM", v0=v0, tol=spec.tol, maxiter=spec.max_iterations,
                          OPinv=spla.LinearOperator((m, m), matvec=schur_inv, dtype=float),
                          return_eigenvectors=False)
    except spla.ArpackError as exc:
        raise EigSolverFailure(str(exc)) from exc
    return float(vals[0]), "shift-invert"


def region_lambda_star(H: SchrodingerOperator, w, region, spec: EigenSolveSpec = EigenSolveSpec()):
    """``min h(phi) / sum w phi^2`` over ``phi`` supported in ``region``."""
    A, verts = restricted_matrix(H, region)
    mass = np.array([w(x) for x in verts], dtype=float)
    if not np.any(mass > 0):
        raise ZeroWeightRegion("weight vanishes identically on the region")
    return bottom_eigenvalue(A, mass, spec) + (len(verts),)


def rayleigh_sweep(H: SchrodingerOperator, w, regions: RegionFamily,
                   spec: EigenSolveSpec = EigenSolveSpec(),
                   thresholds: ClassificationThresholds = ClassificationThresholds()) -> SpectralReport:
    """``lambda*`` on each region of the family, with a classification.

    ``monotone`` records whether ``lambda*`` is nonincreasing up to the
    solver tolerance, as it must be for nested regions.
    """
    w = as_function(w)
    radii, lams, methods, sizes = [], [], [], []
    for N, region in regions.regions(H.graph):
        lam, method, size = region_lambda_star(H, w, region, spec)
        radii.append(N)
        lams.append(lam)
        methods.append(method)
        sizes.append(size)
    diffs = np.diff(lams)
    monotone = bool(np.all(diffs <= 1e-9 * np.abs(np.asarray(lams[1:])) + 1e-12))
    return SpectralReport(w, tuple(radii), tuple(lams), tuple(methods), tuple(sizes),
                          _classify(lams, thresholds), monotone)


def scaled(w, c: float) -> GraphFunction:
    w = as_function(w)
    return GraphFunction(lambda x: c * w(x), name=f"{c:g}*w")


# --- aggregate ------------------------------------------------------------------

CAVEAT = ("Finite-truncation diagnostics: trends on finite balls are consistent with, "
          "but cannot prove, criticality, null-criticality or optimality near infinity.")


@dataclass(frozen=True)
class OptimalityConfig:
    """Inputs and calibration for :func:`optimality_report`.

    ``u0`` drives the null sequence and ``psi`` is the ground state.  The
    near-infinity test sweeps annuli ``B_N \\ B_inner`` with weight
    ``near_infinity_scale * w`` and reports the first ``N`` where
    ``lambda* < 1``.
    """

    u0: Callable
    psi: Callable
    n_list: tuple = (4, 16, 256)
    ball_radii: tuple = (100, 1000, 10000)
    divergence_radii: tuple = (1000, 10000, 100000)
    annulus_inner: int = 10
    annulus_radii: tuple = (100, 1000, 10000, 100000)
    near_infinity_scale: float = 1.5
    thresholds: ClassificationThresholds = ClassificationThresholds()
    eig: EigenSolveSpec = EigenSolveSpec()
    root: object = None


@dataclass(frozen=True)
class OptimalityReport:
    criticality: Mapping
    null_criticality: DivergenceTable
    near_infinity: Mapping
    verdict: Mapping
    caveat: str = CAVEAT
    balls: SpectralReport | None = field(default=None, repr=False)
    annuli: SpectralReport | None = field(default=None, repr=False)


def optimality_report(H: SchrodingerOperator, w, config: OptimalityConfig) -> OptimalityReport:
    """Run the three diagnostics and combine their verdicts.

    Criticality passes when the null-sequence energies decay and the ball
    sweep looks critical; null-criticality when the ``w psi^2`` partial sums
    keep growing; optimality near infinity when a scaled weight fails on
    some annulus.
    """
    w = as_function(w)
    decay = energy_decay_certificate(H, w, config.u0, config.psi, config.n_list, root=config.root)
    balls = rayleigh_sweep(H, w, RegionFamily("balls", config.ball_radii, root=config.root),
                           config.eig, config.thresholds)
    div = null_criticality_divergence(H, config.psi, w, config.divergence_radii, root=config.root)
    annuli = rayleigh_sweep(H, scaled(w, config.near_infinity_scale),
                            RegionFamily("annuli", config.annulus_radii, config.annulus_inner, config.root),
                            config.eig, config.thresholds)
    witness = next((N for N, lam in zip(annuli.radii, annuli.lambda_star) if lam < 1.0), None)
    crit = {"energies": decay, "lambda_star": balls.lambda_star, "radii": balls.radii,
            "classification": balls.classification}
    near = {"scale": config.near_infinity_scale, "inner": config.annulus_inner,
            "radii": annuli.radii, "lambda_star": annuli.lambda_star, "witness": witness}
    verdict = {
        "hardy_inequality": balls.classification != "supercritical",
        "criticality": decay.passed and balls.classification == "critical-looking",
        "null_criticality": div.verdict == "diverging",
        "optimal_near_infinity": witness is not None,
    }
    return OptimalityReport(crit, div, near, verdict, CAVEAT, balls, annuli)
