"""Sparse symmetric positive definite solves."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import NotPositiveDefinite, SolverDivergence


@dataclass(frozen=True)
class LinearSolveSpec:
    """Settings for :func:`pcg`.

    ``tol`` bounds the relative residual ``||b - Ax|| / ||b||``.  With
    ``deterministic`` set, every reduction runs in a fixed order, so repeated
    solves give bit-identical results.
    """

    tol: float = 1e-10
    max_iterations: int = 20000
    deterministic: bool = True


@dataclass(frozen=True)
class SolveResult:
    x: np.ndarray
    iterations: int
    residual: float


def pcg(A, b, spec: LinearSolveSpec = LinearSolveSpec(), x0=None) -> SolveResult:
    """Jacobi-preconditioned conjugate gradients for SPD ``A``.

    Raises ``NotPositiveDefinite`` if a search direction with
    ``p^T A p <= 0`` turns up, and ``SolverDivergence`` when the iteration
    cap is reached first.
    """
    A = sp.csr_matrix(A)
    b = np.asarray(b, dtype=float)
    d = A.diagonal()
    if np.any(d <= 0):
        raise NotPositiveDefinite("nonpositive diagonal entry")
    dinv = 1.0 / d
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return SolveResult(np.zeros_like(b), 0, 0.0)
    z = dinv * r
    p = z.copy()
    rz = r @ z
    for it in range(1, spec.max_iterations + 1):
        Ap = A @ p
        pAp = p @ Ap
        if not pAp > 0:
            raise NotPositiveDefinite(f"p^T A p = {pAp!r} at iteration {it}")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        res = np.linalg.norm(r) / bnorm
        if res <= spec.tol:
            # recompute the true residual once; recurrences drift
            true = np.linalg.norm(b - A @ x) / bnorm
            if true <= spec.tol:
                return SolveResult(x, it, float(true))
            r = b - A @ x
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverDivergence(f"no convergence to {spec.tol} in {spec.max_iterations} iterations "
                           f"(relative residual {res:.3e})")
