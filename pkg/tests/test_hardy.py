import math
import warnings

import mpmath
import numpy as np
import pytest
import scipy.sparse.linalg as spla
from hypothesis import given
from hypothesis import strategies as st

from graphhardy.errors import (
    DomainError,
    NonpositiveSupersolution,
    NotSuperharmonic,
    OrderViolation,
)
from graphhardy.families import halfline_dirichlet, random_graph
from graphhardy.graph import GraphFunction, build_finite_graph
from graphhardy.hardy import (
    bounded_quotient_transform,
    construct_weight,
    construct_weight_bounded,
    halfline_supersolutions,
    halfline_weight,
    quotient_sup_transform,
    weight_series_halfline,
)
from graphhardy.schrodinger import SchrodingerOperator, apply, restricted_matrix

mpmath.mp.dps = 50


def closed_form(n):
    x = mpmath.mpf(1) / n
    return float(2 - mpmath.sqrt(1 + x) - mpmath.sqrt(1 - x))


@pytest.mark.parametrize("n", [1, 2, 3, 7, 99, 10 ** 4, 10 ** 5, 123457, 10 ** 8, 10 ** 12])
def test_vectorised_weight_vs_mpmath(n):
    assert halfline_weight(n) == pytest.approx(closed_form(n), rel=2e-15)


def test_series_coefficients_and_values():
    # leading terms 1/(4 n^2) and 5/(64 n^4)
    n = 1000
    assert weight_series_halfline(n) == pytest.approx(1 / (4 * n * n) + 5 / (64 * n ** 4), rel=1e-12)
    for n in (2, 3, 10, 1234):
        assert weight_series_halfline(n) == pytest.approx(closed_form(n), rel=1e-14)
    with pytest.raises(DomainError):
        weight_series_halfline(1)
    with pytest.raises(DomainError):
        halfline_weight(0)


def test_vectorised_shapes():
    out = halfline_weight(np.array([1, 2, 20000]))
    assert out.shape == (3,)
    assert isinstance(halfline_weight(5), float)


def test_halfline_construction(halfline_w):
    assert halfline_w.exceptional_set == frozenset({1})
    assert halfline_w.provenance["u0_orientation"] == "sup-infinite"
    ev = halfline_w.evaluate(1)
    assert not ev.harmonic and ev.w == pytest.approx(2 - math.sqrt(2), rel=1e-15)
    ev = halfline_w.evaluate(40)
    assert ev.harmonic and ev.w_edge == pytest.approx(ev.w_operator, rel=1e-9)


def test_operator_quotient_cancellation_vs_edge_formula(halfline_w):
    # the quotient loses digits for large n; the edge formula keeps them
    n = 10 ** 6
    ev = halfline_w.evaluate(n)
    assert ev.w_edge == pytest.approx(closed_form(n), rel=1e-14)
    assert abs(ev.w_operator - ev.w_edge) <= 1e-13 * 2


def test_weight_symmetric_in_u_v(halfline_H):
    u, v = halfline_supersolutions()
    a = construct_weight(halfline_H, u, v)
    b = construct_weight(halfline_H, v, u)
    assert all(a(n) == b(n) for n in range(1, 200))
    assert b.provenance["u0_orientation"] == "inverted"


def test_ground_state_is_h_minus_w_harmonic(halfline_H, halfline_w):
    psi = halfline_w.ground_state()
    for n in range(1, 300):
        res = apply(halfline_H, psi, n) - halfline_w(n) * psi(n)
        assert abs(res) <= 1e-10 * (1 + psi(n))


def test_rejects_nonpositive_and_nonsuperharmonic(halfline_H):
    with pytest.raises(NonpositiveSupersolution):
        construct_weight(halfline_H, lambda n: float(n) - 3, lambda n: 1.0)
    with pytest.raises(NotSuperharmonic) as exc:
        construct_weight(halfline_H, lambda n: float(n * n), lambda n: 1.0)
    assert exc.value.violations
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        construct_weight(halfline_H, lambda n: float(n * n), lambda n: 1.0, allow_not_superharmonic=True)
    assert rec


def test_boundary_layer_warning(halfline_H):
    # v = min(n, 30) is not harmonic at 30, the edge of a radius-29 ball
    v = lambda n: float(min(n, 30))  # noqa: E731
    with pytest.warns(UserWarning, match="boundary shell"):
        W = construct_weight(halfline_H, lambda n: 1.0, v, verify_radius=29)
    assert W.provenance["exceptional_on_boundary"]


def _green_pair(seed):
    """Random finite graph with q >= 0 somewhere and two Green functions as supersolutions."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 25))
    g = random_graph(n, rng)
    q = {int(x): float(rng.uniform(0.1, 1.0)) for x in rng.choice(n, size=2, replace=False)}
    g = build_finite_graph([(x, y, b) for x, y, b in g.edges()], q, vertices=range(n))
    H = SchrodingerOperator(g)
    A, verts = restricted_matrix(H, g.vertices)
    a, b = (int(p) for p in rng.choice(n, size=2, replace=False))
    vals = []
    for pole in (a, b):
        rhs = np.zeros(n)
        rhs[verts.index(pole)] = 1.0
        vals.append(spla.spsolve(A.tocsc(), rhs))
    u, v = (GraphFunction.from_values(dict(zip(verts, x.tolist()))) for x in vals)
    return H, u, v, A, verts


@given(st.integers(0, 10 ** 6))
def test_finite_graph_weight_is_critical(seed):
    # h - w >= 0 with (uv)^(1/2) in its kernel, so the bottom of A - W is exactly 0
    H, u, v, A, verts = _green_pair(seed)
    W = construct_weight(H, u, v, verify_radius=len(verts))
    w = np.array([W(x) for x in verts])
    assert np.all(w >= -1e-12)
    M = A.toarray() - np.diag(w)
    lam = np.linalg.eigvalsh(M)
    assert lam[0] == pytest.approx(0.0, abs=1e-9 * np.abs(lam).max())
    assert lam[1] > 1e-9 * np.abs(lam).max()
    psi = np.sqrt(u.values(verts) * v.values(verts))
    assert np.linalg.norm(M @ psi) <= 1e-9 * np.linalg.norm(psi) * np.abs(lam).max()


def test_bounded_variant():
    H = SchrodingerOperator(halfline_dirichlet())
    # u(n) = n, v(n) = n + 1: u0 = n/(n+1) < 1 with sup 1; pair (u, v-u) = (n, 1)
    W = construct_weight_bounded(H, lambda n: float(n), lambda n: float(n + 1))
    assert W.variant == "bounded-quotient"
    assert all(W(n) == pytest.approx(halfline_weight(n), rel=1e-14) for n in range(1, 100))
    assert W.provenance["anti_oscillation_sup"] == pytest.approx(2.0)
    with pytest.raises(OrderViolation):
        construct_weight_bounded(H, lambda n: float(n + 1), lambda n: float(n))


def test_quotient_transform():
    v0 = bounded_quotient_transform(lambda x: x / (x + 1.0))
    assert v0(3) == pytest.approx(3.0)
    assert quotient_sup_transform(1.0) == math.inf
    assert quotient_sup_transform(0.5) == pytest.approx(1.0)


# beyond n ~ 1e7 the gap 5/(64 n^4) drops below one ulp of 1/(4 n^2)
@given(st.integers(1, 10 ** 7))
def test_strictly_above_classical_weight(n):
    assert halfline_weight(n) > 1.0 / (4.0 * n * n)
