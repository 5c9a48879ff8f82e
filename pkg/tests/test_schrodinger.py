import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphhardy.errors import InfiniteSupport, NonpositiveGroundState, NonpositiveInput
from graphhardy.families import halfline, halfline_dirichlet, random_graph
from graphhardy.graph import GraphFunction
from graphhardy.schrodinger import (
    SchrodingerOperator,
    bilinear_form,
    chain_rule_residual,
    gst_form,
    gst_identity_residual,
    product_rule_residual,
    quadratic_form,
    restricted_matrix,
    superharmonic_report,
    truncated_energy,
    weighted_mass,
)

seeds = st.integers(0, 2 ** 32 - 1)


def _setup(seed, q=False, positive=False):
    rng = np.random.default_rng(seed)
    g = random_graph(int(rng.integers(2, 30)), rng, q_range=(-1, 1) if q else None)
    if positive:
        vals = [rng.uniform(0.1, 2, len(g)) for _ in range(2)]
    else:
        vals = [rng.normal(size=len(g)) for _ in range(2)]
    f, h = (GraphFunction.from_values(dict(zip(g.vertices, v.tolist()))) for v in vals)
    return SchrodingerOperator(g), f, h


def _dense(H):
    A, verts = restricted_matrix(H, H.graph.vertices)
    return A.toarray(), verts


@given(seeds)
def test_form_equals_matrix_oracle(seed):
    H, f, _ = _setup(seed, q=True)
    A, verts = _dense(H)
    x = f.values(verts)
    assert quadratic_form(H, f).total == pytest.approx(x @ A @ x, rel=1e-12, abs=1e-12)


@given(seeds)
def test_operator_equals_matrix_oracle(seed):
    H, f, _ = _setup(seed, q=True)
    A, verts = _dense(H)
    x = f.values(verts)
    assert np.allclose([H(f, v) for v in verts], A @ x, rtol=1e-12, atol=1e-12)


@given(seeds)
def test_green_formula(seed):
    # h(phi, psi) = sum phi H psi for finitely supported functions
    H, f, g = _setup(seed, q=True)
    lhs = bilinear_form(H, f, g).total
    rhs = math.fsum(f(x) * H(g, x) for x in H.graph.vertices)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


@given(seeds)
def test_product_rule(seed):
    H, f, g = _setup(seed)
    assert max(product_rule_residual(H, f, g, x) for x in H.graph.vertices) <= 1e-12


@given(seeds)
def test_chain_rule(seed):
    H, f, g = _setup(seed, positive=True)
    assert max(chain_rule_residual(H, f, g, x) for x in H.graph.vertices) <= 1e-12


@given(seeds)
def test_ground_state_transform(seed):
    H, phi, _ = _setup(seed, q=True)
    _, _, v = _setup(seed, q=True, positive=True)
    assert gst_identity_residual(H, v, phi) <= 1e-12


def test_chain_rule_rejects_nonpositive():
    H = SchrodingerOperator(halfline())
    with pytest.raises(NonpositiveInput):
        chain_rule_residual(H, lambda n: float(n), lambda n: 1.0, 1)


def test_gst_rejects_nonpositive_v():
    H = SchrodingerOperator(halfline())
    phi = GraphFunction.from_values({1: 1.0, 2: 0.5})
    with pytest.raises(NonpositiveGroundState):
        gst_form(H, lambda n: float(n) - 1.5, phi)


def test_infinite_support_rejected():
    H = SchrodingerOperator(halfline())
    with pytest.raises(InfiniteSupport):
        quadratic_form(H, GraphFunction.constant(1.0))


def test_superharmonic_report_halfline():
    H = SchrodingerOperator(halfline_dirichlet())
    rep = superharmonic_report(H, lambda n: float(n), range(1, 50))
    assert rep.is_positive_superharmonic and not rep.harmonic_except
    rep = superharmonic_report(H, lambda n: 1.0, range(1, 50))
    assert rep.is_superharmonic and rep.harmonic_except == frozenset({1})
    rep = superharmonic_report(H, lambda n: float(n * n), range(1, 50))
    assert not rep.is_superharmonic


def test_truncated_energy_sqrt_grows_like_log():
    # h(sqrt n) partial sums on the Dirichlet half-line: 1 + sum (sqrt(n+1)-sqrt n)^2
    H = SchrodingerOperator(halfline_dirichlet())
    tr = truncated_energy(H, lambda n: math.sqrt(n), (10, 100, 1000, 10000))
    oracle = [1 + sum((math.sqrt(k + 1) - math.sqrt(k)) ** 2 for k in range(1, N + 1)) for N in tr.radii]
    assert np.allclose(tr.partial_sums, oracle, rtol=1e-12)
    inc = np.diff(tr.partial_sums)
    assert np.allclose(inc[1:], 0.25 * math.log(10), rtol=0.01)
    assert truncated_energy(H, lambda n: math.sqrt(n), (10, 100), cap=1.0).verdict == "diverges"


def test_weighted_mass():
    phi = GraphFunction.from_values({1: 2.0, 2: -1.0})
    assert weighted_mass(lambda x: 0.5 * x, phi) == pytest.approx(0.5 * 4 + 1.0 * 1)
