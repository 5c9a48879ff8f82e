import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphhardy.errors import AsymmetricInput, Disconnected, InputError, NonpositiveWeight, SelfLoop
from graphhardy.families import (
    FamilySpec,
    halfline,
    halfline_dirichlet,
    lattice,
    path_graph,
    random_graph,
    regular_tree,
)
from graphhardy.graph import (
    Exhaustion,
    GraphFunction,
    ball,
    boundary_layer,
    build_finite_graph,
    check_assumptions,
    check_symmetry,
    graph_from_json,
    graph_to_json,
    load_graph,
    materialize,
    outer_boundary,
    restrict,
    save_graph,
    shells,
)


def l1_ball_size(d, N):
    # lattice points with |x|_1 <= N
    return sum(math.comb(d, k) * math.comb(N, k) * 2 ** k for k in range(d + 1))


@pytest.mark.parametrize("d,N", [(1, 7), (2, 5), (3, 4), (4, 3)])
def test_lattice_ball_matches_l1_count(d, N):
    assert len(ball(lattice(d), N)) == l1_ball_size(d, N)


@pytest.mark.parametrize("deg,N", [(3, 4), (4, 3)])
def test_tree_ball_size(deg, N):
    expected = 1 + sum(deg * (deg - 1) ** (k - 1) for k in range(1, N + 1))
    assert len(ball(regular_tree(deg), N)) == expected
    assert all(regular_tree(deg).degree(x) == deg for x in ball(regular_tree(deg), 2))


def test_ball_order_is_bfs_with_sorted_shells():
    b = ball(lattice(2), 2)
    sh = shells(lattice(2), 2)
    assert b == sum(sh, ())
    assert all(list(s) == sorted(s) for s in sh)


def test_halfline_dirichlet_potential():
    g = halfline_dirichlet()
    assert g.potential(1) == 1.0 and g.potential(2) == 0.0
    assert [y for y, _ in g.neighbors(1)] == [2]
    assert g.root == 1


def test_restrict_adds_removed_weight_to_potential():
    g = restrict(lattice(2), [(0, 0)], root=(1, 0))
    assert g.potential((1, 0)) == 1.0
    assert g.potential((1, 1)) == 0.0
    assert (0, 0) not in [y for y, _ in g.neighbors((1, 0))]
    with pytest.raises(InputError):
        restrict(lattice(2), [(0, 0)], root=(0, 0))


def test_build_validation_errors():
    with pytest.raises(SelfLoop):
        build_finite_graph([(0, 0, 1.0)])
    with pytest.raises(NonpositiveWeight):
        build_finite_graph([(0, 1, 0.0)])
    with pytest.raises(NonpositiveWeight):
        build_finite_graph([(0, 1, -1.0)])
    with pytest.raises(AsymmetricInput):
        build_finite_graph([(0, 1, 1.0), (1, 0, 2.0)])
    with pytest.raises(Disconnected):
        build_finite_graph([(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(Disconnected):
        build_finite_graph([(0, 1, 1.0)], vertices=[0, 1, 2])


def test_repeated_consistent_edge_is_accepted():
    g = build_finite_graph([(0, 1, 1.5), (1, 0, 1.5)])
    assert g.weight(0, 1) == 1.5 and len(list(g.edges())) == 1


@given(st.integers(2, 40), st.integers(0, 10 ** 6))
def test_random_graph_is_connected_and_symmetric(n, seed):
    g = random_graph(n, np.random.default_rng(seed))
    assert len(g) == n
    assert len(ball(g, n)) == n
    for x, y, b in g.edges():
        assert 0 < b <= 2 and g.weight(y, x) == b
    assert check_symmetry(g, radius=n) > 0


def test_json_roundtrip(tmp_path):
    g = build_finite_graph([((0, 0), (0, 1), 0.5), ((0, 1), (1, 1), 2.0)], potential={(0, 0): -0.25})
    data = graph_to_json(g)
    h = graph_from_json(data)
    assert set(h.vertices) == set(g.vertices)
    assert h.potential((0, 0)) == -0.25 and h.weight((0, 1), (1, 1)) == 2.0
    p = tmp_path / "g.json"
    save_graph(g, p)
    assert graph_to_json(load_graph(p)) == data


def test_malformed_json():
    with pytest.raises(InputError):
        graph_from_json({"vertices": [0, 1]})


def test_materialize_and_boundaries():
    g = materialize(halfline(), 5)
    assert len(g) == 6
    assert boundary_layer(halfline(), ball(halfline(), 5)) == frozenset({5})
    assert outer_boundary(halfline(), ball(halfline(), 5)) == (6,)
    ex = Exhaustion(halfline())
    assert ex.ball(3) == (0, 1, 2, 3) and ex.boundary_layer(3) == frozenset({3})


def test_graph_function_support_and_values():
    f = GraphFunction.from_values({1: 2.0, 3: -1.0})
    assert f(2) == 0.0 and f(3) == -1.0
    assert f.is_finitely_supported
    assert list(f.values([1, 2, 3])) == [2.0, 0.0, -1.0]
    assert not GraphFunction.constant(1.0).is_finitely_supported


def test_check_assumptions_halfline():
    rep = check_assumptions(lambda n: float(n), halfline_dirichlet(), 20)
    assert rep.edge_ratio_sup == 2.0 and rep.argmax_edge == (2, 1)
    assert rep.max_level_count == 1 and rep.advisory


def test_family_spec():
    assert FamilySpec("lattice", {"dim": 2}).build().root == (0, 0)
    assert len(path_graph(4)) == 4
    with pytest.raises(InputError):
        FamilySpec("torus").build()
