import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netpower.errors import DisconnectedGraph, SingularMatrix, ZeroMatrix
from netpower.graph import build_network
from netpower.numerics import (
    all_pairs_geodesics,
    dominant_eigenpair,
    geodesics_from_matrix,
    grounded_laplacian_inverse,
    max_flow,
    max_flow_matrix,
    solve_linear,
)

from oracles import geodesics_by_enumeration


def test_solve_linear_examples():
    assert np.allclose(solve_linear(np.eye(3), [1, 2, 3]), [1, 2, 3])
    assert np.allclose(solve_linear(np.diag([2.0, 4.0]), [2, 8]), [1, 2])
    with pytest.raises(SingularMatrix):
        solve_linear([[1, 2], [2, 4]], [1, 1])


def test_solve_linear_matches_numpy(rng):
    M = rng.normal(size=(6, 6)) + 6 * np.eye(6)
    B = rng.normal(size=(6, 3))
    assert np.allclose(solve_linear(M, B), np.linalg.solve(M, B), atol=1e-12)


def test_eigenpair_examples():
    r = dominant_eigenpair(np.array([[0.0, 1], [1, 0]]))
    assert r.eigenvalue == pytest.approx(1.0)
    assert np.allclose(r.eigenvector, [0.5, 0.5])
    r = dominant_eigenpair(np.diag([2.0, 1.0]))
    assert r.eigenvalue == pytest.approx(2.0)
    assert np.allclose(r.eigenvector, [1, 0], atol=1e-9)
    with pytest.raises(ZeroMatrix):
        dominant_eigenpair(np.zeros((2, 2)))


def test_eigenpair_matches_numpy(rng):
    M = rng.random((7, 7))
    r = dominant_eigenpair(M)
    w, V = np.linalg.eig(M)
    k = np.argmax(w.real)
    ref = np.abs(V[:, k].real)
    assert r.eigenvalue == pytest.approx(w[k].real, rel=1e-9)
    assert np.allclose(r.eigenvector, ref / ref.sum(), atol=1e-8)


def _undirected(n, pairs):
    return build_network([f"v{i}" for i in range(n)], [(f"v{a}", f"v{b}", 1) for a, b in pairs], directed=False)


def test_geodesic_examples():
    d, s = all_pairs_geodesics(_undirected(3, [(0, 1), (1, 2)]))
    assert d[0, 2] == 2 and s[0, 2] == 1
    d, s = all_pairs_geodesics(_undirected(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))
    assert d[0, 2] == 2 and s[0, 2] == 2
    d, _ = all_pairs_geodesics(_undirected(2, []))
    assert np.isinf(d[0, 1])


def test_weighted_geodesics_count_ties():
    W = np.zeros((4, 4))
    W[0, 1] = W[1, 3] = 1.0
    W[0, 2] = 0.5
    W[2, 3] = 1.5
    W[0, 3] = 2.5
    d, s = geodesics_from_matrix(W, weighted=True)
    assert d[0, 3] == 2.0 and s[0, 3] == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.floats(0.1, 0.7), st.integers(0, 2**32 - 1))
def test_bfs_geodesics_match_enumeration(n, p, seed):
    A = (np.random.default_rng(seed).random((n, n)) < p).astype(float)
    np.fill_diagonal(A, 0)
    d, s = geodesics_from_matrix(A)
    d_ref, s_ref, _ = geodesics_by_enumeration(A)
    assert np.array_equal(d, d_ref)
    assert np.array_equal(s, s_ref)


def test_max_flow_examples():
    net = build_network(["s", "t"], [("s", "t", 2)])
    assert max_flow(net, "s", "t").value == 2
    net = build_network(["s", "m1", "m2", "t"], [("s", "m1", 1), ("m1", "t", 1), ("s", "m2", 1), ("m2", "t", 1)])
    r = max_flow(net, "s", "t")
    assert r.value == 2
    assert r.through[net.index("m1")] == 1 and r.through[net.index("m2")] == 1
    assert max_flow(build_network(["s", "t"]), "s", "t").value == 0


def _min_cut(C, s, t):
    n = C.shape[0]
    others = [k for k in range(n) if k not in (s, t)]
    best = np.inf
    for r in range(len(others) + 1):
        for side in itertools.combinations(others, r):
            S = [s, *side]
            T = [k for k in range(n) if k not in S]
            best = min(best, C[np.ix_(S, T)].sum())
    return best


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_max_flow_equals_min_cut(n, seed):
    g = np.random.default_rng(seed)
    C = np.where(g.random((n, n)) < 0.4, g.integers(1, 6, (n, n)), 0).astype(float)
    np.fill_diagonal(C, 0)
    r = max_flow_matrix(C, 0, n - 1)
    assert r.value == pytest.approx(_min_cut(C, 0, n - 1))
    # conservation at intermediate nodes
    net = r.flow
    for k in range(1, n - 1):
        assert net[:, k].sum() == pytest.approx(net[k, :].sum())
    assert (net <= C + 1e-12).all()


def test_grounded_inverse():
    k2 = _undirected(2, [(0, 1)])
    assert np.allclose(grounded_laplacian_inverse(k2, "v1"), [[1, 0], [0, 0]])
    p3 = build_network(["a", "b", "c"], [("a", "b", 1), ("b", "c", 1)], directed=False)
    G = grounded_laplacian_inverse(p3, "c")
    # reduced Laplacian on (a, b) is [[1, -1], [-1, 2]]
    assert np.allclose(G, [[2, 1, 0], [1, 1, 0], [0, 0, 0]])
    with pytest.raises(DisconnectedGraph):
        grounded_laplacian_inverse(_undirected(3, [(0, 1)]), "v0")


def test_grounded_inverse_is_pseudo_inverse_block(rng):
    from oracles import random_connected_graph

    A = random_connected_graph(rng, 6, 0.5)
    net = build_network([f"v{i}" for i in range(6)], [(f"v{i}", f"v{j}", 1) for i in range(6) for j in range(i + 1, 6) if A[i, j]], directed=False)
    G = grounded_laplacian_inverse(net, "v5")
    L = np.diag(A.sum(1)) - A
    assert np.allclose(L[:5, :5] @ G[:5, :5], np.eye(5))
