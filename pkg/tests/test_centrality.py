import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netpower.centrality import (
    MEASURES,
    CentralityOptions,
    betweenness_centrality,
    closeness_centrality,
    degree_centrality,
    eccentricity_centrality,
    eigenvector_centrality,
    flow_betweenness,
    information_centrality,
    walk_betweenness,
)
from netpower.errors import DisconnectedGraph, SingletonNetwork, ZeroMatrix
from netpower.graph import adjacency_matrix, build_network, relabel

from oracles import betweenness_by_enumeration, random_connected_graph, random_tree

NORM = CentralityOptions(normalized=True)
UNDIRECTED = ("betweenness", "closeness", "degree", "eccentricity", "eigenvector", "flow-betweenness", "information", "walk-betweenness")


def undirected(n, pairs, w=None):
    ids = [f"v{i}" for i in range(n)]
    return build_network(ids, [(ids[a], ids[b], 1 if w is None else w[k]) for k, (a, b) in enumerate(pairs)], directed=False)


def from_matrix(A):
    n = A.shape[0]
    return undirected(n, [(i, j) for i in range(n) for j in range(i + 1, n) if A[i, j]])


STAR = undirected(4, [(0, 1), (0, 2), (0, 3)])
P3 = undirected(3, [(0, 1), (1, 2)])
K3 = undirected(3, [(0, 1), (1, 2), (0, 2)])
C4 = undirected(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


def test_degree_examples():
    assert degree_centrality(STAR)["v0"] == 3
    assert degree_centrality(STAR, NORM)["v0"] == 1.0
    assert degree_centrality(STAR, NORM)["v1"] == pytest.approx(1 / 3)
    net = build_network(["A", "B", "C"], [("A", "B", 0.6), ("A", "C", 0.2)])
    assert degree_centrality(net, CentralityOptions(weighted=True))["A"] == pytest.approx(0.8)


def test_degree_directions():
    net = build_network(["A", "B", "C"], [("A", "B", 1), ("C", "B", 1)])
    assert degree_centrality(net, CentralityOptions(direction="in"))["B"] == 2
    assert degree_centrality(net, CentralityOptions(direction="out"))["B"] == 0
    assert degree_centrality(net)["B"] == 2


def test_degree_singleton():
    with pytest.raises(SingletonNetwork):
        degree_centrality(build_network(["A"]), NORM)


def test_eigenvector_examples():
    k2 = undirected(2, [(0, 1)])
    assert np.allclose(eigenvector_centrality(k2).values, [0.5, 0.5])
    sv = eigenvector_centrality(STAR)
    assert sv["v0"] > sv["v1"] == pytest.approx(sv["v2"])
    two = undirected(4, [(0, 1), (2, 3)])
    assert np.allclose(eigenvector_centrality(two).values, [0.5, 0.5, 0, 0])
    with pytest.raises(ZeroMatrix):
        eigenvector_centrality(build_network(["a", "b"]))


def test_eigenvector_residual(rng):
    net = from_matrix(random_connected_graph(rng, 9, 0.4))
    A = adjacency_matrix(net)
    x = eigenvector_centrality(net).values
    lam = (A @ x).sum() / x.sum()
    assert np.abs(A @ x - lam * x).max() <= 1e-8
    assert x.sum() == pytest.approx(1.0)


def test_closeness_examples():
    c = closeness_centrality(STAR, NORM)
    assert c["v0"] == 1.0 and c["v1"] == pytest.approx(3 / 5)
    assert closeness_centrality(P3, NORM)["v1"] == 1.0
    with pytest.raises(DisconnectedGraph):
        closeness_centrality(undirected(3, [(0, 1)]))
    per = closeness_centrality(undirected(3, [(0, 1)]), CentralityOptions(per_component=True))
    assert per["v0"] == 1.0


def test_betweenness_examples():
    assert betweenness_centrality(P3)["v1"] == 1
    assert betweenness_centrality(STAR)["v0"] == 3
    assert not betweenness_centrality(K3).values.any()


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.floats(0.2, 0.8), st.integers(0, 2**32 - 1))
def test_betweenness_matches_enumeration(n, p, seed):
    A = random_connected_graph(np.random.default_rng(seed), n, p)
    got = betweenness_centrality(from_matrix(A)).values
    assert np.allclose(got, betweenness_by_enumeration(A, directed=False))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_directed_betweenness_matches_enumeration(n, seed):
    g = np.random.default_rng(seed)
    A = (g.random((n, n)) < 0.4).astype(float)
    np.fill_diagonal(A, 0)
    ids = [f"v{i}" for i in range(n)]
    net = build_network(ids, [(ids[i], ids[j], 1) for i, j in zip(*np.nonzero(A))])
    assert np.allclose(betweenness_centrality(net).values, betweenness_by_enumeration(A, directed=True))


def test_flow_betweenness_examples():
    net = build_network(["s", "m1", "m2", "t"], [("s", "m1", 1), ("m1", "t", 1), ("s", "m2", 1), ("m2", "t", 1)])
    fb = flow_betweenness(net)
    assert fb["m1"] == fb["m2"] == 1
    assert flow_betweenness(P3)["v1"] == pytest.approx(1)
    k3 = flow_betweenness(K3).values
    assert (k3 >= 0).all() and np.allclose(k3, k3[0])


def _cut_value(C, s, t):
    n = C.shape[0]
    others = [k for k in range(n) if k not in (s, t)]
    best = np.inf
    for r in range(len(others) + 1):
        for side in itertools.combinations(others, r):
            S = [s, *side]
            T = [k for k in range(n) if k not in S]
            best = min(best, C[np.ix_(S, T)].sum())
    return best


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 6), st.integers(0, 2**32 - 1))
def test_flow_betweenness_matches_cut_oracle(n, seed):
    g = np.random.default_rng(seed)
    W = np.triu(np.where(g.random((n, n)) < 0.6, g.integers(1, 4, (n, n)), 0), 1).astype(float)
    W = W + W.T
    ids = [f"v{i}" for i in range(n)]
    net = build_network(ids, [(ids[i], ids[j], W[i, j]) for i in range(n) for j in range(i + 1, n) if W[i, j]], directed=False)
    expect = np.zeros(n)
    for a in range(n):
        for b in range(a + 1, n):
            full = _cut_value(W, a, b)
            for i in set(range(n)) - {a, b}:
                R = W.copy()
                R[i, :] = R[:, i] = 0
                expect[i] += full - _cut_value(R, a, b)
    got = flow_betweenness(net, CentralityOptions(weighted=True)).values
    assert np.allclose(got, expect)


def test_walk_betweenness_examples():
    assert walk_betweenness(P3)["v1"] == pytest.approx(1)
    assert np.allclose(walk_betweenness(undirected(2, [(0, 1)])).values, 0)
    w = walk_betweenness(C4).values
    assert np.allclose(w, w[0])
    with pytest.raises(DisconnectedGraph):
        walk_betweenness(undirected(3, [(0, 1)]))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_walk_equals_geodesic_on_trees(n, seed):
    net = from_matrix(random_tree(np.random.default_rng(seed), n))
    assert np.allclose(walk_betweenness(net).values, betweenness_centrality(net).values)


def test_information_examples():
    k3 = information_centrality(K3).values
    assert np.allclose(k3, k3[0])
    p3 = information_centrality(P3)
    assert p3["v1"] > p3["v0"] and p3["v1"] > p3["v2"]
    assert information_centrality(C4, NORM).values.sum() == pytest.approx(1)


def test_eccentricity_examples():
    assert eccentricity_centrality(STAR)["v0"] == 1
    assert eccentricity_centrality(P3)["v0"] == 0.5
    k4 = undirected(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    assert np.allclose(eccentricity_centrality(k4).values, 1)
    split = undirected(3, [(0, 1)])
    with pytest.raises(DisconnectedGraph):
        eccentricity_centrality(split)
    per = eccentricity_centrality(split, CentralityOptions(per_component=True))
    assert per.values.tolist() == [1, 1, 0]


@pytest.mark.parametrize("name", UNDIRECTED)
def test_relabel_equivariance(name, rng):
    net = from_matrix(random_connected_graph(rng, 7, 0.45))
    perm = rng.permutation(7)
    mapping = {f"v{i}": f"w{perm[i]}" for i in range(7)}
    moved = relabel(net, mapping)
    a, b = MEASURES[name](net), MEASURES[name](moved)
    for old, new in mapping.items():
        assert a[old] == pytest.approx(b[new], abs=1e-9)


@pytest.mark.parametrize("name", UNDIRECTED)
def test_structurally_equivalent_nodes_tie(name):
    # v1 and v2 share the neighbourhood {v0, v3}
    net = undirected(5, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)])
    sv = MEASURES[name](net)
    assert sv["v1"] == pytest.approx(sv["v2"], abs=1e-9)


@pytest.mark.parametrize("fn", [degree_centrality, closeness_centrality, eccentricity_centrality])
def test_normalized_in_unit_interval(fn, rng):
    for _ in range(10):
        v = fn(from_matrix(random_connected_graph(rng, 8, 0.3)), NORM).values
        assert ((v >= 0) & (v <= 1 + 1e-12)).all()
