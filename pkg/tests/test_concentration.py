from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netpower.concentration import (
    ShareDistribution,
    distribution_from_shareholders,
    hhi,
    nci,
    top_k,
    ultimate_control,
)
from netpower.errors import CycleDetected, EmptyDistribution, InvalidDistribution, KOutOfRange
from netpower.graph import build_network

from oracles import minimal_cover_size, random_ownership

shares = st.lists(st.integers(0, 50), min_size=1, max_size=10).filter(lambda xs: sum(xs) > 0)


def test_hhi_examples():
    assert hhi([1.0]) == 1.0
    assert hhi([0.5, 0.5]) == 0.5
    assert hhi([0.6, 0.2, 0.2]) == pytest.approx(0.44, abs=1e-15)
    assert hhi([Fraction(1, 3)] * 3) == Fraction(1, 3)


def test_distribution_validation():
    with pytest.raises(EmptyDistribution):
        ShareDistribution(())
    with pytest.raises(InvalidDistribution):
        ShareDistribution((0.5, 0.4))
    with pytest.raises(InvalidDistribution):
        ShareDistribution((1.2, -0.2))


@pytest.mark.parametrize("n", [1, 3, 7, 10, 49])
def test_hhi_uniform_is_exact(n):
    assert hhi([1 / n] * n) == 1 / n or abs(hhi([1 / n] * n) - 1 / n) <= 2**-52 / n
    assert hhi([Fraction(1, n)] * n) == Fraction(1, n)


def test_top_k_examples():
    d = [0.4, 0.3, 0.2, 0.1]
    assert top_k(d, 2) == pytest.approx(0.7)
    assert top_k(d, 4) == pytest.approx(1.0)
    assert top_k([1.0], 1) == 1.0
    with pytest.raises(KOutOfRange):
        top_k(d, 0)
    with pytest.raises(KOutOfRange):
        top_k(d, 5)


def test_nci_examples():
    r = nci([0.5, 0.3, 0.05, 0.05, 0.05, 0.05], 0.8)
    assert len(r.members) == 2 and r.percentage == pytest.approx(100 / 3)
    assert nci([0.25] * 4, 1.0).percentage == 100
    assert nci([1.0, 0, 0, 0], 0.8).percentage == 25


@settings(max_examples=100, deadline=None)
@given(shares, st.floats(0.05, 1.0))
def test_concentration_properties(amounts, H):
    d = ShareDistribution.from_amounts(amounts)
    p = list(d.shares)
    perm = ShareDistribution(tuple(reversed(p)))
    assert hhi(d) == pytest.approx(hhi(perm), abs=1e-15)
    assert 1 / d.n - 1e-12 <= hhi(d) <= 1 + 1e-12
    tops = [top_k(d, k) for k in range(1, d.n + 1)]
    assert all(a <= b + 1e-15 for a, b in zip(tops, tops[1:]))
    assert tops[-1] == pytest.approx(1.0)
    size = len(nci(d, H).members)
    assert size == minimal_cover_size(p, H)
    assert size <= len(nci(d, min(1.0, H + 0.1)).members)


def own(edges):
    ids = sorted({x for e in edges for x in e[:2]})
    return build_network(ids, edges, ownership=True)


def test_ultimate_control_examples():
    net = own([("A", "B", 0.6), ("B", "C", 0.3)])
    assert ultimate_control(net, 0.2)["C"] == "A"
    assert ultimate_control(net, 0.5)["C"] == "C"
    assert ultimate_control(net, 0.2)["A"] == "A"
    assert ultimate_control(net, 0.2).chains["C"] == ("C", "B", "A")


def test_ultimate_control_product_rule():
    net = own([("A", "B", 0.6), ("B", "C", 0.3)])
    # 0.3 * 0.6 = 0.18 misses a 0.2 threshold
    assert ultimate_control(net, 0.2, "product")["C"] == "B"
    assert ultimate_control(net, 0.15, "product")["C"] == "A"


def test_ultimate_control_ties_and_cycles():
    uc = ultimate_control(own([("B", "F", 0.3), ("A", "F", 0.3)]))
    assert uc["F"] == "A" and uc.ties == {"F"}
    with pytest.raises(CycleDetected) as err:
        ultimate_control(own([("A", "B", 0.6), ("B", "A", 0.6)]))
    assert set(err.value.members) == {"A", "B"}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 10), st.floats(0.51, 0.95))
def test_majority_threshold_gives_forest(seed, n, threshold):
    S = random_ownership(np.random.default_rng(seed), n, 0.4, acyclic=True)
    ids = [f"n{k}" for k in range(n)]
    net = build_network(ids, [(ids[i], ids[j], S[i, j]) for i, j in zip(*np.nonzero(S))], ownership=True)
    uc = ultimate_control(net, threshold)
    for j in ids:
        chain = uc.chains[j]
        assert len(set(chain)) == len(chain)
        assert uc[j] == chain[-1]
        # each step is the unique holder above the majority threshold
        for child, parent in zip(chain, chain[1:]):
            above = [i for i in ids if S[ids.index(i), ids.index(child)] >= threshold]
            assert above == [parent]


def test_distribution_from_shareholders():
    net = own([("A", "F", 0.3), ("B", "F", 0.1)])
    d = distribution_from_shareholders(net, "F")
    assert d.ids == ("A", "B") and d.shares == pytest.approx((0.75, 0.25))
