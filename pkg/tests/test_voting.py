from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netpower.errors import (
    CycleDepthExceeded,
    InvalidOption,
    TooManyPlayers,
    UnknownPlayer,
)
from netpower.graph import build_network
from netpower.voting import (
    ControlStructure,
    WeightedVotingGame,
    banzhaf,
    characteristic,
    control_closure,
    johnston,
    karos_peters_phi,
    mercik_lobos_pi,
    shapley_shubik,
)

from oracles import (
    banzhaf_by_subsets,
    johnston_by_subsets,
    random_game,
    random_ownership,
    ss_by_permutations,
)

F = Fraction


def game(q, *w):
    return WeightedVotingGame(tuple(w), q)


def exact(profile):
    return list(profile.exact)


def test_characteristic():
    g = game(50, 49, 49, 2)
    assert characteristic(g, {1, 2}) == 1
    assert characteristic(g, set()) == 0
    assert characteristic(g, {1, 2, 3}) == 1
    with pytest.raises(UnknownPlayer):
        characteristic(g, {7})


def test_quota_tie_wins_unless_strict():
    assert characteristic(game(50, 50, 50), {1}) == 1
    assert characteristic(WeightedVotingGame((50, 50), 50, strict=True), {1}) == 0


def test_float_quota_hit_is_not_lost_to_rounding():
    g = WeightedVotingGame((0.1, 0.2, 0.7), 0.3)
    assert characteristic(g, {1, 2}) == 1


def test_shapley_shubik_examples():
    assert exact(shapley_shubik(game(50, 49, 49, 2))) == [F(1, 3)] * 3
    assert exact(shapley_shubik(game(51, 50, 30, 20))) == [F(2, 3), F(1, 6), F(1, 6)]
    assert exact(shapley_shubik(game(51, 60, 40))) == [1, 0]


def test_banzhaf_examples():
    g = game(3, 2, 1, 1)
    raw = banzhaf(g, normalized=False)
    assert raw.raw_values.tolist() == [3, 1, 1]
    assert exact(raw) == [F(3, 4), F(1, 4), F(1, 4)]
    assert exact(banzhaf(g)) == [F(3, 5), F(1, 5), F(1, 5)]
    assert exact(banzhaf(game(51, 60, 40))) == [1, 0]
    assert exact(banzhaf(game(2, 1, 1, 1))) == [F(1, 3)] * 3


def test_johnston_examples():
    assert exact(johnston(game(3, 2, 1, 1))) == [F(2, 3), F(1, 6), F(1, 6)]
    assert exact(johnston(game(51, 60, 40))) == [1, 0]
    assert exact(johnston(game(2, 1, 1, 1))) == [F(1, 3)] * 3


def test_game_validation():
    with pytest.raises(InvalidOption):
        game(10, 1, 2)
    with pytest.raises(InvalidOption):
        game(0, 1, 2)
    with pytest.raises(InvalidOption):
        game(1, -1, 3)
    with pytest.raises(TooManyPlayers):
        shapley_shubik(WeightedVotingGame((1,) * 21, 11))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_classical_indices_match_oracles(seed, strict):
    weights, quota = random_game(np.random.default_rng(seed))
    if strict and quota >= sum(weights):
        strict = False
    g = WeightedVotingGame(tuple(weights), quota, strict=strict)
    assert exact(shapley_shubik(g)) == ss_by_permutations(weights, quota, strict)
    eta, norm = banzhaf_by_subsets(weights, quota, strict)
    assert banzhaf(g, normalized=False).raw_values.tolist() == eta
    if sum(eta):
        assert exact(banzhaf(g)) == norm
        assert exact(johnston(g)) == johnston_by_subsets(weights, quota, strict)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_efficiency_null_player_symmetry(seed):
    g_rng = np.random.default_rng(seed)
    weights, quota = random_game(g_rng)
    weights = weights + [0]
    g = WeightedVotingGame(tuple(weights), quota)
    profiles = [shapley_shubik(g)]
    if sum(banzhaf(g, normalized=False).raw_values):
        profiles += [banzhaf(g), johnston(g)]
    for p in profiles:
        assert sum(p.exact) == 1
        assert p.exact[-1] == 0
        for a in range(len(weights)):
            for b in range(len(weights)):
                if weights[a] == weights[b]:
                    assert p.exact[a] == p.exact[b]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9))
def test_scaling_invariance(seed, c):
    weights, quota = random_game(np.random.default_rng(seed))
    a = WeightedVotingGame(tuple(weights), quota)
    b = WeightedVotingGame(tuple(w * c for w in weights), quota * c)
    for fn in (shapley_shubik, banzhaf, johnston):
        try:
            pa = fn(a)
        except Exception as exc:  # both games must fail the same way
            with pytest.raises(type(exc)):
                fn(b)
            continue
        assert pa.exact == fn(b).exact


def own(edges, kinds=None):
    ids = sorted({x for e in edges for x in e[:2]} | set(kinds or ()))
    nodes = [(i, (kinds or {}).get(i, "firm"), 1.0) for i in ids]
    return ControlStructure(build_network(nodes, edges, ownership=True))


def test_control_closure_examples():
    assert control_closure(own([("i", "f", 1.0)]), {"i"}) == {"f"}
    assert control_closure(own([("i", "m", 0.6), ("m", "t", 0.6)]), {"i"}) == {"m", "t"}
    assert control_closure(own([("i", "t", 0.4)]), {"i"}) == frozenset()


def test_control_closure_strict_majority():
    cs = own([("a", "f", 0.5), ("b", "f", 0.5)])
    assert control_closure(cs, {"a"}) == frozenset()
    assert control_closure(cs, {"a", "b"}) == {"f"}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_control_closure_monotone(seed, n):
    g = np.random.default_rng(seed)
    S = random_ownership(g, n, 0.5, acyclic=False)
    ids = [f"n{k}" for k in range(n)]
    cs = ControlStructure(build_network(ids, [(ids[i], ids[j], S[i, j]) for i, j in zip(*np.nonzero(S))], ownership=True))
    small = {ids[k] for k in range(n) if g.random() < 0.4}
    big = small | {ids[k] for k in range(n) if g.random() < 0.4}
    assert control_closure(cs, small) <= control_closure(cs, big)


def test_phi_examples():
    phi = karos_peters_phi(own([("i", "f", 1.0)]))
    assert phi["i"] == 1 and phi["f"] == -1
    assert phi.notes["corrected"] == ["f"]
    sym = karos_peters_phi(own([("a", "f", 1.0), ("b", "g", 1.0)]))
    assert sym["a"] == sym["b"]
    empty = ControlStructure(build_network(["a", "b"], ownership=True))
    assert not karos_peters_phi(empty).values.any()


def test_pi_examples():
    chain = own([("p", "h", 1.0), ("h", "f", 1.0)], {"p": "person"})
    assert mercik_lobos_pi(chain)["p"] == 1
    assert mercik_lobos_pi(chain, "pi_prime")["p"] == 1
    split = own([("a", "f", 0.5), ("b", "f", 0.5)])
    # neither holder alone exceeds half, so both are critical in the pair
    assert mercik_lobos_pi(split)["a"] == pytest.approx(0.5)
    assert mercik_lobos_pi(split)["b"] == pytest.approx(0.5)


def test_pi_prime_null_player():
    # z holds a sliver of h that never matters for control
    cs = own([("x", "h", 0.7), ("z", "h", 0.01), ("h", "f", 0.6), ("y", "f", 0.4)])
    prime = mercik_lobos_pi(cs, "pi_prime")
    assert prime["z"] == 0
    assert mercik_lobos_pi(cs, "pi")["z"] > 0


def test_pi_cycle_depth():
    cs = own([("a", "b", 0.9), ("b", "a", 0.9)])
    with pytest.raises(CycleDepthExceeded):
        mercik_lobos_pi(cs)
