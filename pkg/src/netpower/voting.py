"""Voting power in weighted games and in ownership networks.

Classical indices (Shapley-Shubik, Banzhaf, Johnston) are computed by exact
coalition enumeration. When weights and quota are ints or
:class:`fractions.Fraction`, comparisons are done in integer arithmetic and
the indices are returned as exact fractions as well; float inputs use an
absolute comparison slack of ``1e-12 * max(1, quota)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import (
    AllPowerless,
    CycleDepthExceeded,
    InvalidOption,
    NotOwnershipNetwork,
    NoVulnerableCoalitions,
    TooManyNodes,
    TooManyPlayers,
    UnknownPlayer,
)
from .graph import Network, ownership_matrix, shareholders_of

MAX_PLAYERS = 20
MAX_CONTROL_NODES = 16
FLOAT_SLACK = 1e-12
REDISTRIBUTION_DEPTH = 32


def _is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


@dataclass(frozen=True)
class WeightedVotingGame:
    """Simple weighted game: S wins iff its weight reaches the quota.

    ``strict=True`` switches the winning test to "exceeds the quota", which is
    how control by a majority of outstanding shares is modelled.
    """

    weights: tuple
    quota: float
    players: tuple = None
    strict: bool = False

    def __post_init__(self):
        w = tuple(self.weights)
        object.__setattr__(self, "weights", w)
        players = tuple(self.players) if self.players is not None else tuple(range(1, len(w) + 1))
        object.__setattr__(self, "players", players)
        if len(players) != len(w):
            raise InvalidOption("one weight per player required")
        if len(set(players)) != len(players):
            raise InvalidOption("player ids must be unique")
        if any(x < 0 for x in w):
            raise InvalidOption("weights must be nonnegative")
        total = sum(w)
        if not self.quota > 0:
            raise InvalidOption("quota must be positive")
        if self.quota > total or (self.strict and self.quota >= total):
            raise InvalidOption(f"quota {self.quota} is unreachable with total weight {total}")

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def exact(self) -> bool:
        return all(_is_exact(x) for x in self.weights) and _is_exact(self.quota)

    def kernel_inputs(self):
        """``(weights, threshold, strict)`` ready for the enumeration kernels."""
        if self.exact:
            fr = [Fraction(x) for x in self.weights] + [Fraction(self.quota)]
            scale = math.lcm(*(f.denominator for f in fr))
            ints = [int(f * scale) for f in fr]
            if sum(ints) >= 2**62:
                raise InvalidOption("weights too large for exact integer enumeration")
            return np.array(ints[:-1], dtype=np.int64), ints[-1], self.strict
        q = float(self.quota)
        slack = FLOAT_SLACK * max(1.0, abs(q))
        threshold = q + slack if self.strict else q - slack
        return np.array(self.weights, dtype=float), threshold, self.strict


@dataclass(frozen=True, eq=False)
class PowerProfile:
    index: str
    players: tuple
    values: np.ndarray
    raw_values: np.ndarray | None = None
    exact: tuple | None = None
    notes: dict = field(default_factory=dict)

    def __getitem__(self, player) -> float:
        return float(self.values[self.players.index(player)])

    def as_dict(self) -> dict:
        return {p: float(v) for p, v in zip(self.players, self.values)}


def characteristic(game: WeightedVotingGame, coalition: Iterable) -> int:
    """1 if ``coalition`` wins, else 0."""
    members = set(coalition)
    unknown = members - set(game.players)
    if unknown:
        raise UnknownPlayer(f"unknown players {sorted(map(str, unknown))}")
    w, threshold, strict = game.kernel_inputs()
    tot = sum(w[k] for k, p in enumerate(game.players) if p in members)
    return int(tot > threshold if strict else tot >= threshold)


def _counts(game: WeightedVotingGame):
    if game.n > MAX_PLAYERS:
        raise TooManyPlayers(f"{game.n} players; exact enumeration supports at most {MAX_PLAYERS}")
    w, threshold, strict = game.kernel_inputs()
    return kernels.coalition_counts(w, threshold, strict)


def _order_weights(n: int) -> list[Fraction]:
    # probability that exactly the s predecessors come before a given player
    return [Fraction(math.factorial(s) * math.factorial(n - s - 1), math.factorial(n)) for s in range(n)]


def _profile(name, game, exact_vals, raw=None, **notes) -> PowerProfile:
    vals = np.array([float(v) for v in exact_vals])
    return PowerProfile(name, game.players, vals, raw, tuple(exact_vals) if game.exact else None, notes)


def shapley_shubik(game: WeightedVotingGame) -> PowerProfile:
    """Share of player orderings in which each player is pivotal."""
    swings, _ = _counts(game)
    coef = _order_weights(game.n)
    vals = [sum((int(c) * coef[s] for s, c in enumerate(swings[i]) if c), Fraction(0)) for i in range(game.n)]
    return _profile("shapley_shubik", game, vals)


def banzhaf(game: WeightedVotingGame, normalized: bool = True) -> PowerProfile:
    """Banzhaf index from swing counts ``eta``.

    Raw form ``eta_i / 2**(n-1)``; normalized form ``eta_i / sum(eta)``. The
    swing counts are kept in ``raw_values``.
    """
    swings, _ = _counts(game)
    eta = swings.sum(axis=1)
    total = int(eta.sum())
    if normalized:
        if total == 0:
            raise AllPowerless("no player is ever critical")
        vals = [Fraction(int(e), total) for e in eta]
    else:
        vals = [Fraction(int(e), 2 ** (game.n - 1)) for e in eta]
    return _profile("banzhaf" if normalized else "banzhaf_raw", game, vals, eta.astype(float))


def johnston_scores(game: WeightedVotingGame) -> list[Fraction]:
    """Absolute Johnston scores: sum of ``1/k`` over vulnerable coalitions
    in which the player is one of ``k`` critical members."""
    _, split = _counts(game)
    return [sum((Fraction(int(c), k) for k, c in enumerate(split[i]) if c), Fraction(0)) for i in range(game.n)]


def johnston(game: WeightedVotingGame) -> PowerProfile:
    """Johnston index: absolute scores normalized to sum to one."""
    raw = johnston_scores(game)
    total = sum(raw)
    if total == 0:
        raise NoVulnerableCoalitions("the game has no vulnerable coalitions")
    return _profile("johnston", game, [r / total for r in raw], np.array([float(r) for r in raw]))


# ---------------------------------------------------------------------------
# control games on ownership networks


@dataclass(frozen=True, eq=False)
class ControlStructure:
    """Ownership network plus the share fraction needed to control each node.

    A coalition controls node j when the shares of j it holds, directly or
    through nodes it already controls, exceed ``quota`` (or reach it when
    ``strict`` is False).
    """

    network: Network
    quota: float | Mapping[str, float] = 0.5
    strict: bool = True

    def __post_init__(self):
        if not self.network.ownership:
            raise NotOwnershipNetwork("control structures need an ownership network")

    def quota_of(self, node_id: str) -> float:
        if isinstance(self.quota, Mapping):
            return float(self.quota.get(node_id, 0.5))
        return float(self.quota)

    def quotas(self) -> np.ndarray:
        return np.array([self.quota_of(i) for i in self.network.ids])

    def reaches(self, held: float, node_id: str) -> bool:
        q = self.quota_of(node_id)
        slack = FLOAT_SLACK * max(1.0, q)
        return held > q + slack if self.strict else held >= q - slack


def control_closure(cs: ControlStructure, coalition: Iterable[str]) -> frozenset[str]:
    """Every node the coalition controls directly or through controlled nodes.

    Least fixed point starting from the empty set. Coalition members appear
    in the result only when the coalition also controls them.
    """
    net = cs.network
    S = set(coalition)
    for s in S:
        net.index(s)
    holders = {j: shareholders_of(net, j) for j in net.ids}
    controlled: set[str] = set()
    changed = True
    while changed:
        changed = False
        active = S | controlled
        for j in net.ids:
            if j in controlled:
                continue
            held = sum(w for i, w in holders[j] if i in active)
            if cs.reaches(held, j):
                controlled.add(j)
                changed = True
    return frozenset(controlled)


def closure_table(cs: ControlStructure) -> np.ndarray:
    """Bitmask of ``control_closure(S)`` for every bitmask S over node indices."""
    net = cs.network
    if net.n > MAX_CONTROL_NODES:
        raise TooManyNodes(f"{net.n} nodes; coalition enumeration supports at most {MAX_CONTROL_NODES}")
    q = cs.quotas()
    slack = FLOAT_SLACK * np.maximum(1.0, q)
    q = q + slack if cs.strict else q - slack
    return kernels.closure_table(ownership_matrix(net), q, cs.strict)


def karos_peters_phi(cs: ControlStructure) -> PowerProfile:
    """Network Shapley-Shubik power over all control games.

    ``Phi_i = sum_k SS_i(v_k) - [i is controlled by the grand coalition]``
    where ``v_k(S) = 1`` iff S's control closure contains k. Nodes receiving
    the self-control correction are listed in ``notes['corrected']``.
    """
    net = cs.network
    n = net.n
    table = closure_table(cs)
    coef = _order_weights(n)
    phi = [Fraction(0)] * n
    for k in range(n):
        win = ((table >> k) & 1).astype(np.int64)
        if not win.any():
            continue
        counts = kernels.marginal_counts(win)
        for i in range(n):
            phi[i] += sum((int(c) * coef[s] for s, c in enumerate(counts[i]) if c), Fraction(0))
    grand = int(table[-1])
    corrected = []
    for i in range(n):
        if (grand >> i) & 1:
            phi[i] -= 1
            corrected.append(net.ids[i])
    vals = np.array([float(p) for p in phi])
    return PowerProfile("phi", net.ids, vals, None, tuple(phi), {"corrected": corrected})


PI_VARIANTS = ("pi", "pi_prime")


def mercik_lobos_pi(cs: ControlStructure, variant: str = "pi") -> PowerProfile:
    """Implicit power index and its null-player-safe modification.

    Each node whose shareholders can control it distributes absolute Johnston
    scores to them. Scores landing on such controlled shareholders are passed
    on to their own shareholders, equally (``pi``) or in proportion to those
    shareholders' absolute Johnston scores (``pi_prime``), until only
    uncontrolled actors hold power. Totals are normalized to sum to one.

    Raises:
        CycleDepthExceeded: power still circulates among controlled nodes
            after 32 redistribution rounds.
    """
    if variant not in PI_VARIANTS:
        raise InvalidOption(f"variant must be one of {PI_VARIANTS}")
    net = cs.network
    n = net.n
    value = np.zeros(n)
    redistribute = np.zeros((n, n))  # [controlled node, shareholder] -> fraction
    controlled = np.zeros(n, dtype=bool)
    for j, jid in enumerate(net.ids):
        holders = shareholders_of(net, jid)
        if not holders or not cs.reaches(sum(w for _, w in holders), jid):
            continue
        if len(holders) > MAX_PLAYERS:
            raise TooManyPlayers(f"node {jid!r} has {len(holders)} shareholders")
        game = WeightedVotingGame(tuple(w for _, w in holders), cs.quota_of(jid), tuple(h for h, _ in holders), cs.strict)
        scores = np.array([float(s) for s in johnston_scores(game)])
        idx = [net.index(h) for h, _ in holders]
        value[idx] += scores
        controlled[j] = True
        if variant == "pi":
            redistribute[j, idx] = 1.0 / len(idx)
        else:
            redistribute[j, idx] = scores / scores.sum()
    total = value.sum()
    for _ in range(REDISTRIBUTION_DEPTH):
        moving = np.where(controlled, value, 0.0)
        if moving.sum() <= 1e-12 * max(total, 1.0):
            break
        value = np.where(controlled, 0.0, value) + moving @ redistribute
    residual = float(value[controlled].sum())
    if residual > 1e-9 * max(total, 1.0):
        raise CycleDepthExceeded(
            f"{residual:.3e} of power still circulates after {REDISTRIBUTION_DEPTH} rounds"
        )
    value[controlled] = 0.0
    if value.sum() > 0:
        value = value / value.sum()
    return PowerProfile(variant, net.ids, value, None, None, {"controlled": [net.ids[k] for k in np.flatnonzero(controlled)]})


def shareholder_game(cs: ControlStructure, target: str) -> WeightedVotingGame:
    """Voting game among the direct shareholders of ``target``."""
    holders = shareholders_of(cs.network, target)
    return WeightedVotingGame(tuple(w for _, w in holders), cs.quota_of(target), tuple(h for h, _ in holders), cs.strict)


def game_from_weights(weights: Sequence, quota, players: Sequence | None = None) -> WeightedVotingGame:
    return WeightedVotingGame(tuple(weights), quota, tuple(players) if players is not None else None)
