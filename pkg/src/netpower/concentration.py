"""System-level concentration indices and ultimate-owner tracing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    CycleDetected,
    EmptyDistribution,
    InvalidDistribution,
    InvalidOption,
    KOutOfRange,
    NotOwnershipNetwork,
)
from .graph import Network, shareholders_of

SUM_TOLERANCE = 1e-9
UC_RULES = ("weakest-link", "product")


@dataclass(frozen=True)
class ShareDistribution:
    """Shares ``p_i >= 0`` summing to one, keyed by actor id."""

    shares: tuple
    ids: tuple = None

    def __post_init__(self):
        shares = tuple(self.shares)
        if not shares:
            raise EmptyDistribution("distribution has no actors")
        ids = tuple(self.ids) if self.ids is not None else tuple(str(k) for k in range(len(shares)))
        if len(ids) != len(shares):
            raise InvalidDistribution("one id per share required")
        if any(p < 0 for p in shares):
            raise InvalidDistribution("shares must be nonnegative")
        if abs(sum(shares) - 1) > SUM_TOLERANCE:
            raise InvalidDistribution(f"shares sum to {float(sum(shares))!r}, expected 1")
        object.__setattr__(self, "shares", shares)
        object.__setattr__(self, "ids", ids)

    @classmethod
    def from_amounts(cls, amounts: Sequence, ids: Sequence | None = None) -> "ShareDistribution":
        total = sum(amounts)
        if not amounts:
            raise EmptyDistribution("distribution has no actors")
        if total <= 0:
            raise InvalidDistribution("amounts must have a positive total")
        return cls(tuple(a / total for a in amounts), ids)

    @property
    def n(self) -> int:
        return len(self.shares)

    def ranked(self) -> list[tuple]:
        """``(id, share)`` in descending share order, ties by id."""
        return sorted(zip(self.ids, self.shares), key=lambda t: (-t[1], t[0]))


def _dist(d) -> ShareDistribution:
    return d if isinstance(d, ShareDistribution) else ShareDistribution(tuple(d))


def hhi(dist) -> float | Fraction:
    """Herfindahl-Hirschman index, ``sum p_i**2``.

    Exact rational inputs give an exact result. Float inputs are summed
    without intermediate rounding and rounded once at the end.
    """
    d = _dist(dist)
    if all(isinstance(p, (int, Fraction)) for p in d.shares):
        return sum(Fraction(p) ** 2 for p in d.shares)
    return float(sum(Fraction(float(p)) ** 2 for p in d.shares))


def top_k(dist, k: int) -> float:
    """Combined share of the ``k`` largest actors."""
    d = _dist(dist)
    if not 1 <= k <= d.n:
        raise KOutOfRange(f"k must lie in [1, {d.n}], got {k}")
    return math.fsum(p for _, p in d.ranked()[:k])


@dataclass(frozen=True)
class NetControlResult:
    percentage: float
    members: tuple


def nci(dist, H: float) -> NetControlResult:
    """Smallest top group whose cumulative share reaches ``H``.

    Returns the group's size as a percentage of all actors together with its
    members; an actor tying at the cut is included.
    """
    d = _dist(dist)
    if not 0 < H <= 1:
        raise InvalidOption("H must lie in (0, 1]")
    members = []
    acc = []
    for actor, p in d.ranked():
        members.append(actor)
        acc.append(p)
        if math.fsum(acc) >= H - SUM_TOLERANCE:
            break
    return NetControlResult(100.0 * len(members) / d.n, tuple(members))


@dataclass(frozen=True)
class UltimateControl:
    """Ultimate owner of every node, plus the chains followed.

    ``ties`` lists nodes where two shareholders held the same largest
    controlling stake; the lowest id was followed.
    """

    owners: Mapping[str, str]
    chains: Mapping[str, tuple]
    ties: frozenset

    def __getitem__(self, node_id: str) -> str:
        return self.owners[node_id]


def ultimate_control(net: Network, threshold: float = 0.20, rule: str = "weakest-link") -> UltimateControl:
    """Trace each node up its chain of largest controlling shareholders.

    A shareholder controls a node when its direct stake is at least
    ``threshold``. Under ``weakest-link`` every link of the chain must pass the
    threshold; under ``product`` the multiplied stakes along the chain must.
    The node where the walk stops is the ultimate owner (itself when it has
    no controller).

    Raises:
        CycleDetected: the chain of controllers loops back on itself.
    """
    if not net.ownership:
        raise NotOwnershipNetwork("ultimate control needs an ownership network")
    if not 0 < threshold < 1:
        raise InvalidOption("threshold must lie in (0, 1)")
    if rule not in UC_RULES:
        raise InvalidOption(f"rule must be one of {UC_RULES}")

    top: dict[str, tuple[str, float] | None] = {}
    ties = set()
    for j in net.ids:
        holders = shareholders_of(net, j)
        if not holders:
            top[j] = None
            continue
        best = max(w for _, w in holders)
        leaders = sorted(h for h, w in holders if w == best)
        if len(leaders) > 1:
            ties.add(j)
        top[j] = (leaders[0], best)

    owners, chains = {}, {}
    for j in net.ids:
        chain = [j]
        cum = 1.0
        cur = j
        while True:
            link = top[cur]
            if link is None:
                break
            holder, stake = link
            if rule == "weakest-link":
                if stake < threshold:
                    break
            else:
                if cum * stake < threshold:
                    break
                cum *= stake
            if holder in chain:
                loop = tuple(chain[chain.index(holder):])
                raise CycleDetected(f"controller cycle through {', '.join(loop)}", loop)
            chain.append(holder)
            cur = holder
        owners[j] = cur
        chains[j] = tuple(chain)
    return UltimateControl(owners, chains, frozenset(ties))


def distribution_from_shareholders(net: Network, target: str) -> ShareDistribution:
    """Shares of ``target`` held by its identified shareholders, rescaled to one."""
    held = shareholders_of(net, target)
    if not held:
        raise EmptyDistribution(f"{target!r} has no shareholders")
    return ShareDistribution.from_amounts([w for _, w in held], [h for h, _ in held])


def distribution_from_values(net: Network) -> ShareDistribution:
    """Node values rescaled to shares."""
    return ShareDistribution.from_amounts(list(net.values), list(net.ids))
