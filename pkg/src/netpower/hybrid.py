"""Monte Carlo hybrid estimators of pivotal power (NPI) and control flow (NPF).

Each iteration draws, for every node with shareholders, a uniformly random
order of those shareholders. Walking the order until the quota is reached
fixes who controls the node in that iteration, giving a control matrix ``Y``
with ``Y[i, j] > 0`` when i controls j. Value then propagates from controlled
nodes up to their controllers through ``(I - d Y)^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata, spearmanr

from . import kernels
from .errors import InvalidOption, MismatchedNodes, SingularDraw
from .graph import Network, ScoreVector, ownership_matrix

PIVOT_RULES = ("shapley-order", "johnston-split")
RULE_ALIASES = {"shapley": "shapley-order", "johnston": "johnston-split"}
BLOCK = 4096  # iterations per RNG substream; fixed so results never depend on batching
RESIDUAL_BOUND = 1e-10


@dataclass(frozen=True)
class SimulationConfig:
    iterations: int = 10_000
    damping: float = 0.5
    quota: float = 0.5
    seed: int = 0
    pivot_rule: str = "shapley-order"
    own_endowments: bool = True

    def __post_init__(self):
        rule = RULE_ALIASES.get(self.pivot_rule, self.pivot_rule)
        if rule not in PIVOT_RULES:
            raise InvalidOption(f"pivot rule must be one of {PIVOT_RULES}")
        object.__setattr__(self, "pivot_rule", rule)
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise InvalidOption("iterations must be a positive integer")
        if not 0 < self.damping < 1:
            raise InvalidOption("damping must lie in (0, 1)")
        if not 0 < self.quota <= 1:
            raise InvalidOption("quota must lie in (0, 1]")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidOption("seed must be a 64-bit unsigned integer")

    @property
    def johnston(self) -> bool:
        return self.pivot_rule == "johnston-split"


@dataclass(frozen=True, eq=False)
class _Slots:
    """Shareholder slots grouped by the node they hold, CSR style."""

    ptr: np.ndarray
    holders: np.ndarray
    weights: np.ndarray
    targets: np.ndarray

    @classmethod
    def of(cls, net: Network) -> "_Slots":
        S = ownership_matrix(net)
        ptr = [0]
        holders, weights, targets = [], [], []
        for j in range(net.n):
            for i in np.flatnonzero(S[:, j]):
                holders.append(i)
                weights.append(S[i, j])
                targets.append(j)
            ptr.append(len(holders))
        return cls(
            np.asarray(ptr, dtype=np.int64),
            np.asarray(holders, dtype=np.int64),
            np.asarray(weights, dtype=float),
            np.asarray(targets, dtype=np.int64),
        )


@dataclass(frozen=True, eq=False)
class IterationDraw:
    Y: np.ndarray
    pivots: dict  # node id -> {holder id: weight}


def _keys(cfg: SimulationConfig, block: int, rows: int, slots: int) -> np.ndarray:
    rng = np.random.default_rng([int(cfg.seed), block])
    return rng.random((rows, slots))


def _blocks(cfg: SimulationConfig):
    done, b = 0, 0
    while done < cfg.iterations:
        rows = min(BLOCK, cfg.iterations - done)
        yield b, rows
        done += rows
        b += 1


def draw_control_structure(net: Network, cfg: SimulationConfig, iteration: int = 0) -> IterationDraw:
    """The control matrix realized in one iteration of the simulation."""
    slots = _Slots.of(net)
    block, row = divmod(iteration, BLOCK)
    keys = _keys(cfg, block, row + 1, slots.holders.size)[row : row + 1]
    links = kernels.draw_links(keys, slots.ptr, slots.holders, slots.weights, cfg.quota, cfg.johnston)[0]
    Y = np.zeros((net.n, net.n))
    pivots: dict = {}
    for e in np.flatnonzero(links):
        i, j = slots.holders[e], slots.targets[e]
        Y[i, j] = links[e]
        pivots.setdefault(net.ids[j], {})[net.ids[i]] = float(links[e])
    return IterationDraw(Y, pivots)


@dataclass(frozen=True, eq=False)
class SimulationResult:
    scores: ScoreVector
    pivot_frequency: dict  # node id -> {holder id: mean control weight}
    worst_residual: float
    flow: np.ndarray | None = None  # p_hat[i, j]
    intermediary: ScoreVector | None = None
    config: SimulationConfig = field(default_factory=SimulationConfig)

    def top(self, kind: str | None = None, net: Network | None = None) -> str:
        """Highest-scoring node, optionally among nodes of one kind."""
        ids = self.scores.ranking()
        if kind is None:
            return ids[0]
        return next(i for i in ids if net.node(i).kind == kind)


def _chunk(n: int, rows: int) -> int:
    """Iterations per propagation call; bounds the batched n x n systems to ~32 MB."""
    return max(1, min(rows, (1 << 22) // max(1, n * n)))


def _simulate(net: Network, cfg: SimulationConfig, want_flow: bool) -> SimulationResult:
    slots = _Slots.of(net)
    v = np.ascontiguousarray(net.values, dtype=float)
    n = net.n
    acc_y = np.zeros(n)
    acc_inv = np.zeros((n, n))
    acc_links = np.zeros(slots.holders.size)
    worst = 0.0
    for b, rows in _blocks(cfg):
        keys = _keys(cfg, b, rows, slots.holders.size)
        links = kernels.draw_links(keys, slots.ptr, slots.holders, slots.weights, cfg.quota, cfg.johnston)
        step = _chunk(n, rows)
        for lo in range(0, rows, step):
            part = links[lo : lo + step]
            y, inv, r = kernels.propagate(part, slots.ptr, slots.holders, slots.targets, v, cfg.damping, want_flow)
            acc_y += y
            acc_inv += inv
            worst = max(worst, float(r))
        acc_links += links.sum(axis=0)
    if worst > RESIDUAL_BOUND * (1 + float(np.abs(v).max(initial=0.0))):
        raise SingularDraw(f"propagation residual {worst:.3e} exceeds bound")
    T = cfg.iterations
    y_hat = acc_y / T
    if not cfg.own_endowments:
        y_hat = y_hat - v
    freq: dict = {}
    for e in range(slots.holders.size):
        freq.setdefault(net.ids[slots.targets[e]], {})[net.ids[slots.holders[e]]] = float(acc_links[e] / T)
    params = {
        "iterations": T,
        "damping": cfg.damping,
        "quota": cfg.quota,
        "seed": int(cfg.seed),
        "pivot_rule": cfg.pivot_rule,
        "own_endowments": cfg.own_endowments,
    }
    sv = ScoreVector("npi", net.ids, y_hat, False, params)
    flow = inter = None
    if want_flow:
        flow = (acc_inv / T) * v[None, :]
        off = flow.copy()
        np.fill_diagonal(off, 0.0)
        inter = ScoreVector("npf", net.ids, off.sum(axis=1), False, params)
    return SimulationResult(sv, freq, worst, flow, inter, cfg)


def npi(net: Network, cfg: SimulationConfig) -> SimulationResult:
    """Pivotal power ``y_hat = mean_t (I - d Y_t)^-1 v`` with pivot frequencies."""
    return _simulate(net, cfg, want_flow=False)


def npf(net: Network, cfg: SimulationConfig) -> SimulationResult:
    """Expected value flow ``p_hat[i, j] = mean_t [(I - d Y_t)^-1]_ij v_j``.

    ``intermediary`` holds each node's flow toward others, ``sum_{j != i} p_hat[i, j]``.
    """
    return _simulate(net, cfg, want_flow=True)


def flow_bound(damping: float) -> float:
    """Upper bound on ``p_hat[i, j] / v_j`` for ``i != j``."""
    return damping / (1 - damping)


@dataclass(frozen=True)
class ProfileComparison:
    spearman: float | None
    top_k_overlap: float
    k: int
    rank_delta: dict  # node id -> rank in b minus rank in a (1 = top)


def compare_profiles(a: ScoreVector, b: ScoreVector, k: int = 3) -> ProfileComparison:
    """Rank agreement between two score vectors over the same nodes.

    ``spearman`` is ``None`` when either vector is constant.
    """
    if set(a.ids) != set(b.ids) or len(a.ids) != len(b.ids):
        raise MismatchedNodes("profiles cover different node sets")
    ids = sorted(a.ids)
    va = np.array([a[i] for i in ids])
    vb = np.array([b[i] for i in ids])
    rho = None
    if len(ids) > 1 and np.ptp(va) > 0 and np.ptp(vb) > 0:
        rho = float(spearmanr(va, vb).statistic)
    k = max(1, min(k, len(ids)))
    overlap = len(set(a.ranking()[:k]) & set(b.ranking()[:k])) / k
    ra, rb = rankdata(-va), rankdata(-vb)
    delta = {i: float(y - x) for i, x, y in zip(ids, ra, rb)}
    return ProfileComparison(rho, overlap, k, delta)
