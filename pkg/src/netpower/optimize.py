"""Minimum-cost acquisition of indirect control.

A buyer must control every target j, meaning the shares it holds in j, either
bought directly (``z_j``) or held by nodes it already controls, reach the
threshold ``alpha_j``. Non-targets may be brought under control (``x_j = 1``)
when that is cheaper than buying the targets outright. Once ``x`` is fixed the
cheapest purchases are closed-form, so the exact optimum is found by a
branch-and-bound over ``x``.

Variants:

* ``ic``: every controlled node passes on all its shares.
* ``ic2``: shares held by targets do not count toward controlling non-targets.
* ``ic3``: as ``ic2``, and a node's stake in j is ignored when j holds shares in
  it (reciprocal cross-holdings do not justify each other).
* ``ccp``: nodes are certified one at a time; a node's threshold may only be met
  by purchases and by stakes of nodes certified before it, so control cannot
  be justified around a cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import Infeasible, InvalidOption, SharesUnavailable, TooLarge, UnknownNode
from .graph import Network, ownership_matrix, shareholders_of

VARIANTS = ("ic", "ic2", "ic3", "ccp")
MAX_FREE = 24
MAX_CCP_NODES = 20
COST_TIE = 1e-12
CAP_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class AcquisitionProblem:
    network: Network
    targets: tuple
    thresholds: Mapping[str, float] | float = 0.5
    prices: Mapping[str, float] | float = 1.0
    variant: str = "ic"

    def __post_init__(self):
        net = self.network
        ownership_matrix(net)  # raises NotOwnershipNetwork
        targets = tuple(sorted(set(self.targets)))
        if not targets:
            raise InvalidOption("at least one target is required")
        for t in targets:
            net.index(t)
        variant = self.variant.lower()
        if variant not in VARIANTS:
            raise InvalidOption(f"variant must be one of {VARIANTS}")
        alpha = self._per_node(self.thresholds, "threshold")
        price = self._per_node(self.prices, "price")
        if np.any((alpha <= 0) | (alpha > 1)):
            raise InvalidOption("thresholds must lie in (0, 1]")
        if np.any(price <= 0):
            raise InvalidOption("prices must be positive")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "_alpha", alpha)
        object.__setattr__(self, "_price", price)

    def _per_node(self, spec, what) -> np.ndarray:
        net = self.network
        if isinstance(spec, Mapping):
            for k in spec:
                if k not in net:
                    raise UnknownNode(f"{what} given for unknown node {k!r}")
            missing = [i for i in net.ids if i not in spec]
            if missing:
                raise InvalidOption(f"{what} missing for {missing[0]!r}")
            return np.array([float(spec[i]) for i in net.ids])
        return np.full(net.n, float(spec))

    @property
    def alpha(self) -> np.ndarray:
        return self._alpha

    @property
    def price(self) -> np.ndarray:
        return self._price

    @property
    def free_nodes(self) -> tuple:
        """Non-targets, the domain of ``x``, in id order."""
        return tuple(i for i in self.network.ids if i not in self.targets)

    def with_variant(self, variant: str) -> "AcquisitionProblem":
        return AcquisitionProblem(self.network, self.targets, self.thresholds, self.prices, variant)


@dataclass(frozen=True)
class AcquisitionPlan:
    purchases: dict  # node id -> z_j
    controlled: dict  # node id -> bool (targets always True)
    total_cost: float
    variant: str
    order: tuple = ()  # certification order, ccp only
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def x(self) -> dict:
        return {k: v for k, v in self.controlled.items()}


def counted_shares(prob: AcquisitionProblem) -> np.ndarray:
    """``W[i, j]``: share of j that counts when i is controlled, per variant."""
    S = ownership_matrix(prob.network)
    W = S.copy()
    if prob.variant in ("ic2", "ic3"):
        is_t = np.array([i in prob.targets for i in prob.network.ids])
        W[np.ix_(is_t, ~is_t)] = 0.0
    if prob.variant == "ic3":
        W[S.T > 0] = 0.0
    return W


def variant_constraints(prob: AcquisitionProblem, variant: str | None = None) -> dict:
    """Readable description of the constraint set in force for ``variant``."""
    v = (variant or prob.variant).lower()
    if v not in VARIANTS:
        raise InvalidOption(f"variant must be one of {VARIANTS}")
    p = prob.with_variant(v)
    rows = []
    if v == "ccp":
        W = ownership_matrix(p.network)
    else:
        W = counted_shares(p)
    ids = p.network.ids
    for j, jid in enumerate(ids):
        terms = [(ids[i], float(W[i, j])) for i in range(p.network.n) if W[i, j] > 0]
        rows.append(
            {
                "node": jid,
                "target": jid in p.targets,
                "alpha": float(p.alpha[j]),
                "counted_holders": terms,
                "free_float": float(free_float(p)[j]),
            }
        )
    rule = {
        "ic": "z_j + sum of shares of controlled holders >= alpha_j",
        "ic2": "as ic; holdings of targets do not count toward non-targets",
        "ic3": "as ic2; a holder that j itself owns shares in does not count toward j",
        "ccp": "as ic, counting only holders certified before j in an acyclic order",
    }[v]
    return {"variant": v, "rule": rule, "constraints": rows}


def free_float(prob: AcquisitionProblem) -> np.ndarray:
    S = ownership_matrix(prob.network)
    return np.maximum(0.0, 1.0 - S.sum(axis=0))


def _is_target_mask(prob) -> np.ndarray:
    return np.array([i in prob.targets for i in prob.network.ids])


def _plan_from_z(prob, z: np.ndarray, on: np.ndarray, order=(), **stats) -> AcquisitionPlan:
    ids = prob.network.ids
    z = np.where(on, z, 0.0)
    cost = float(np.dot(prob.price, z))
    return AcquisitionPlan(
        {i: float(v) for i, v in zip(ids, z)},
        {i: bool(b) for i, b in zip(ids, on)},
        cost,
        prob.variant,
        tuple(order),
        stats,
    )


def _x_vector(prob, x) -> np.ndarray:
    free = prob.free_nodes
    if isinstance(x, Mapping):
        for k in x:
            if k not in free:
                raise InvalidOption(f"x is defined on non-targets only; got {k!r}")
        return np.array([bool(x.get(i, False)) for i in free])
    arr = np.asarray(x, dtype=bool).ravel()
    if arr.shape != (len(free),):
        raise InvalidOption(f"x needs {len(free)} entries, one per non-target")
    return arr


def _on_mask(prob, xv: np.ndarray) -> np.ndarray:
    on = _is_target_mask(prob).copy()
    idx = [prob.network.index(i) for i in prob.free_nodes]
    on[idx] = xv
    return on


def _ic_purchases(prob, W, on):
    inherited = W.T @ on.astype(float)
    return np.where(on, np.maximum(0.0, prob.alpha - inherited), 0.0)


def evaluate_plan(prob: AcquisitionProblem, x) -> AcquisitionPlan:
    """Cheapest purchases for a fixed control set ``x`` over the non-targets.

    Raises:
        SharesUnavailable: some controlled node needs more than its free float.
    """
    xv = _x_vector(prob, x)
    on = _on_mask(prob, xv)
    cap = free_float(prob)
    if prob.variant == "ccp":
        return _ccp_plan_for_set(prob, on, cap)
    z = _ic_purchases(prob, counted_shares(prob), on)
    short = np.flatnonzero(z > cap + CAP_SLACK)
    if short.size:
        j = short[0]
        raise SharesUnavailable(
            f"{prob.network.ids[j]!r} needs {z[j]!r} but only {cap[j]!r} is free"
        )
    return _plan_from_z(prob, z, on)


# ---------------------------------------------------------------------------
# ic / ic2 / ic3: branch-and-bound over x


def _relevant(prob, S: np.ndarray) -> np.ndarray:
    """Nodes with a directed ownership path into some target (targets included)."""
    n = prob.network.n
    rel = _is_target_mask(prob).copy()
    frontier = list(np.flatnonzero(rel))
    while frontier:
        j = frontier.pop()
        for i in np.flatnonzero(S[:, j] > 0):
            if not rel[i]:
                rel[i] = True
                frontier.append(i)
    return rel[:n]


def _branch_and_bound(prob) -> AcquisitionPlan:
    net = prob.network
    S = ownership_matrix(net)
    W = counted_shares(prob)
    cap = free_float(prob)
    alpha, price = prob.alpha, prob.price
    is_t = _is_target_mask(prob)
    rel = _relevant(prob, S)
    free_idx = np.array([net.index(i) for i in prob.free_nodes], dtype=np.int64)
    branch = [k for k, i in enumerate(free_idx) if rel[i]]

    base = W[is_t].sum(axis=0)  # targets are always controlled
    upper0 = base + W[free_idx[branch]].sum(axis=0) if branch else base.copy()

    best_cost = np.inf
    best_x = None
    nodes = 0

    def lower_bound(on, upper):
        need = np.maximum(0.0, alpha - upper)
        if np.any(on & (need > cap + CAP_SLACK)):
            return np.inf
        return float(np.dot(price[on], need[on]))

    xv = np.zeros(len(free_idx), dtype=bool)
    on = is_t.copy()

    def visit(depth, upper):
        nonlocal best_cost, best_x, nodes
        nodes += 1
        lb = lower_bound(on, upper)
        if lb >= best_cost - COST_TIE:
            return
        if depth == len(branch):
            # all fixed: ``upper`` is exact and the bound is the cost
            best_cost, best_x = lb, xv.copy()
            return
        k = branch[depth]
        i = free_idx[k]
        # x_i = 0 first (lexicographic tie rule)
        visit(depth + 1, upper - W[i])
        xv[k] = True
        on[i] = True
        visit(depth + 1, upper)
        xv[k] = False
        on[i] = False

    visit(0, upper0)
    if best_x is None:
        raise Infeasible("no control set meets every target threshold with the shares available")
    plan = evaluate_plan(prob, best_x)
    return AcquisitionPlan(
        plan.purchases, plan.controlled, plan.total_cost, plan.variant, (), {"nodes_explored": nodes}
    )


# ---------------------------------------------------------------------------
# ccp: subset DP over certification orders


def _ccp_tables(prob, members: np.ndarray):
    S = ownership_matrix(prob.network)
    sub = np.ascontiguousarray(S[np.ix_(members, members)])
    return (
        sub,
        np.ascontiguousarray(prob.alpha[members]),
        np.ascontiguousarray(prob.price[members]),
        np.ascontiguousarray(free_float(prob)[members]),
    )


def _ccp_order(best, sub, need, price, cap, mask) -> list[int]:
    order = []
    while mask:
        found = False
        for j in range(sub.shape[0]):
            bit = 1 << j
            if not mask & bit:
                continue
            prev = mask ^ bit
            if not np.isfinite(best[prev]):
                continue
            held = sum(sub[i, j] for i in range(sub.shape[0]) if prev >> i & 1)
            z = max(0.0, need[j] - held)
            if z > cap[j] + CAP_SLACK:
                continue
            if abs(best[prev] + price[j] * z - best[mask]) <= COST_TIE * max(1.0, abs(best[mask])):
                order.append(j)
                mask = prev
                found = True
                break
        if not found:  # pragma: no cover - DP table is self-consistent
            raise RuntimeError("certification order reconstruction failed")
    return order[::-1]


def _ccp_plan_from_order(prob, members, order_local, sub, need, cap) -> AcquisitionPlan:
    n = prob.network.n
    z = np.zeros(n)
    on = np.zeros(n, dtype=bool)
    done = []
    for j in order_local:
        held = sum(sub[i, j] for i in done)
        z[members[j]] = max(0.0, need[j] - held)
        on[members[j]] = True
        done.append(j)
    ids = prob.network.ids
    return _plan_from_z(prob, z, on, order=[ids[members[j]] for j in order_local])


def _ccp_plan_for_set(prob, on: np.ndarray, cap_all) -> AcquisitionPlan:
    members = np.flatnonzero(on)
    if members.size > MAX_CCP_NODES:
        raise TooLarge(f"certification search is limited to {MAX_CCP_NODES} controlled nodes")
    sub, need, price, cap = _ccp_tables(prob, members)
    full = (1 << members.size) - 1
    best = kernels.certification_dp(sub, need, price, cap, np.int64(full))
    if not np.isfinite(best[full]):
        raise SharesUnavailable("no certification order fits within the free floats")
    order = _ccp_order(best, sub, need, price, cap, full)
    return _ccp_plan_from_order(prob, members, order, sub, need, cap)


def _ccp_solve(prob) -> AcquisitionPlan:
    net = prob.network
    S = ownership_matrix(net)
    rel = _relevant(prob, S)
    members = np.flatnonzero(rel)
    if members.size > MAX_CCP_NODES:
        raise TooLarge(f"certification search is limited to {MAX_CCP_NODES} relevant nodes, got {members.size}")
    sub, need, price, cap = _ccp_tables(prob, members)
    m = members.size
    all_bits = np.int64((1 << m) - 1)
    best = kernels.certification_dp(sub, need, price, cap, all_bits)
    is_t = _is_target_mask(prob)[members]
    t_bits = int(sum(1 << j for j in range(m) if is_t[j]))
    free_local = [j for j in range(m) if not is_t[j]]  # ascending id order

    # enumerate candidate sets in lexicographic order of x (first free node most significant)
    best_cost, best_mask = np.inf, None
    k = len(free_local)
    for code in range(1 << k):
        mask = t_bits
        for r, j in enumerate(free_local):
            if code >> (k - 1 - r) & 1:
                mask |= 1 << j
        c = best[mask]
        if c < best_cost - COST_TIE:
            best_cost, best_mask = c, mask
    if best_mask is None:
        raise Infeasible("no certification order meets every target threshold")
    order = _ccp_order(best, sub, need, price, cap, best_mask)
    plan = _ccp_plan_from_order(prob, members, order, sub, need, cap)
    return AcquisitionPlan(
        plan.purchases, plan.controlled, plan.total_cost, plan.variant, plan.order, {"sets_scanned": 1 << k}
    )


def solve_min_cost_control(prob: AcquisitionProblem) -> AcquisitionPlan:
    """Globally cheapest plan; cost ties within 1e-12 go to the smallest ``x``."""
    if len(prob.free_nodes) > MAX_FREE:
        raise TooLarge(f"exact search is limited to {MAX_FREE} non-targets")
    if prob.variant == "ccp":
        return _ccp_solve(prob)
    return _branch_and_bound(prob)


# ---------------------------------------------------------------------------
# independent checks


def enumerate_min_cost(prob: AcquisitionProblem) -> AcquisitionPlan:
    """Exhaustive search over every ``x`` (ic, ic2, ic3); for cross-checking."""
    if prob.variant == "ccp":
        raise InvalidOption("exhaustive enumeration covers ic, ic2 and ic3")
    free = prob.free_nodes
    m = len(free)
    if m > MAX_FREE:
        raise TooLarge(f"enumeration is limited to {MAX_FREE} non-targets")
    W = counted_shares(prob)
    cap = free_float(prob)
    codes = np.arange(1 << m, dtype=np.int64)
    X = ((codes[:, None] >> np.arange(m - 1, -1, -1)) & 1).astype(bool)  # row order = lex order
    on = np.tile(_is_target_mask(prob), (1 << m, 1))
    idx = [prob.network.index(i) for i in free]
    on[:, idx] = X
    inherited = on.astype(float) @ W
    z = np.where(on, np.maximum(0.0, prob.alpha - inherited), 0.0)
    feasible = ~np.any(z > cap + CAP_SLACK, axis=1)
    cost = np.where(feasible, z @ prob.price, np.inf)
    best, pick = np.inf, None
    for r in range(cost.shape[0]):
        if cost[r] < best - COST_TIE:
            best, pick = cost[r], r
    if pick is None:
        raise Infeasible("no control set meets every target threshold with the shares available")
    return evaluate_plan(prob, X[pick])


def check_plan(prob: AcquisitionProblem, plan: AcquisitionPlan, tol: float = 1e-9) -> list[str]:
    """Re-check a plan against the constraints, edge by edge; returns violations."""
    net = prob.network
    problems = []
    alpha = dict(zip(net.ids, prob.alpha))
    price = dict(zip(net.ids, prob.price))
    targets = set(prob.targets)
    holders = {j: shareholders_of(net, j) for j in net.ids}
    owns = {(h, j) for j in net.ids for h, _ in holders[j]}

    def counted(h, j):
        if prob.variant in ("ic2", "ic3") and h in targets and j not in targets:
            return False
        if prob.variant == "ic3" and (j, h) in owns:
            return False
        return True

    for t in targets:
        if not plan.controlled.get(t):
            problems.append(f"target {t} not controlled")
    total = 0.0
    for j in net.ids:
        zj = plan.purchases.get(j, 0.0)
        total += price[j] * zj
        if zj < -tol:
            problems.append(f"{j}: negative purchase {zj}")
        free = 1.0 - sum(w for _, w in holders[j])
        if zj > free + tol:
            problems.append(f"{j}: buys {zj} of a free float of {free}")
        if not plan.controlled.get(j) and zj > tol:
            problems.append(f"{j}: purchase on an uncontrolled node")
    if abs(total - plan.total_cost) > tol * max(1.0, abs(total)):
        problems.append(f"cost {plan.total_cost} differs from sum of purchases {total}")

    if prob.variant != "ccp":
        for j in net.ids:
            if not plan.controlled.get(j):
                continue
            held = sum(w for h, w in holders[j] if plan.controlled.get(h) and counted(h, j))
            if plan.purchases[j] + held < alpha[j] - tol:
                problems.append(f"{j}: holds {plan.purchases[j] + held} < {alpha[j]}")
        return problems

    # ccp: some order must certify every controlled node using earlier nodes only
    pending = {j for j in net.ids if plan.controlled.get(j)}
    certified: set = set()
    progress = True
    while pending and progress:
        progress = False
        for j in sorted(pending):
            held = sum(w for h, w in holders[j] if h in certified)
            if plan.purchases[j] + held >= alpha[j] - tol:
                certified.add(j)
                pending.discard(j)
                progress = True
    if pending:
        problems.append(f"no acyclic certification order for {sorted(pending)}")
    return problems


def as_problem(
    net: Network,
    targets: Sequence[str],
    thresholds=0.5,
    prices=1.0,
    variant: str = "ic",
) -> AcquisitionProblem:
    return AcquisitionProblem(net, tuple(targets), thresholds, prices, variant)
