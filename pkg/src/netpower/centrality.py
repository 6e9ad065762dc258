"""Positional centrality measures: access, brokerage and efficiency families."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DisconnectedGraph, InvalidOption, SingletonNetwork, ZeroMatrix
from .graph import Network, ScoreVector, adjacency_matrix
from .numerics import (
    SolveOptions,
    dominant_eigenpair,
    geodesics_from_matrix,
    grounded_inverse,
    is_connected,
    max_flow_matrix,
    solve_linear,
)

DIRECTIONS = ("both", "out", "in")


@dataclass(frozen=True)
class CentralityOptions:
    normalized: bool = False
    weighted: bool = False
    direction: str = "both"
    per_component: bool = False
    solve: SolveOptions = field(default_factory=SolveOptions)

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise InvalidOption(f"direction must be one of {DIRECTIONS}")


DEFAULT = CentralityOptions()


def _adj(net: Network, opts: CentralityOptions, symmetrize: bool = False) -> np.ndarray:
    return adjacency_matrix(net, symmetrize=symmetrize, weighted=opts.weighted)


def _params(opts: CentralityOptions, **extra) -> dict:
    out = {"weighted": opts.weighted, "normalized": opts.normalized}
    out.update(extra)
    return out


def _pair_sum_divisor(net: Network) -> int:
    # geodesic-based pair sums run over unordered pairs on undirected graphs
    return 2 if not net.directed else 1


def degree_centrality(net: Network, opts: CentralityOptions = DEFAULT) -> ScoreVector:
    """Sum of incident tie strengths (or counts when unweighted).

    Directed graphs use out+in by default; ``direction`` picks one side. The
    normalized form divides by the largest attainable count, ``N - 1`` per side.
    """
    A = _adj(net, opts)
    if not net.directed:
        raw = A.sum(axis=1)
        sides = 1
    elif opts.direction == "out":
        raw, sides = A.sum(axis=1), 1
    elif opts.direction == "in":
        raw, sides = A.sum(axis=0), 1
    else:
        raw, sides = A.sum(axis=1) + A.sum(axis=0), 2
    if opts.normalized:
        if net.n < 2:
            raise SingletonNetwork("normalized degree needs at least two nodes")
        raw = raw / (sides * (net.n - 1))
    return ScoreVector("degree", net.ids, raw, opts.normalized, _params(opts, direction=opts.direction))


def _components(A: np.ndarray) -> list[np.ndarray]:
    n = A.shape[0]
    label = np.full(n, -1)
    comps = []
    for start in range(n):
        if label[start] >= 0:
            continue
        label[start] = len(comps)
        stack, members = [start], [start]
        while stack:
            u = stack.pop()
            for v in np.flatnonzero((A[u] != 0) & (label < 0)):
                label[v] = len(comps)
                stack.append(v)
                members.append(v)
        comps.append(np.array(sorted(members)))
    return comps


def eigenvector_centrality(net: Network, opts: CentralityOptions = DEFAULT) -> ScoreVector:
    """Perron eigenvector of the symmetrized adjacency, unit 1-norm.

    On disconnected graphs the dominant eigenvalue may be shared by several
    components. By convention the eigenvector is then supported on the
    component with the largest spectral radius, ties going to the component
    holding the lowest node id.
    """
    A = _adj(net, opts, symmetrize=True)
    if not A.any():
        raise ZeroMatrix("eigenvector centrality is undefined on an edgeless graph")
    best = None
    for comp in _components(A):
        sub = A[np.ix_(comp, comp)]
        rho = float(np.abs(np.linalg.eigvalsh(sub)).max())
        if rho > 0 and (best is None or rho > best[0] * (1 + 1e-12)):
            best = (rho, comp)
    comp = best[1]
    res = dominant_eigenpair(A[np.ix_(comp, comp)], opts.solve)
    x = np.zeros(net.n)
    x[comp] = res.eigenvector
    resid = float(np.abs(A @ x - res.eigenvalue * x).max())
    return ScoreVector(
        "eigenvector",
        net.ids,
        x,
        True,
        _params(opts, eigenvalue=res.eigenvalue, residual=resid, symmetrized=net.directed),
    )


def _distances(net: Network, opts: CentralityOptions) -> tuple[np.ndarray, np.ndarray]:
    return geodesics_from_matrix(_adj(net, opts), weighted=opts.weighted)


def closeness_centrality(net: Network, opts: CentralityOptions = DEFAULT) -> ScoreVector:
    """Reciprocal of total geodesic distance to the other nodes.

    With ``per_component`` set, only reachable nodes are summed and the
    normalization uses the size of the reachable set; isolated nodes score 0.
    """
    if net.n < 2:
        raise SingletonNetwork("closeness needs at least two nodes")
    d, _ = _distances(net, opts)
    off = ~np.eye(net.n, dtype=bool)
    reach = np.isfinite(d) & off
    if not opts.per_component and not reach[off].all():
        raise DisconnectedGraph("closeness is undefined on a disconnected network")
    total = np.where(reach, d, 0.0).sum(axis=1)
    count = reach.sum(axis=1)
    with np.errstate(divide="ignore"):
        score = np.where(total > 0, 1.0 / total, 0.0)
    if opts.normalized:
        score = score * count
    return ScoreVector("closeness", net.ids, score, opts.normalized, _params(opts, per_component=opts.per_component))


def betweenness_centrality(net: Network, opts: CentralityOptions = DEFAULT) -> ScoreVector:
    """Share of geodesics between other pairs that pass through each node.

    Unordered pairs on undirected graphs, ordered pairs on directed ones.
    Normalization divides by the number of such pairs.
    """
    n = net.n
    d, sigma = _distances(net, opts)
    score = np.zeros(n)
    tol = 1e-9
    finite = np.isfinite(d)
    for i in range(n):
        via = d[:, i][:, None] + d[i, :][None, :]
        with np.errstate(invalid="ignore"):
            on = finite & (np.abs(via - d) <= tol * np.maximum(1.0, d))
        on[i, :] = False
        on[:, i] = False
        np.fill_diagonal(on, False)
        frac = np.where(on, sigma[:, i][:, None] * sigma[i, :][None, :] / np.where(on, sigma, 1.0), 0.0)
        score[i] = frac.sum()
    score /= _pair_sum_divisor(net)
    if opts.normalized and n > 2:
        pairs = (n - 1) * (n - 2) / _pair_sum_divisor(net)
        score = score / pairs
    return ScoreVector("betweenness", net.ids, score, opts.normalized, _params(opts))


def flow_betweenness(net: Network, opts: CentralityOptions = DEFAULT) -> ScoreVector:
    """Maximum flow between other pairs that has to pass through each node.

    ``m_jk(i)`` is the drop in the maximum j -> k flow when i is removed, so
    the score does not depend on which of several maximum flows a solver
    happens to return. Capacities are edge weights (or 1 when unweighted).
    The normalized form divides by the total maximum flow over pairs that
    exclude the node.
    """
    C = _adj(net, opts)
    n = net.n
    through = np.zeros(n)
    pair_flow = np.zeros((n, n))
    for j in range(n):
        for k in range(n):
            if j == k or (not net.directed and k < j):
                continue
            res = max_flow_matrix(C, j, k)
            pair_flow[j, k] = res.value
            # a node the returned flow avoids cannot be indispensable
            for i in np.flatnonzero(res.through > 0):
                cut = C.copy()
                cut[i, :] = 0.0
                cut[:, i] = 0.0
                through[i] += res.value - max_flow_matrix(cut, j, k).value
    score = through
    if opts.normalized:
        total = pair_flow.sum()
        excl = np.array([total - pair_flow[i, :].sum() - pair_flow[:, i].sum() for i in range(n)])
        with np.errstate(invalid="ignore", divide="ignore"):
            score = np.where(excl > 0, through / excl, 0.0)
    return ScoreVector("flow_betweenness", net.ids, score, opts.normalized, _params(opts))


def walk_betweenness(net: Network, opts: CentralityOptions = DEFAULT) -> ScoreVector:
    """Current-flow betweenness from the grounded Laplacian inverse.

    For every unordered pair (s, t) not containing i, a unit current is sent
    from s to t; the node's share is half the absolute current on its incident
    edges. Directed inputs are symmetrized.
    """
    A = _adj(net, opts, symmetrize=True)
    if not is_connected(A):
        raise DisconnectedGraph("walk betweenness needs a connected network")
    V = grounded_inverse(A, net.n - 1, opts.solve) if net.n > 1 else np.zeros((1, 1))
    score = kernels.walk_betweenness(A, V)
    if opts.normalized and net.n > 2:
        score = score / ((net.n - 1) * (net.n - 2) / 2)
    return ScoreVector("walk_betweenness", net.ids, score, opts.normalized, _params(opts, symmetrized=net.directed))


def information_centrality(net: Network, opts: CentralityOptions = DEFAULT) -> ScoreVector:
    """Information centrality from the inverse of ``X``.

    ``x_ij = 1 - a_ij`` off the diagonal and ``x_ii = 1 + sum_j a_ij``. The
    score is the reciprocal mean effective resistance
    ``(b_ii + b_jj - 2 b_ij)`` over all j, where the j = i term is zero.
    """
    A = _adj(net, opts, symmetrize=True)
    if not is_connected(A):
        raise DisconnectedGraph("information centrality needs a connected network")
    n = net.n
    if n < 2:
        raise SingletonNetwork("information centrality needs at least two nodes")
    X = 1.0 - A
    np.fill_diagonal(X, 1.0 + A.sum(axis=1))
    B = solve_linear(X, np.eye(n), opts.solve)
    diag = np.diag(B)
    resist = diag[:, None] + diag[None, :] - 2 * B
    score = 1.0 / (resist.sum(axis=1) / n)
    if opts.normalized:
        score = score / score.sum()
    return ScoreVector("information", net.ids, score, opts.normalized, _params(opts, symmetrized=net.directed))


def eccentricity_centrality(net: Network, opts: CentralityOptions = DEFAULT) -> ScoreVector:
    """Reciprocal of the longest geodesic from each node.

    With ``per_component`` set, only reachable nodes count and a node that
    reaches nobody scores 0.
    """
    if net.n < 2:
        raise SingletonNetwork("eccentricity needs at least two nodes")
    d, _ = _distances(net, opts)
    finite = np.isfinite(d)
    if not opts.per_component and not finite.all():
        raise DisconnectedGraph("eccentricity is undefined on a disconnected network")
    far = np.where(finite, d, 0.0).max(axis=1)
    with np.errstate(divide="ignore"):
        score = np.where(far > 0, 1.0 / far, 0.0)
    return ScoreVector("eccentricity", net.ids, score, True, _params(opts, per_component=opts.per_component))


MEASURES = {
    "degree": degree_centrality,
    "eigenvector": eigenvector_centrality,
    "closeness": closeness_centrality,
    "betweenness": betweenness_centrality,
    "flow-betweenness": flow_betweenness,
    "walk-betweenness": walk_betweenness,
    "information": information_centrality,
    "eccentricity": eccentricity_centrality,
}
