"""Shared numerical kernels with explicit tolerances."""

from __future__ import annotations

import heapq
import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .errors import (
    DisconnectedGraph,
    InvalidOption,
    NegativeEdgeLength,
    NoConvergence,
    SingularMatrix,
    ZeroMatrix,
)
from .graph import Network, adjacency_matrix

PIVOT_FLOOR = 1e-14


@dataclass(frozen=True)
class SolveOptions:
    tolerance: float = 1e-10
    max_iterations: int = 10_000

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InvalidOption("tolerance must be > 0")
        if self.max_iterations < 1:
            raise InvalidOption("max_iterations must be >= 1")


@dataclass(frozen=True)
class EigenResult:
    eigenvalue: float
    eigenvector: np.ndarray
    residual: float
    iterations: int


def solve_linear(M, b, opts: SolveOptions = SolveOptions()) -> np.ndarray:
    """Solve ``M x = b`` by LU with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides. One round of
    iterative refinement is applied when the first residual misses the bound
    ``tolerance * (1 + ||b||_inf)``.

    Raises:
        SingularMatrix: a pivot falls below 1e-14 (relative to ``||M||_inf``
            when that exceeds 1), or refinement cannot meet the residual bound.
    """
    M = np.asarray(M, dtype=float)
    b = np.asarray(b, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or b.shape[0] != M.shape[0]:
        raise InvalidOption(f"shape mismatch: M {M.shape}, b {b.shape}")
    if M.shape[0] == 0:
        return b.copy()
    scale = max(1.0, float(np.abs(M).sum(axis=1).max()))
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrix
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=True)
    if np.abs(np.diag(lu)).min() < PIVOT_FLOOR * scale:
        raise SingularMatrix("matrix is singular to working precision")
    x = scipy.linalg.lu_solve((lu, piv), b)
    bound = opts.tolerance * (1.0 + float(np.abs(b).max(initial=0.0)))
    r = b - M @ x
    if np.abs(r).max(initial=0.0) > bound:
        x = x + scipy.linalg.lu_solve((lu, piv), r)
        r = b - M @ x
        if np.abs(r).max(initial=0.0) > bound:
            raise SingularMatrix(
                f"residual {np.abs(r).max():.3e} exceeds {bound:.3e}; system is too ill-conditioned"
            )
    return x


def dominant_eigenpair(M, opts: SolveOptions = SolveOptions()) -> EigenResult:
    """Perron eigenpair of a nonnegative matrix by shifted power iteration.

    Iterates on ``M + I`` from the uniform start vector, which removes the
    oscillation of periodic (e.g. bipartite) matrices without changing the
    eigenvectors. Stops once ``||M x - lam x||_inf <= tolerance * ||M||_inf``.
    """
    M = np.asarray(M, dtype=float)
    if (M < 0).any():
        raise InvalidOption("dominant_eigenpair expects a nonnegative matrix")
    norm = float(np.abs(M).sum(axis=1).max(initial=0.0))
    if norm == 0.0:
        raise ZeroMatrix("matrix has no nonzero entries")
    n = M.shape[0]
    x = np.full(n, 1.0 / n)
    bound = opts.tolerance * norm
    resid = np.inf
    for it in range(1, opts.max_iterations + 1):
        Mx = M @ x
        lam = Mx.sum() / x.sum()
        resid = float(np.abs(Mx - lam * x).max())
        if resid <= bound and lam > 0:
            return EigenResult(float(lam), x, resid, it)
        y = Mx + x
        x = y / y.sum()
    raise NoConvergence(
        f"power iteration did not converge in {opts.max_iterations} steps (residual {resid:.3e})"
    )


def spectral_radius(M) -> float:
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvals(M)).max())


def _csr(adj: np.ndarray):
    n = adj.shape[0]
    rows, cols = np.nonzero(adj)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    return np.cumsum(indptr), cols.astype(np.int64)


def geodesics_from_matrix(W: np.ndarray, weighted: bool = False, rtol: float = 1e-12):
    """Distances and shortest-path counts for a dense weight matrix (0 = no arc)."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    if not weighted:
        indptr, indices = _csr(W != 0)
        return kernels.bfs_geodesics(indptr, indices, n)
    if (W < 0).any():
        raise NegativeEdgeLength("weighted geodesics need nonnegative edge lengths")
    dist = np.full((n, n), np.inf)
    sigma = np.zeros((n, n))
    nbrs = [np.flatnonzero(W[u]) for u in range(n)]
    for s in range(n):
        d = dist[s]
        sg = sigma[s]
        d[s] = 0.0
        sg[s] = 1.0
        done = np.zeros(n, dtype=bool)
        heap = [(0.0, s)]
        while heap:
            du, u = heapq.heappop(heap)
            if done[u] or du > d[u]:
                continue
            done[u] = True
            for v in nbrs[u]:
                alt = du + W[u, v]
                tol = rtol * max(1.0, abs(alt))
                if alt < d[v] - tol:
                    d[v] = alt
                    sg[v] = sg[u]
                    heapq.heappush(heap, (alt, v))
                elif abs(alt - d[v]) <= tol and not done[v]:
                    sg[v] += sg[u]
    return dist, sigma


def all_pairs_geodesics(net: Network, weighted: bool = False):
    """``(d, sigma)``: geodesic distances (inf when unreachable) and path counts."""
    return geodesics_from_matrix(adjacency_matrix(net), weighted=weighted)


@dataclass(frozen=True)
class FlowResult:
    value: float
    through: np.ndarray  # flow routed through each node, endpoints zero
    flow: np.ndarray  # net arc flow matrix


def max_flow_matrix(C: np.ndarray, s: int, t: int, eps: float = 1e-12) -> FlowResult:
    """Edmonds-Karp maximum flow on a dense capacity matrix."""
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    F = np.zeros((n, n))
    total = 0.0
    while True:
        parent = np.full(n, -1)
        parent[s] = s
        q = deque([s])
        while q and parent[t] < 0:
            u = q.popleft()
            resid = C[u] - F[u]
            for v in np.flatnonzero(resid > eps):
                if parent[v] < 0:
                    parent[v] = u
                    q.append(v)
        if parent[t] < 0:
            break
        push = np.inf
        v = t
        while v != s:
            u = parent[v]
            push = min(push, C[u, v] - F[u, v])
            v = u
        v = t
        while v != s:
            u = parent[v]
            F[u, v] += push
            F[v, u] -= push
            v = u
        total += push
    net_flow = np.maximum(F, 0.0)
    through = net_flow.sum(axis=0)
    through[s] = through[t] = 0.0
    return FlowResult(total, through, net_flow)


def max_flow(net: Network, source: str, sink: str) -> FlowResult:
    """Maximum ``source -> sink`` flow with edge weights as capacities.

    ``through[i]`` is the flow entering intermediate node i under the
    returned flow.
    """
    s, t = net.index(source), net.index(sink)
    if s == t:
        raise InvalidOption("source and sink must differ")
    return max_flow_matrix(adjacency_matrix(net), s, t)


def is_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    if n == 0:
        return True
    und = (adj != 0) | (adj.T != 0)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(und[u] & ~seen):
            seen[v] = True
            stack.append(v)
    return bool(seen.all())


def grounded_inverse(adj: np.ndarray, ground: int, opts: SolveOptions = SolveOptions()) -> np.ndarray:
    """Inverse of the Laplacian with row/column ``ground`` removed, re-embedded with zeros."""
    A = np.maximum(adj, adj.T)
    if not is_connected(A):
        raise DisconnectedGraph("the undirected view of the network is disconnected")
    n = A.shape[0]
    L = np.diag(A.sum(axis=1)) - A
    keep = np.array([k for k in range(n) if k != ground], dtype=int)
    out = np.zeros((n, n))
    if keep.size:
        red = L[np.ix_(keep, keep)]
        out[np.ix_(keep, keep)] = solve_linear(red, np.eye(keep.size), opts)
    return out


def grounded_laplacian_inverse(net: Network, grounded_node: str, weighted: bool = True) -> np.ndarray:
    """Grounded Laplacian inverse of the symmetrized network."""
    g = net.index(grounded_node)
    return grounded_inverse(adjacency_matrix(net, symmetrize=True, weighted=weighted), g)
