"""Propagation measures: network control value, PageRank, Katz-type influence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import AttenuationTooLarge, DivergentPropagation, InvalidOption, NoConvergence
from .graph import Network, ScoreVector, adjacency_matrix, ownership_matrix
from .numerics import SolveOptions, solve_linear, spectral_radius

DIVERGENCE_MARGIN = 1e-9


@dataclass(frozen=True)
class PropagationOptions:
    damping: float = 0.85
    attenuation: float | None = None
    weighted: bool = False
    solve: SolveOptions = field(default_factory=SolveOptions)

    def __post_init__(self):
        if not 0 < self.damping < 1:
            raise InvalidOption("PageRank damping must lie in (0, 1)")
        if self.attenuation is not None and self.attenuation < 0:
            raise InvalidOption("attenuation must be >= 0")


DEFAULT = PropagationOptions()


def _ncv_from_matrix(C: np.ndarray, v: np.ndarray, opts: SolveOptions) -> np.ndarray:
    rho = spectral_radius(C)
    if rho >= 1 - DIVERGENCE_MARGIN:
        raise DivergentPropagation(f"spectral radius of the control matrix is {rho:.12g} >= 1")
    n = C.shape[0]
    return solve_linear(np.eye(n) - C, C @ v, opts)


def ncv(net: Network, opts: SolveOptions = SolveOptions()) -> ScoreVector:
    """Network control value: ``NCV = C v + C NCV`` solved as ``(I - C)^-1 C v``.

    ``C`` is the ownership matrix (share of j held by i) and ``v`` the node
    values.
    """
    C = ownership_matrix(net)
    v = net.values
    x = _ncv_from_matrix(C, v, opts)
    resid = float(np.abs(x - C @ v - C @ x).max(initial=0.0))
    return ScoreVector("ncv", net.ids, x, False, {"residual": resid})


def strongly_connected(C: np.ndarray) -> np.ndarray:
    """Component label per node for the directed support of ``C``."""
    _, labels = connected_components(csr_matrix(C != 0), directed=True, connection="strong")
    return labels


def nncv(net: Network, opts: SolveOptions = SolveOptions()) -> ScoreVector:
    """Net control value with value recycled through ownership cycles removed.

    The recycled part of a node inside a nontrivial strongly connected
    component is the control it gains only via edges internal to such a
    component; it is measured against the NCV of the network with those edges
    deleted. Nodes outside cycles keep their NCV.
    """
    C = ownership_matrix(net)
    v = net.values
    full = _ncv_from_matrix(C, v, opts)
    labels = strongly_connected(C)
    sizes = np.bincount(labels)
    cyclic = sizes[labels] > 1
    internal = (labels[:, None] == labels[None, :]) & cyclic[:, None]
    C_acyclic = np.where(internal, 0.0, C)
    stripped = _ncv_from_matrix(C_acyclic, v, opts)
    # removing edges can only lower NCV; clamp rounding noise
    recycled = np.where(cyclic, np.maximum(full - stripped, 0.0), 0.0)
    return ScoreVector(
        "nncv",
        net.ids,
        full - recycled,
        False,
        {"recycled": dict(zip(net.ids, map(float, recycled))), "cycle_members": [i for i, c in zip(net.ids, cyclic) if c]},
    )


def pagerank(net: Network, opts: PropagationOptions = DEFAULT) -> ScoreVector:
    """Unnormalized PageRank, ``PR_i = (1 - a) + a sum_{j -> i} PR_j / Out_j``.

    Scores average to one. Nodes without out-links spread their score
    uniformly over all nodes. With ``weighted`` set, ``Out_j`` is replaced by
    the out-weight of j and each link carries its share of it.
    """
    a = opts.damping
    A = adjacency_matrix(net, weighted=opts.weighted)
    n = net.n
    out = A.sum(axis=1)
    P = np.where(out[:, None] > 0, A / np.where(out > 0, out, 1.0)[:, None], 1.0 / n)
    M = np.eye(n) - a * P.T
    b = np.full(n, 1.0 - a)
    x = solve_linear(M, b, opts.solve)
    resid = float(np.abs(x - (1 - a) - a * P.T @ x).max())
    if resid > opts.solve.tolerance:
        raise NoConvergence(f"PageRank fixed-point residual {resid:.3e}")
    return ScoreVector("pagerank", net.ids, x, False, {"damping": a, "residual": resid, "weighted": opts.weighted})


@dataclass(frozen=True, eq=False)
class KatzResult:
    T: np.ndarray
    scores: ScoreVector
    attenuation: float
    spectral_radius: float


def default_attenuation(rho: float) -> float:
    """0.9 of the convergence bound, capped at 1 (full transitivity)."""
    return 1.0 if rho <= 0.9 else 0.9 / rho


def katz_from_matrix(A: np.ndarray, alpha: float, opts: SolveOptions = SolveOptions()) -> tuple[np.ndarray, float]:
    rho = spectral_radius(A)
    if alpha * rho >= 1 - DIVERGENCE_MARGIN:
        raise AttenuationTooLarge(f"attenuation {alpha!r} needs to be below 1/rho = {1 / rho if rho else np.inf:.12g}")
    if alpha == 0:
        return A.copy(), rho
    n = A.shape[0]
    # T = A (I - aA)^-1  <=>  (I - aA)^T T^T = A^T
    T = solve_linear((np.eye(n) - alpha * A).T, A.T, opts).T
    return T, rho


def katz_influence(net: Network, opts: PropagationOptions = DEFAULT) -> KatzResult:
    """Cumulative influence ``T = sum_l a^(l-1) A^l = A (I - aA)^-1``.

    Row sums of ``T`` are the node scores. ``attenuation=None`` uses
    :func:`default_attenuation`.
    """
    A = adjacency_matrix(net)
    rho = spectral_radius(A)
    alpha = opts.attenuation if opts.attenuation is not None else default_attenuation(rho)
    T, rho = katz_from_matrix(A, alpha, opts.solve)
    sv = ScoreVector("katz", net.ids, T.sum(axis=1), False, {"attenuation": alpha, "spectral_radius": rho})
    return KatzResult(T, sv, alpha, rho)


def integrated_ownership(net: Network, opts: SolveOptions = SolveOptions()) -> np.ndarray:
    """Direct plus indirect holdings through every chain, ``S (I - S)^-1``."""
    S = ownership_matrix(net)
    return katz_from_matrix(S, 1.0, opts)[0]


@dataclass(frozen=True)
class ControllerReadout:
    controllers: dict  # firm id -> person id or None
    stakes: dict  # firm id -> cumulative stake of the controller (or best candidate)
    attenuation: float


def alpha_icon_controllers(
    net: Network, opts: PropagationOptions = DEFAULT, control_threshold: float = 0.0
) -> ControllerReadout:
    """Controller of each firm from cumulative stakes on the ownership matrix.

    The controller of firm j is the person i with the largest ``T[i, j]``
    (lowest id on ties), provided that stake is positive and at least
    ``control_threshold``; otherwise the firm is unresolved (``None``).
    """
    S = ownership_matrix(net)
    rho = spectral_radius(S)
    alpha = opts.attenuation if opts.attenuation is not None else default_attenuation(rho)
    T, _ = katz_from_matrix(S, alpha, opts.solve)
    persons = np.array([k == "person" for k in net.kinds])
    controllers, stakes = {}, {}
    for j, jid in enumerate(net.ids):
        if net.kinds[j] != "firm":
            continue
        col = np.where(persons, T[:, j], -np.inf)
        if not persons.any():
            controllers[jid], stakes[jid] = None, 0.0
            continue
        i = int(np.argmax(col))  # first maximum = lowest id
        stake = float(col[i])
        ok = stake > 0 and stake >= control_threshold - 1e-12
        controllers[jid] = net.ids[i] if ok else None
        stakes[jid] = stake
    return ControllerReadout(controllers, stakes, alpha)
