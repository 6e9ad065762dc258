"""Immutable weighted directed network shared by every measure.

Nodes are stored sorted by id, so positional indices (rows and columns of
every matrix view) are deterministic regardless of input order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateEdge,
    DuplicateNode,
    EmptyNetwork,
    InvalidWeight,
    NegativeWeight,
    NotOwnershipNetwork,
    OwnershipOverflow,
    SelfLoopInOwnership,
    UnknownEndpoint,
    UnknownNode,
)

OWNERSHIP_TOLERANCE = 1e-9
NODE_KINDS = ("firm", "person")


@dataclass(frozen=True)
class NodeRecord:
    id: str
    kind: str = "firm"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise ValueError(f"node {self.id!r}: kind must be one of {NODE_KINDS}, got {self.kind!r}")
        if not math.isfinite(self.value) or self.value < 0:
            raise NegativeWeight(f"node {self.id!r}: value must be finite and >= 0, got {self.value!r}")


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    weight: float


@dataclass(frozen=True, eq=False)
class Network:
    """Validated graph. Build it with :func:`build_network`.

    Attributes:
        nodes: node records sorted by id.
        edges: edges sorted by (source, target).
        directed: when False every edge is mirrored in matrix views.
        ownership: edge weights are equity fractions ``s_ij`` (share of j held by i).
    """

    nodes: tuple[NodeRecord, ...]
    edges: tuple[Edge, ...]
    directed: bool = True
    ownership: bool = False
    _index: Mapping[str, int] = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(nd.id for nd in self.nodes)

    @property
    def values(self) -> np.ndarray:
        return np.array([nd.value for nd in self.nodes], dtype=float)

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple(nd.kind for nd in self.nodes)

    def index(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node {node_id!r}") from None

    def node(self, node_id: str) -> NodeRecord:
        return self.nodes[self.index(node_id)]

    def __contains__(self, node_id: object) -> bool:
        return node_id in self._index

    def __repr__(self) -> str:
        mode = "ownership" if self.ownership else ("directed" if self.directed else "undirected")
        return f"Network(n={self.n}, edges={len(self.edges)}, {mode})"


def _as_node(item: Any) -> NodeRecord:
    if isinstance(item, NodeRecord):
        return item
    if isinstance(item, str):
        return NodeRecord(item)
    if isinstance(item, Mapping):
        return NodeRecord(str(item["id"]), item.get("kind", "firm"), float(item.get("value", 0.0)))
    fields = tuple(item)
    if len(fields) == 1:
        return NodeRecord(str(fields[0]))
    if len(fields) == 2:
        return NodeRecord(str(fields[0]), fields[1])
    return NodeRecord(str(fields[0]), fields[1], float(fields[2]))


def build_network(
    nodes: Iterable[Any],
    edges: Iterable[Any] = (),
    ownership: bool = False,
    directed: bool = True,
) -> Network:
    """Validate nodes and edges and freeze them into a :class:`Network`.

    ``nodes`` accepts :class:`NodeRecord` objects, bare ids, ``(id, kind, value)``
    tuples or mappings. ``edges`` accepts ``(source, target, weight)`` triples or
    :class:`Edge` objects. Ownership networks are always directed.
    """
    records = [_as_node(item) for item in nodes]
    if not records:
        raise EmptyNetwork("a network needs at least one node")
    index: dict[str, int] = {}
    for rec in records:
        if rec.id in index:
            raise DuplicateNode(f"duplicate node id {rec.id!r}")
        index[rec.id] = -1
    records.sort(key=lambda r: r.id)
    index = {rec.id: i for i, rec in enumerate(records)}
    if ownership:
        directed = True

    seen: set[tuple[str, str]] = set()
    out: list[Edge] = []
    incoming = np.zeros(len(records))
    for item in edges:
        if isinstance(item, Edge):
            s, t, w = item.source, item.target, item.weight
        else:
            s, t, w = item
        s, t = str(s), str(t)
        w = float(w)
        for end in (s, t):
            if end not in index:
                raise UnknownEndpoint(f"edge {s!r}->{t!r}: unknown endpoint {end!r}")
        if not math.isfinite(w):
            raise InvalidWeight(f"edge {s!r}->{t!r}: weight must be finite")
        if w < 0:
            raise NegativeWeight(f"edge {s!r}->{t!r}: negative weight {w!r}")
        key = (s, t) if directed else tuple(sorted((s, t)))
        if key in seen:
            raise DuplicateEdge(f"duplicate edge {s!r}->{t!r}")
        seen.add(key)
        if ownership:
            if s == t:
                raise SelfLoopInOwnership(f"self-loop on {s!r} in ownership network")
            if w == 0:
                raise InvalidWeight(f"edge {s!r}->{t!r}: ownership shares must lie in (0, 1]")
            if w > 1:
                raise OwnershipOverflow(f"edge {s!r}->{t!r}: share {w!r} exceeds 1")
            incoming[index[t]] += w
        out.append(Edge(s, t, w))

    if ownership:
        over = np.flatnonzero(incoming > 1 + OWNERSHIP_TOLERANCE)
        if over.size:
            j = int(over[0])
            raise OwnershipOverflow(
                f"incoming shares of {records[j].id!r} sum to {incoming[j]:.12g} > 1"
            )
    out.sort(key=lambda e: (e.source, e.target))
    return Network(tuple(records), tuple(out), directed, ownership, _index=index)


def adjacency_matrix(net: Network, symmetrize: bool = False, weighted: bool = True) -> np.ndarray:
    """Dense matrix with ``M[i, j]`` = weight of edge i->j (0 if absent).

    Undirected networks are always mirrored. ``symmetrize`` applies
    ``max(M, M.T)`` to directed ones.
    """
    M = np.zeros((net.n, net.n))
    for e in net.edges:
        M[net.index(e.source), net.index(e.target)] = e.weight if weighted else 1.0
    if symmetrize or not net.directed:
        M = np.maximum(M, M.T)
    return M


def ownership_matrix(net: Network) -> np.ndarray:
    """``S[i, j]`` = fraction of j held by i."""
    if not net.ownership:
        raise NotOwnershipNetwork("operation requires an ownership-mode network")
    return adjacency_matrix(net)


def shareholders_of(net: Network, target: str) -> list[tuple[str, float]]:
    """Incoming edges of ``target`` as ``(holder, weight)`` sorted by holder id."""
    net.index(target)
    held = [(e.source, e.weight) for e in net.edges if e.target == target]
    if not net.directed:
        held += [(e.target, e.weight) for e in net.edges if e.source == target and e.target != target]
    return sorted(held)


def network_from_matrix(
    M: np.ndarray,
    ids: Sequence[str],
    nodes: Sequence[NodeRecord] | None = None,
    ownership: bool = False,
) -> Network:
    """Rebuild a directed network from a dense weight matrix (zero = no edge)."""
    M = np.asarray(M, dtype=float)
    rows, cols = np.nonzero(M)
    edges = [(ids[i], ids[j], M[i, j]) for i, j in zip(rows, cols)]
    return build_network(nodes if nodes is not None else list(ids), edges, ownership=ownership)


def relabel(net: Network, mapping: Mapping[str, str]) -> Network:
    """Copy of ``net`` with node ids renamed through ``mapping``."""
    nodes = [NodeRecord(mapping.get(nd.id, nd.id), nd.kind, nd.value) for nd in net.nodes]
    edges = [(mapping.get(e.source, e.source), mapping.get(e.target, e.target), e.weight) for e in net.edges]
    return build_network(nodes, edges, ownership=net.ownership, directed=net.directed)


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Per-node scores of one measure, aligned with ``ids``."""

    measure: str
    ids: tuple[str, ...]
    values: np.ndarray
    normalized: bool = False
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.ids),):
            raise ValueError("one score per node required")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def scores(self) -> dict[str, float]:
        return {i: float(v) for i, v in zip(self.ids, self.values)}

    def __getitem__(self, node_id: str) -> float:
        return float(self.values[self.ids.index(node_id)])

    def __len__(self) -> int:
        return len(self.ids)

    def ranking(self) -> list[str]:
        """Node ids by descending score, ties broken by id."""
        order = sorted(range(len(self.ids)), key=lambda k: (-self.values[k], self.ids[k]))
        return [self.ids[k] for k in order]
