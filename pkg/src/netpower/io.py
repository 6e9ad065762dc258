"""CSV ingestion and result documents."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ParseError
from .graph import Network, NodeRecord, build_network

NODE_COLUMNS = ("id", "kind", "value")
EDGE_COLUMNS = ("source", "target", "weight")


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _rows(path: Path, columns: tuple, required: tuple):
    """Yield ``(line_number, record)`` for each data line of a headed CSV."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path=str(path)) from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("missing header line", 1, str(path)) from None
        header = [h.strip().lower() for h in header]
        missing = [c for c in required if c not in header]
        unknown = [c for c in header if c not in columns]
        if missing or unknown:
            raise ParseError(f"header must name the columns {','.join(columns)}; got {','.join(header)}", 1, str(path))
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, found {len(row)}", line, str(path))
            yield line, dict(zip(header, (c.strip() for c in row)))


def _number(text: str, what: str, line: int, path: Path) -> float:
    try:
        x = float(text)
    except ValueError:
        raise ParseError(f"{what} {text!r} is not a number", line, str(path)) from None
    if not math.isfinite(x):
        raise ParseError(f"{what} {text!r} is not finite", line, str(path))
    return x


def read_nodes(path: str | Path) -> list[NodeRecord]:
    path = Path(path)
    out = []
    for line, rec in _rows(path, NODE_COLUMNS, ("id",)):
        kind = rec.get("kind") or "firm"
        if kind not in ("firm", "person"):
            raise ParseError(f"kind must be firm or person, got {kind!r}", line, str(path))
        value = _number(rec["value"], "value", line, path) if rec.get("value") else 0.0
        if value < 0:
            raise ParseError("value must be >= 0", line, str(path))
        if not rec["id"]:
            raise ParseError("empty node id", line, str(path))
        out.append(NodeRecord(rec["id"], kind, value))
    return out


def read_edges(path: str | Path) -> list[tuple[str, str, float]]:
    path = Path(path)
    out = []
    for line, rec in _rows(path, EDGE_COLUMNS, ("source", "target")):
        w = _number(rec["weight"], "weight", line, path) if rec.get("weight") else 1.0
        if not rec["source"] or not rec["target"]:
            raise ParseError("empty endpoint", line, str(path))
        out.append((rec["source"], rec["target"], w))
    return out


def load_network(
    nodes_path: str | Path | None,
    edges_path: str | Path | None,
    ownership: bool = False,
    directed: bool = True,
) -> Network:
    """Build a validated network from node and edge CSV files.

    Either file may be omitted: without a node file the nodes are the edge
    endpoints (kind ``firm``, value 0).
    """
    edges = read_edges(edges_path) if edges_path else []
    if nodes_path:
        nodes: list = read_nodes(nodes_path)
    else:
        nodes = sorted({e[0] for e in edges} | {e[1] for e in edges})
    return build_network(nodes, edges, ownership=ownership, directed=directed)


# ---------------------------------------------------------------------------
# documents


def to_jsonable(obj: Any) -> Any:
    """Plain JSON values; floats stay floats so the shortest repr round-trips."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, (frozenset, set)):
        return sorted(to_jsonable(v) for v in obj)
    return obj


def dumps(doc: dict) -> str:
    """Canonical text of a result document (byte-stable for equal content)."""
    return json.dumps(to_jsonable(doc), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)


def read_document(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def write_document(doc: dict, path: str | Path | None) -> str:
    text = dumps(doc)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
