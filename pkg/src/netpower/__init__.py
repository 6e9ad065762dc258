"""Power and control measures on ownership and influence networks."""

from importlib.metadata import PackageNotFoundError, version as _version

from ._jit import backend
from .errors import NetPowerError, NumericalError, ValidationError
from .graph import Edge, Network, NodeRecord, ScoreVector, adjacency_matrix, build_network, ownership_matrix

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # pragma: no cover - source checkout without install
    __version__ = "0.0.0"

__all__ = [
    "Edge",
    "Network",
    "NodeRecord",
    "ScoreVector",
    "adjacency_matrix",
    "backend",
    "build_network",
    "ownership_matrix",
    "NetPowerError",
    "NumericalError",
    "ValidationError",
    "__version__",
]
