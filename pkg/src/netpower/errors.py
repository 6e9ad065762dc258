"""Exception hierarchy.

Every error carries a stable ``code`` string and an ``exit_code`` used by the
command-line front end: 1 for invalid input, 2 for numerical failure.
"""

from __future__ import annotations


class NetPowerError(Exception):
    exit_code = 1

    @property
    def code(self) -> str:
        return type(self).__name__


class ValidationError(NetPowerError):
    """Input violates a structural precondition."""

    exit_code = 1


class NumericalError(NetPowerError):
    """A computation could not produce a trustworthy result."""

    exit_code = 2


# graph model
class EmptyNetwork(ValidationError):
    pass


class DuplicateNode(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class UnknownEndpoint(ValidationError):
    pass


class UnknownNode(ValidationError):
    pass


class InvalidWeight(ValidationError):
    pass


class NegativeWeight(InvalidWeight):
    pass


class OwnershipOverflow(ValidationError):
    pass


class SelfLoopInOwnership(ValidationError):
    pass


class NotOwnershipNetwork(ValidationError):
    pass


class InvalidOption(ValidationError):
    pass


# numerics
class SingularMatrix(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class ZeroMatrix(NumericalError):
    pass


class NegativeEdgeLength(ValidationError):
    pass


class DisconnectedGraph(ValidationError):
    pass


class SingletonNetwork(ValidationError):
    pass


# voting games
class UnknownPlayer(ValidationError):
    pass


class TooManyPlayers(ValidationError):
    pass


class TooManyNodes(ValidationError):
    pass


class AllPowerless(NumericalError):
    pass


class NoVulnerableCoalitions(NumericalError):
    pass


class CycleDepthExceeded(NumericalError):
    pass


# concentration
class EmptyDistribution(ValidationError):
    pass


class InvalidDistribution(ValidationError):
    pass


class KOutOfRange(ValidationError):
    pass


class CycleDetected(ValidationError):
    def __init__(self, message: str, members: tuple[str, ...] = ()):
        super().__init__(message)
        self.members = members


# flow measures
class DivergentPropagation(NumericalError):
    pass


class AttenuationTooLarge(NumericalError):
    pass


# optimization
class Infeasible(NumericalError):
    pass


class SharesUnavailable(NumericalError):
    pass


class TooLarge(ValidationError):
    pass


# hybrid
class SingularDraw(NumericalError):
    pass


class MismatchedNodes(ValidationError):
    pass


# io
class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = f"{path}:" if path else ""
        if line is not None:
            message = f"{where}line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.path = path


class InputMismatch(ValidationError):
    """A replayed manifest refers to input files whose contents changed."""
