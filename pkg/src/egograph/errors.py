"""Shared exception types."""


class EgographError(Exception):
    """Base class for all package errors."""


class ParameterError(EgographError, ValueError):
    """An argument violates a documented precondition."""


class UnknownNodeError(EgographError, KeyError):
    """A node id is not part of the graph."""


class DisconnectedError(EgographError):
    """Two nodes have no connecting path (defensive; generated graphs are connected)."""


class LabelCapacityError(EgographError):
    """More labels requested than the label space can provide."""


class TaskGenerationError(EgographError):
    """The graph admits no task instance satisfying a constraint."""


class ProtocolError(EgographError):
    """Malformed or out-of-contract protocol message."""
