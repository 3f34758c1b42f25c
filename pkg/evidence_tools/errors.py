"""Exception hierarchy shared by the kernel, the CLI and the pages."""

from __future__ import annotations


class EvidenceError(Exception):
    """Base class for every error raised by evidence_tools."""

    def details(self) -> dict:
        return {}


class FrameError(EvidenceError, ValueError):
    """Invalid variable, frame, value label or frame mismatch."""


class FormatError(EvidenceError, ValueError):
    """Malformed CSV or JSON input."""

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)

    def details(self) -> dict:
        return {"line": self.line, "column": self.column}


class MassError(EvidenceError, ValueError):
    """Mass assignment that is not a valid input for the requested operation."""


class TotalConflictError(EvidenceError):
    """Dempster combination with conflict k = 1."""

    def __init__(self, message: str = "total conflict (k = 1)", *, node: str | None = None):
        self.node = node
        if node is not None:
            message = f"{message} at node {node!r}"
        super().__init__(message)

    def details(self) -> dict:
        return {"node": self.node} if self.node is not None else {}


class ImpossibleConditionError(EvidenceError):
    """Case update that leaves no case standing."""


class SetValuedDataError(EvidenceError):
    """Probability semantics requested on a table with set-valued cells."""


class NonBoxFocalError(EvidenceError):
    """A focal set that is not a cross product where one is required."""


class CapacityError(EvidenceError):
    """Frame or candidate count above the configured cap."""


class NetworkError(EvidenceError):
    """Invalid network, unknown target or evidence outside the network."""
