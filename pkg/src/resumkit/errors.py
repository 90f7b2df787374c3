"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class ResumkitError(Exception):
    """Base class; the CLI turns these into structured diagnostics."""

    kind = "error"


class GraphError(ResumkitError, ValueError):
    kind = "graph"


class DisconnectedGraphError(GraphError):
    kind = "disconnected"


class NotSpanningTreeError(GraphError):
    kind = "not-spanning-tree"


class CapExceededError(ResumkitError):
    kind = "cap-exceeded"


class GraphFormatError(ResumkitError, ValueError):
    """Problems reading a graph file.  ``kind`` is one of
    ``parse``, ``duplicate-label``, ``dangling-endpoint``."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
