"""Error types shared across the package."""


class ParseError(ValueError):
    """Malformed graph or path input; carries a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class OracleMismatchError(RuntimeError):
    """Two independent computations of the same quantity disagreed.

    This always signals an implementation bug, never a property of the
    input graph, and is surfaced as a distinguished failure (exit code 3
    in the command line tool).
    """


class BoundExceededError(ValueError):
    """An enumeration guard was hit (vertex bound, basis size bound)."""
