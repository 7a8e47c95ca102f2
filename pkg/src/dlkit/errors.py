"""Exception types shared across the package."""


class DLError(Exception):
    """Base class for all toolkit errors."""


class DLSyntaxError(DLError, ValueError):
    """Raised by the parsers. Carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 1, col: int = 1):
        self.line = line
        self.col = col
        self.msg = message
        super().__init__(f"{line}:{col}: {message}")


class DialectError(DLError, ValueError):
    """An operation received a concept outside the dialect it supports."""


class ResourceError(DLError, RuntimeError):
    """A configured size cap or step budget was exhausted."""


class ConstructionError(DLError, ValueError):
    """Preconditions of a model construction are violated."""
