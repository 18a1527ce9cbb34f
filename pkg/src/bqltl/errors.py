"""Exception types shared across the package."""


class BqltlError(Exception):
    pass


class FormulaSyntaxError(BqltlError):
    """Raised by the parser; carries 1-based line and column."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ResourceExceeded(BqltlError):
    """A construction blew through its state budget.

    ``stage`` names the pipeline step that gave up, so callers can report
    how far a solve got.
    """

    def __init__(self, stage, limit, message=None):
        super().__init__(message or f"state cap {limit} exceeded at stage '{stage}'")
        self.stage = stage
        self.limit = limit


class AlphabetMismatch(BqltlError):
    pass


class ConformanceError(BqltlError):
    pass
