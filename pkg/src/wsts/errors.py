"""Exception hierarchy shared by all analyses.

The CLI maps these onto process exit codes: parse errors exit 2,
unsupported analyses exit 3, exhausted budgets exit 4.
"""


class WstsError(Exception):
    """Base class for all toolkit errors."""


class UsageError(WstsError):
    """Caller misuse: dimension mismatch, missing variable, bad arguments."""


class ParseError(WstsError):
    """Syntax or semantic error in a model file or sentence file."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + where)


class UnsupportedAnalysisError(WstsError):
    """The requested analysis is not sound or not defined for this model class."""


class BudgetExceededError(WstsError):
    """A configured resource limit was hit before the analysis could finish."""
