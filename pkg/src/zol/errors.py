"""Exception hierarchy shared by the whole package.

Two families matter to callers: bad inputs (ValidationError and friends) and
blown resource guards (GuardError and friends). The CLI maps the first family
to exit code 2 and the second to exit code 3.
"""


class ZolError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ZolError, ValueError):
    """An argument, file, or formula fails a documented precondition."""


class ParseError(ValidationError):
    """Formula text is not well formed; carries a position message."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class EvaluationError(ZolError, ValueError):
    """A formula cannot be evaluated (unbound variable, vocabulary mismatch)."""


class GuardError(ZolError, RuntimeError):
    """A size or iteration guard tripped; the request is too large as posed."""


class BudgetError(GuardError):
    """A bounded search exhausted its budget without an answer."""
