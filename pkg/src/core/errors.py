"""Exception hierarchy shared by every qsd module"""

from typing import Optional


class QsdError(Exception):
    """Base class for all library errors"""


class ArgumentError(QsdError, ValueError):
    """Inconsistent shapes, dimensions or parameters"""


class CapacityError(QsdError):
    """A configured size cap would be exceeded"""

    def __init__(self, what: str, requested: int, limit: int):
        self.requested = requested
        self.limit = limit
        super().__init__(f"{what}: requested {requested} exceeds capacity {limit}")


class NumericError(QsdError, ArithmeticError):
    """An iteration failed to converge"""


class PrecisionError(NumericError):
    """The requested precision cannot be delivered"""


class ParseError(QsdError):
    """Malformed input text; positions are 1-based"""

    def __init__(self, message: str, line: int, column: int = 1, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


class PreconditionError(QsdError):
    """A precondition of a bound check does not hold"""


class UnsupportedError(QsdError, NotImplementedError):
    """Valid request outside the implemented cases"""
