"""Exception hierarchy shared by all modules.

The command-line frontend maps the three top-level families to exit codes:
``ParseError`` -> 2, ``PreconditionError`` -> 3, anything else -> 4.
"""

from __future__ import annotations


class GstaudtError(Exception):
    pass


class ParseError(GstaudtError, ValueError):
    """Malformed textual input; carries 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(where + message)


class PolySyntaxError(ParseError):
    pass


class UnknownRelation(ParseError):
    pass


class PreconditionError(GstaudtError):
    pass


# scalar
class DivisionByZero(GstaudtError, ZeroDivisionError):
    pass


class IncompatibleExtension(GstaudtError, ValueError):
    pass


class NotASquare(GstaudtError, ValueError):
    """No square root exists inside the supported scalar fields."""


# projective
class DegenerateCross(GstaudtError, ValueError):
    pass


class DegenerateEvaluation(GstaudtError):
    pass


class CertificateError(GstaudtError):
    pass


# cicore
class UnknownLabel(GstaudtError, KeyError):
    pass


class SingularConditioningBlock(PreconditionError):
    pass


class InconsistentInterpretation(GstaudtError):
    pass


class IllDefinedInterpretation(PreconditionError):
    """Semidefinite CI semantics requested on a matrix where it is not well defined."""


class SizeGuardExceeded(PreconditionError):
    pass


# encoder
class ConstraintConflict(GstaudtError, ValueError):
    pass


# witness
class NotPositiveDefinite(GstaudtError):
    pass


class NotAModel(PreconditionError):
    pass
