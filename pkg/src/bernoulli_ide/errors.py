"""Exception hierarchy shared by the package."""


class IdeError(Exception):
    """Base class for all errors raised by this package."""


class BasisError(IdeError, ValueError):
    """Requested basis degree outside the supported range."""


class DimensionError(IdeError, ValueError):
    """Non-conforming matrix or vector shapes."""


class SingularMatrixError(IdeError, ArithmeticError):
    """The assembled system has no unique solution at this degree."""


class QuadratureError(IdeError, ArithmeticError):
    """An integrand produced a non-finite sample."""


class ExprError(IdeError, ValueError):
    """Base for expression parsing and evaluation errors."""


class ParseError(ExprError):
    """Syntax, unknown-identifier or arity error in an expression.

    ``offset`` is the zero-based character offset of the offending token.
    """

    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.text = text
        self.reason = message


class DomainError(ExprError, ArithmeticError):
    """Evaluation left the real domain (log of non-positive, x/0, ...)."""


class BindingError(ExprError):
    """A variable was referenced but not supplied."""


class ProblemError(IdeError, ValueError):
    """An integro-differential problem violates its invariants."""
