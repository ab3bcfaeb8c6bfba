"""Exception hierarchy shared by all modules."""


class LaplaceTailsError(Exception):
    """Base class for every error raised by this package."""


class ExpressionSyntaxError(LaplaceTailsError):
    """Malformed expression text; ``offset`` is the 1-based character position."""

    def __init__(self, message, offset, source=""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class DomainError(LaplaceTailsError):
    """A node of an expression is singular at the requested centre."""


class JetOrderExceeded(LaplaceTailsError):
    pass


class PrecisionInsufficient(LaplaceTailsError):
    pass


class PreconditionError(LaplaceTailsError):
    """Input fails a structural precondition (CM / BF sign pattern, grid shape...)."""


class NotCompletelyMonotone(PreconditionError):
    pass


class IndeterminateLimit(LaplaceTailsError):
    """The sequence f^(n)(2^-j) neither stabilised nor diverged cleanly."""

    def __init__(self, n, values):
        self.n = n
        self.values = values
        super().__init__(f"limit of derivative {n} at 0+ is indeterminate")


class A3FitError(LaplaceTailsError):
    def __init__(self, message, worst_sample=None):
        self.worst_sample = worst_sample
        super().__init__(message)


class QuadratureError(LaplaceTailsError):
    pass


class NonIntegrable(QuadratureError):
    pass
