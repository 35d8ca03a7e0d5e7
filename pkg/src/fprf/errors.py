"""Exception hierarchy shared by all modules."""


class NumericError(ArithmeticError):
    """Base class for numerical failures (CLI exit code 3)."""


class PoleError(NumericError, ValueError):
    """Gamma function evaluated at a non-positive integer."""


class DomainError(NumericError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(NumericError):
    """Argument outside the documented working range of an evaluator."""


class BudgetExhausted(NumericError):
    """Series tolerance not met within the term budget."""


class DivergentSeries(NumericError):
    """Series classified as divergent at the requested argument."""


class QuadratureError(NumericError):
    """Quadrature failed to meet its tolerance."""


class TruncationInfeasible(NumericError):
    """A required truncation (fold count, tail) exceeds supported limits."""
