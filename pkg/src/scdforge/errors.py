"""Exception types shared across the package."""


class ScdError(Exception):
    """Base class for library errors."""


class DimensionMismatch(ScdError, ValueError):
    pass


class DegenerateSimplex(ScdError, ValueError):
    pass


class AmbiguityError(ScdError):
    """A point was claimed by two different snakes."""


class PreconditionError(ScdError):
    """An operation was called on input that violates its contract."""


class ConditionError(PreconditionError):
    """A hyperplane condition needed by the operation does not hold."""


class MixedKindsError(PreconditionError):
    """Product of a decomposition with real snakes and one with fake snakes."""


class BudgetExceeded(ScdError):
    """A bounded search ran out of nodes before reaching a verdict."""


class DenominatorError(ScdError):
    """A walked point does not have the denominator the construction promises."""


class NotInSnake(ScdError):
    """An exact decomposition left a lattice point uncovered."""
