"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the admissible domain of an operation."""


class EvaluationError(ArithmeticError):
    """A curve or function evaluation produced non-finite values."""


class IntersectionError(ArithmeticError):
    """Root bracketing for a line/curve intersection failed."""


class NonConvexError(DomainError):
    """A boundary failed the convexity check."""

    def __init__(self, message, thetas=()):
        super().__init__(message)
        self.thetas = tuple(thetas)
