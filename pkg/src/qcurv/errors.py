"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of the operation."""


class DivergenceError(ArithmeticError):
    """The requested quantity is a genuinely divergent integral or series."""


class ConvergenceError(RuntimeError):
    """An iterative scheme ran out of refinement budget.

    Carries the best estimate reached so the caller can still inspect it.
    """

    def __init__(self, message, best_estimate=None, err_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.err_estimate = err_estimate


class ExtrapolationError(RuntimeError):
    """A limit extrapolation did not stabilize on the supplied sequence."""
