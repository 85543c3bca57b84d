"""Exception types raised across the package."""


class PricingError(Exception):
    """Base class for numerical failures (range, strike, convergence)."""


class DomainError(PricingError, ValueError):
    """An argument lies outside the domain of the function."""


class StrikeOutsideRangeError(PricingError):
    """The strike point y = 0 is not strictly inside the truncation range."""

    def __init__(self, a: float, b: float):
        self.a = a
        self.b = b
        super().__init__(
            f"strike outside truncation range: y=0 not in ({a:.6g}, {b:.6g}); "
            "increase L"
        )


class InstabilityError(PricingError):
    """The requested degree is in a regime where the method loses all accuracy."""


class ConvergenceError(PricingError):
    """An adaptive procedure did not converge within its iteration cap."""

    def __init__(self, message: str, last_index: int):
        self.last_index = last_index
        super().__init__(f"{message} (last truncation index tried: {last_index})")


class ModelEvaluationError(PricingError):
    """A characteristic function produced a non-finite value."""
