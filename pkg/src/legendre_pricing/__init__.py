"""Option pricing by Legendre-series recovery of the risk-neutral density."""

from .errors import (
    ConvergenceError,
    DomainError,
    InstabilityError,
    ModelEvaluationError,
    PricingError,
    StrikeOutsideRangeError,
)
from .expansion import LegendreExpansion, compute_coefficients, density_eval, density_grid
from .models import (
    BlackScholes,
    Heston,
    Kou,
    MarketParams,
    Merton,
    TruncationRange,
    char_fn,
    cumulant_check,
    cumulants,
    truncation_range,
)
from .pricing import OptionContract, PriceResult, parity_price, payoff_coefficients, price

__all__ = [
    "BlackScholes",
    "ConvergenceError",
    "DomainError",
    "Heston",
    "InstabilityError",
    "Kou",
    "LegendreExpansion",
    "MarketParams",
    "Merton",
    "ModelEvaluationError",
    "OptionContract",
    "PriceResult",
    "PricingError",
    "StrikeOutsideRangeError",
    "TruncationRange",
    "char_fn",
    "compute_coefficients",
    "cumulant_check",
    "cumulants",
    "density_eval",
    "density_grid",
    "parity_price",
    "payoff_coefficients",
    "price",
    "truncation_range",
]
