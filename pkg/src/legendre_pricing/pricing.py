"""European call, put and digital prices from the Legendre expansion.

With the payoff v(y) written on [a, b] and y = (b-a)/2 t + (a+b)/2,

    price = exp(-rT) sum_{n=0}^{N} A_n V_n,   V_n = int_a^b v(y) P_n(t(y)) dy,

and for the two payoffs that vanish below the strike (y < 0, i.e. t < alpha)

    call:     V_n = K beta [exp((a+b)/2) U_n - I_n],
    digital:  V_n = beta I_n,

where U_n = int_alpha^1 exp(beta t) P_n dt and I_n = int_alpha^1 P_n dt.
Puts follow by parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, StrikeOutsideRangeError
from .exp_integrals import ExpIntegralRequest, ExpIntegralResult, u_olver
from .expansion import LegendreExpansion, compute_coefficients
from .models import MarketParams, ModelSpec, TruncationRange, truncation_range
from .polynomials import legendre_tail_integrals

KINDS = ("call", "put", "digital_call", "digital_put")


@dataclass(frozen=True)
class OptionContract:
    kind: str
    strike: float
    maturity: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.strike > 0:
            raise DomainError(f"strike must be > 0, got {self.strike}")
        if not self.maturity > 0:
            raise DomainError(f"maturity must be > 0, got {self.maturity}")

    @property
    def is_digital(self) -> bool:
        return self.kind.startswith("digital")

    @property
    def is_put(self) -> bool:
        return self.kind.endswith("put")

    @property
    def call_kind(self) -> str:
        """The call-type contract this one is priced from."""
        return "digital_call" if self.is_digital else "call"


@dataclass(frozen=True)
class PriceResult:
    price: float
    kind: str
    n_terms: int
    fourier_terms: int
    range: TruncationRange
    #: |A_N| |V_N| of the call-type series
    coeff_tail: float
    expansion: LegendreExpansion | None = None


def _check_strike_inside(rng: TruncationRange) -> None:
    if not rng.contains_strike():
        raise StrikeOutsideRangeError(rng.a, rng.b)


def payoff_coefficients(
    contract: OptionContract,
    range: TruncationRange,
    u_table: ExpIntegralResult | None = None,
    n_max: int | None = None,
) -> np.ndarray:
    """V_0..V_N for a call or digital call.

    Calls need ``u_table`` (U_n from :func:`u_olver` on the same alpha, beta);
    digitals only need ``n_max``. Puts are priced by parity and rejected here.
    """
    if contract.is_put:
        raise DomainError(f"{contract.kind} is priced by parity; pass the call-type contract")
    _check_strike_inside(range)
    alpha, beta = range.alpha, range.beta
    if contract.is_digital:
        if n_max is None:
            if u_table is None:
                raise DomainError("digital payoff needs n_max or a u_table")
            n_max = len(u_table.u) - 1
        return beta * legendre_tail_integrals(n_max, alpha)
    if u_table is None:
        raise DomainError("call payoff needs the U_n table")
    n_max = len(u_table.u) - 1
    i_n = legendre_tail_integrals(n_max, alpha)
    return contract.strike * beta * (math.exp(0.5 * (range.a + range.b)) * u_table.u - i_n)


def price(
    model: ModelSpec,
    market: MarketParams,
    contract: OptionContract,
    N: int,
    M: int,
    L: float | None = None,
    tol: float = 1e-14,
) -> PriceResult:
    """Price ``contract``; its strike and maturity override those in ``market``.

    ``L`` overrides the model's default range multiplier and ``tol`` is the
    relative tolerance of the U_n solver (calls only).
    """
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    market = replace(market, strike=contract.strike, maturity=contract.maturity)
    rng = truncation_range(model, market, L)
    _check_strike_inside(rng)
    exp = compute_coefficients(model, market, rng, N, M)

    base = replace(contract, kind=contract.call_kind)
    if base.is_digital:
        v = payoff_coefficients(base, rng, n_max=N)
    else:
        table = u_olver(ExpIntegralRequest(rng.alpha, rng.beta, N), tol=tol)
        v = payoff_coefficients(base, rng, table)
    value = market.discount * float(np.dot(exp.coeffs, v))
    if contract.is_put:
        value = parity_price(value, market, digital=contract.is_digital)
    return PriceResult(
        price=value,
        kind=contract.kind,
        n_terms=N,
        fourier_terms=M,
        range=rng,
        coeff_tail=float(abs(exp.coeffs[-1]) * abs(v[-1])),
        expansion=exp,
    )


def parity_price(call_price: float, market: MarketParams, digital: bool = False) -> float:
    """Put from call: C - S_0 + K e^{-rT}, or e^{-rT} - C for digitals."""
    if digital:
        return market.discount - call_price
    return call_price - market.spot + market.strike * market.discount
