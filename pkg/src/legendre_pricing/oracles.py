"""Reference prices and densities used to validate the Legendre pricer.

Closed forms cover Black-Scholes and Merton; every model is also covered by
a brute-force Fourier inversion. Nothing here uses the Legendre machinery
(polynomials, Bessel tables, U_n integrals or the expansion), so agreement
is evidence rather than a tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import hermite_e

from .errors import DomainError, PricingError
from .models import BlackScholes, MarketParams, Merton, ModelSpec, char_fn, truncation_range

#: range multiplier for the quadrature y-grid, wider than any pricing default
ORACLE_L = 14.0
_DECAY_TOL = 1e-12
_U_MAX_CAP = 1e6
_POISSON_TOL = 1e-16
_MERTON_DENSITY_TERMS = 50


@dataclass(frozen=True)
class ReferenceResult:
    value: float
    method: str  # bs_analytic | merton_series | fourier_quadrature
    est_error: float


def normal_cdf(x: float) -> float:
    """Standard normal CDF through erfc, accurate in both tails."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _d2(market: MarketParams, sigma: float) -> float:
    srt = sigma * math.sqrt(market.maturity)
    return (market.log_moneyness + (market.rate - 0.5 * sigma**2) * market.maturity) / srt


def bs_digital(market: MarketParams, sigma: float) -> float:
    """Discounted risk-neutral probability that S_T > K under Black-Scholes."""
    if not sigma > 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    return market.discount * normal_cdf(_d2(market, sigma))


def bs_call(market: MarketParams, sigma: float) -> float:
    if not sigma > 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    d2 = _d2(market, sigma)
    d1 = d2 + sigma * math.sqrt(market.maturity)
    return market.spot * normal_cdf(d1) - market.strike * market.discount * normal_cdf(d2)


def _poisson_weights(mean: float):
    """Yield (k, weight) until past the mode with weight below 1e-16."""
    k = 0
    while True:
        w = math.exp(-mean + k * math.log(mean) - math.lgamma(k + 1)) if mean > 0 else float(k == 0)
        yield k, w
        if k >= mean and w < _POISSON_TOL:
            return
        k += 1


def merton_digital(market: MarketParams, params: Merton) -> ReferenceResult:
    """Digital call as a Poisson mixture of Gaussian tail probabilities."""
    T = market.maturity
    centre = market.log_moneyness + (market.rate + params.drift) * T
    lam_t = params.lam * T
    total = 0.0
    last = 0.0
    for k, w in _poisson_weights(lam_t):
        sd = math.sqrt(params.sigma**2 * T + k * params.gamma**2)
        last = w
        total += w * normal_cdf((centre + k * params.mu) / sd)
    # Remaining Poisson mass past the last term bounds the omitted part.
    return ReferenceResult(market.discount * total, "merton_series", max(last, 1e-16))


def merton_density(x, market: MarketParams, params: Merton):
    """Density of log(S_T/K): 50-term Poisson mixture of Gaussians."""
    x = np.asarray(x, dtype=float)
    T = market.maturity
    centre = market.log_moneyness + (market.rate + params.drift) * T
    lam_t = params.lam * T
    out = np.zeros_like(x)
    for k in range(_MERTON_DENSITY_TERMS):
        w = math.exp(-lam_t + (k * math.log(lam_t) if lam_t > 0 else 0.0) - math.lgamma(k + 1))
        if lam_t == 0 and k > 0:
            break
        var = params.sigma**2 * T + k * params.gamma**2
        out += w * np.exp(-((x - centre - k * params.mu) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
    return float(out) if out.ndim == 0 else out


def gaussian_derivative(n: int, x, mean: float, sd: float):
    """n-th derivative of the N(mean, sd^2) density via probabilists' Hermite."""
    if n < 0:
        raise DomainError(f"order must be >= 0, got {n}")
    if not sd > 0:
        raise DomainError(f"sd must be > 0, got {sd}")
    z = (np.asarray(x, dtype=float) - mean) / sd
    dens = np.exp(-0.5 * z * z) / (sd * math.sqrt(2 * math.pi))
    h = hermite_e.hermeval(z, [0.0] * n + [1.0])
    val = (-1) ** n * h * dens / sd**n
    return float(val) if np.ndim(val) == 0 else val


# -- Fourier inversion ---------------------------------------------------------

def _u_grid(model: ModelSpec, market: MarketParams, width: float, u_max, du):
    if du is None:
        # Nyquist wavelength 2 pi / du = 5 * width keeps aliased images away.
        du = 2 * math.pi / (5.0 * width)
    if u_max is None:
        u_max = 32 * du
    while abs(complex(char_fn(model, market, u_max))) >= _DECAY_TOL or abs(
        complex(char_fn(model, market, 1.5 * u_max))
    ) >= _DECAY_TOL:
        u_max *= 1.5
        if u_max > _U_MAX_CAP:
            raise PricingError(f"characteristic function of {model.name} does not decay below "
                               f"{_DECAY_TOL} before u = {_U_MAX_CAP:g}")
    n = max(2, math.ceil(u_max / du))
    u = np.linspace(0.0, n * du, n + 1)
    w = np.full(n + 1, du)
    w[0] = w[-1] = 0.5 * du
    return u, w


def fourier_density(model: ModelSpec, market: MarketParams, y, u_max=None, du=None):
    """f(y) = (1/pi) int_0^u_max Re(exp(-iuy) phi(u)) du by the trapezoid rule."""
    y = np.asarray(y, dtype=float)
    rng = truncation_range(model, market, ORACLE_L)
    u, w = _u_grid(model, market, rng.width, u_max, du)
    phi = char_fn(model, market, u) * w
    flat = y.ravel()
    out = np.empty(flat.size)
    # chunk to bound memory at len(u) * chunk complex entries
    chunk = max(1, 2_000_000 // len(u))
    for s in range(0, flat.size, chunk):
        ys = flat[s : s + chunk]
        out[s : s + chunk] = (np.exp(-1j * np.outer(ys, u)) @ phi).real / math.pi
    return out.reshape(y.shape) if y.ndim else float(out[0])


def _payoff(kind: str, strike: float, y):
    if kind == "call":
        return strike * np.expm1(y)
    if kind == "put":
        return -strike * np.expm1(y)
    return np.ones_like(y)


def fourier_quadrature_price(
    model: ModelSpec,
    market: MarketParams,
    contract,
    u_max: float | None = None,
    du: float | None = None,
    n_intervals: int = 8192,
) -> ReferenceResult:
    """Price by Fourier-inverting the density and integrating the payoff.

    The density is inverted on a uniform y-grid over the in-the-money part
    of the L = 14 range ([0, b] for calls, [a, 0] for puts), the payoff is
    integrated by the trapezoid rule, and the result is Richardson
    extrapolated against half as many intervals; the size of that
    correction is returned as ``est_error``.
    """
    market = replace(market, strike=contract.strike, maturity=contract.maturity)
    rng = truncation_range(model, market, ORACLE_L)
    if not rng.contains_strike():
        raise DomainError(f"strike outside the oracle range [{rng.a}, {rng.b}]")
    lo, hi = (rng.a, 0.0) if contract.kind.endswith("put") else (0.0, rng.b)
    y = np.linspace(lo, hi, n_intervals + 1)
    g = _payoff(contract.kind, contract.strike, y) * fourier_density(model, market, y, u_max, du)
    h = (hi - lo) / n_intervals
    fine = h * (g.sum() - 0.5 * (g[0] + g[-1]))
    gc = g[::2]
    coarse = 2 * h * (gc.sum() - 0.5 * (gc[0] + gc[-1]))
    value = fine + (fine - coarse) / 3.0
    est = max(abs(value - fine), 1e-15)
    return ReferenceResult(market.discount * value, "fourier_quadrature", market.discount * est)


def reference_price(model: ModelSpec, market: MarketParams, contract) -> ReferenceResult:
    """Best available reference: closed forms for BS and Merton digitals, else quadrature."""
    market = replace(market, strike=contract.strike, maturity=contract.maturity)
    disc = market.discount
    if isinstance(model, BlackScholes):
        if contract.kind.startswith("digital"):
            v = bs_digital(market, model.sigma)
            v = v if contract.kind == "digital_call" else disc - v
        else:
            v = bs_call(market, model.sigma)
            if contract.kind == "put":
                v = v - market.spot + market.strike * disc
        return ReferenceResult(v, "bs_analytic", 1e-15)
    if isinstance(model, Merton) and contract.kind.startswith("digital"):
        ref = merton_digital(market, model)
        if contract.kind == "digital_put":
            return replace(ref, value=disc - ref.value)
        return ref
    return fourier_quadrature_price(model, market, contract)
