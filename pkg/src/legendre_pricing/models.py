"""Characteristic functions, cumulants and truncation ranges.

Every model describes X = log(S_T / K) under the risk-neutral measure. Each
model class supplies the exponent of the characteristic function of
log(S_T / S_0); the strike enters only through a shift by log(S_0 / K).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, NamedTuple, Union

import numpy as np

from .errors import DomainError, ModelEvaluationError


@dataclass(frozen=True)
class MarketParams:
    spot: float
    rate: float
    maturity: float
    strike: float

    def __post_init__(self):
        if not self.spot > 0:
            raise DomainError(f"spot must be > 0, got {self.spot}")
        if not self.strike > 0:
            raise DomainError(f"strike must be > 0, got {self.strike}")
        if not self.maturity > 0:
            raise DomainError(f"maturity must be > 0, got {self.maturity}")

    @property
    def log_moneyness(self) -> float:
        return math.log(self.spot / self.strike)

    @property
    def discount(self) -> float:
        return math.exp(-self.rate * self.maturity)


@dataclass(frozen=True)
class BlackScholes:
    sigma: float

    name: ClassVar[str] = "black_scholes"
    default_L: ClassVar[float] = 7.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")

    def log_cf(self, u, T: float, r: float):
        drift = r - 0.5 * self.sigma**2
        return 1j * u * drift * T - 0.5 * u**2 * self.sigma**2 * T

    def cumulants(self, T: float, r: float):
        return (r - 0.5 * self.sigma**2) * T, self.sigma**2 * T, 0.0


@dataclass(frozen=True)
class Merton:
    sigma: float
    lam: float
    mu: float
    gamma: float

    name: ClassVar[str] = "merton"
    default_L: ClassVar[float] = 10.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")
        if not self.lam >= 0:
            raise DomainError(f"jump intensity must be >= 0, got {self.lam}")
        if not self.gamma > 0:
            raise DomainError(f"jump stdev gamma must be > 0, got {self.gamma}")

    @property
    def drift(self) -> float:
        """Martingale drift b = -sigma^2/2 - lam (E[e^J] - 1), excluding r."""
        return -0.5 * self.sigma**2 - self.lam * math.expm1(self.mu + 0.5 * self.gamma**2)

    def log_cf(self, u, T: float, r: float):
        jumps = np.exp(1j * u * self.mu - 0.5 * self.gamma**2 * u**2) - 1.0
        return 1j * u * (r + self.drift) * T - 0.5 * u**2 * self.sigma**2 * T + self.lam * T * jumps

    def cumulants(self, T: float, r: float):
        lam, mu, g2 = self.lam, self.mu, self.gamma**2
        c1 = T * (r + self.drift + lam * mu)
        c2 = T * (self.sigma**2 + lam * (mu**2 + g2))
        c4 = T * lam * (3 * g2**2 + 6 * mu**2 * g2 + mu**4)
        return c1, c2, c4


@dataclass(frozen=True)
class Kou:
    sigma: float
    lam: float
    p: float
    eta1: float
    eta2: float

    name: ClassVar[str] = "kou"
    default_L: ClassVar[float] = 10.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")
        if not self.lam >= 0:
            raise DomainError(f"jump intensity must be >= 0, got {self.lam}")
        if not 0 <= self.p <= 1:
            raise DomainError(f"up-jump probability must be in [0, 1], got {self.p}")
        if not self.eta1 > 1:
            raise DomainError(f"eta1 must be > 1 for a finite E[V], got {self.eta1}")
        if not self.eta2 > 0:
            raise DomainError(f"eta2 must be > 0, got {self.eta2}")

    @property
    def drift(self) -> float:
        """Compensated drift making S_T e^{-rT} a martingale, excluding r."""
        p, q = self.p, 1.0 - self.p
        mean_jump = p * self.eta1 / (self.eta1 - 1) + q * self.eta2 / (self.eta2 + 1) - 1.0
        return -0.5 * self.sigma**2 - self.lam * mean_jump

    def log_cf(self, u, T: float, r: float):
        iu = 1j * u
        p, q = self.p, 1.0 - self.p
        jumps = iu * (p / (self.eta1 - iu) - q / (self.eta2 + iu))
        return iu * (r + self.drift) * T - 0.5 * u**2 * self.sigma**2 * T + self.lam * T * jumps

    def cumulants(self, T: float, r: float):
        p, q, e1, e2, lam = self.p, 1.0 - self.p, self.eta1, self.eta2, self.lam
        c1 = T * (r + self.drift + lam * (p / e1 - q / e2))
        c2 = T * (self.sigma**2 + 2 * lam * (p / e1**2 + q / e2**2))
        c4 = 24 * T * lam * (p / e1**4 + q / e2**4)
        return c1, c2, c4


@dataclass(frozen=True)
class Heston:
    """Heston model; ``lam`` is the mean-reversion speed, ``ubar`` the long-run
    variance, ``eta`` the vol-of-vol and ``u0`` the initial variance.

    The Feller condition is not required.
    """

    lam: float
    ubar: float
    eta: float
    rho: float
    u0: float

    name: ClassVar[str] = "heston"
    default_L: ClassVar[float] = 12.0

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"mean-reversion speed must be > 0, got {self.lam}")
        if not self.ubar >= 0:
            raise DomainError(f"long-run variance must be >= 0, got {self.ubar}")
        if not self.eta > 0:
            raise DomainError(f"vol-of-vol must be > 0, got {self.eta}")
        if not -1 <= self.rho <= 1:
            raise DomainError(f"correlation must be in [-1, 1], got {self.rho}")
        if not self.u0 >= 0:
            raise DomainError(f"initial variance must be >= 0, got {self.u0}")

    def log_cf(self, u, T: float, r: float):
        lam, eta, rho = self.lam, self.eta, self.rho
        u = np.asarray(u, dtype=complex)
        q = lam - 1j * rho * eta * u
        # numpy's principal sqrt has non-negative real part.
        d = np.sqrt(q * q + (u * u + 1j * u) * eta**2)
        # q - d and 1 - exp(-dT) both cancel near u = 0; use equivalent forms.
        q_minus_d = -(u * u + 1j * u) * eta**2 / (q + d)
        g = q_minus_d / (q + d)
        e = np.exp(-d * T)
        one_minus_e = -np.expm1(-d * T)
        var_part = self.u0 / eta**2 * one_minus_e / (1.0 - g * e) * q_minus_d
        # (1 - g e) / (1 - g) = 1 + g (1 - e) / (1 - g)
        log_ratio = _log1p(g * one_minus_e / (1.0 - g))
        mean_part = lam * self.ubar / eta**2 * (T * q_minus_d - 2.0 * log_ratio)
        return 1j * u * r * T + var_part + mean_part

    def cumulants(self, T: float, r: float):
        # c2 is the exact second derivative of -log phi at 0. The often-quoted
        # version with ub * (6 e1 - 7) is off by 2 eta^2 ub (1 - e1).
        lam, ub, eta, rho, u0 = self.lam, self.ubar, self.eta, self.rho, self.u0
        e1 = math.exp(-lam * T)
        c1 = r * T + (1 - e1) * (ub - u0) / (2 * lam) - 0.5 * ub * T
        c2 = (
            eta * T * lam * e1 * (u0 - ub) * (8 * lam * rho - 4 * eta)
            + lam * rho * eta * (1 - e1) * (16 * ub - 8 * u0)
            + 2 * ub * lam * T * (-4 * lam * eta * rho + eta**2 + 4 * lam**2)
            + 8 * lam**2 * (u0 - ub) * (1 - e1)
            + eta**2 * ((ub - 2 * u0) * e1**2 + ub * (4 * e1 - 5) + 2 * u0)
        ) / (8 * lam**3)
        return c1, c2, None


def _log1p(z):
    """Principal log(1 + z) for complex z, accurate for small |z|."""
    z = np.asarray(z, dtype=complex)
    re = 0.5 * np.log1p(2.0 * z.real + (z.real**2 + z.imag**2))
    return re + 1j * np.arctan2(z.imag, 1.0 + z.real)


ModelSpec = Union[BlackScholes, Merton, Kou, Heston]
MODEL_TYPES = {cls.name: cls for cls in (BlackScholes, Merton, Kou, Heston)}


class Cumulants(NamedTuple):
    c1: float
    c2: float
    c4: float | None  # None where no closed form is used (Heston)


@dataclass(frozen=True)
class TruncationRange:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"truncation range needs a < b, got [{self.a}, {self.b}]")

    @property
    def alpha(self) -> float:
        """Image of the strike point y = 0 in [-1, 1]."""
        return (self.a + self.b) / (self.a - self.b)

    @property
    def beta(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def width(self) -> float:
        return self.b - self.a

    def to_unit(self, y):
        """Affine map [a, b] -> [-1, 1]."""
        return (2.0 * np.asarray(y, dtype=float) - (self.a + self.b)) / (self.b - self.a)

    def contains_strike(self) -> bool:
        return self.a < 0.0 < self.b


def log_char_fn(model: ModelSpec, market: MarketParams, u):
    """log phi(u) of X = log(S_T / K) (the cumulant generating exponent)."""
    return 1j * u * market.log_moneyness + model.log_cf(u, market.maturity, market.rate)


def char_fn(model: ModelSpec, market: MarketParams, u):
    """phi(u) = E[exp(i u X)] for X = log(S_T / K); ``u`` may be complex or an array."""
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.exp(log_char_fn(model, market, u))
    if not np.all(np.isfinite(val)):
        raise ModelEvaluationError(f"{model.name} characteristic function is not finite at u={u}")
    return val


def cumulants(model: ModelSpec, market: MarketParams) -> Cumulants:
    c1, c2, c4 = model.cumulants(market.maturity, market.rate)
    return Cumulants(market.log_moneyness + c1, c2, c4)


def truncation_range(model: ModelSpec, market: MarketParams, L: float | None = None) -> TruncationRange:
    """[a, b] = c1 -/+ L sqrt(c2 + sqrt(c4)); for Heston c1 -/+ L sqrt(|c2|).

    ``L`` defaults to the model's ``default_L`` (7 for Black-Scholes, 10 for
    the jump models, 12 for Heston).
    """
    if L is None:
        L = model.default_L
    if not L > 0:
        raise DomainError(f"range multiplier L must be > 0, got {L}")
    c1, c2, c4 = cumulants(model, market)
    if isinstance(model, Heston):
        spread = abs(c2)
    else:
        spread = c2 + math.sqrt(c4)
    if not spread > 0:
        raise DomainError(f"degenerate model: cumulant spread {spread} <= 0")
    half = L * math.sqrt(spread)
    return TruncationRange(c1 - half, c1 + half)


def cumulant_check(model: ModelSpec, market: MarketParams, h: float = 1e-4) -> float:
    """Max relative deviation of closed-form c1, c2 from finite differences.

    Central differences of log phi at u = 0 with steps h and 2h, combined by
    Richardson extrapolation.
    """
    psi = lambda u: complex(log_char_fn(model, market, u))  # noqa: E731

    def d1(s):
        return (psi(s) - psi(-s)) / (2 * s)

    def d2(s):
        return (psi(s) - 2 * psi(0.0) + psi(-s)) / s**2

    c1_fd = ((4 * d1(h) - d1(2 * h)) / 3).imag
    c2_fd = -((4 * d2(h) - d2(2 * h)) / 3).real
    c1, c2, _ = cumulants(model, market)
    dev1 = abs(c1_fd - c1) / max(abs(c1), 1e-300)
    dev2 = abs(c2_fd - c2) / max(abs(c2), 1e-300)
    return max(dev1, dev2)
