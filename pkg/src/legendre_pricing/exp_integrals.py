"""The integrals U_n = int_alpha^1 exp(beta t) P_n(t) dt, n = 0..N.

Four routes are provided:

``u_direct``
    closed form through the antiderivative of t^m exp(beta t); exact but
    catastrophically cancelling, so it is evaluated in extended precision and
    capped at low degree.
``u_forward``
    the three-term recurrence run forwards. Unstable: rounding errors grow
    like the dominant solution (2n-1)!!/beta^n. Kept to demonstrate that.
``u_olver``
    the same recurrence solved as a boundary-value problem (Olver 1967).
    This is the production path.
``u_quadrature``
    composite Gauss-Legendre; an independent reference.

With W_n = (exp(beta) - exp(beta alpha) P_n(alpha)) / beta and Y_n = U_n - W_n,

    Y_{n-1} - (2n+1)/beta Y_n - Y_{n+1} = (2n+1)/beta W_n,   Y_0 = 0,

and, subtracting the same identity for W, U itself satisfies

    U_{n-1} - (2n+1)/beta U_n - U_{n+1} = W_{n-1} - W_{n+1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ConvergenceError, DomainError, InstabilityError
from .polynomials import legendre_eval_all

DIRECT_MAX_DEGREE = 25
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ExpIntegralRequest:
    alpha: float
    beta: float
    n_max: int

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be > 0 (a < b), got {self.beta}")
        if not -1.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [-1, 1], got {self.alpha}")
        if self.n_max < 0:
            raise DomainError(f"n_max must be >= 0, got {self.n_max}")


@dataclass(frozen=True)
class ExpIntegralResult:
    u: np.ndarray
    method: str
    est_error: np.ndarray
    info: dict = field(default_factory=dict)


def w_terms(alpha: float, beta: float, n_max: int) -> np.ndarray:
    """W_n = (exp(beta) - exp(beta alpha) P_n(alpha)) / beta for n = 0..n_max."""
    p = legendre_eval_all(n_max, alpha)
    return (math.exp(beta) - math.exp(beta * alpha) * p) / beta


# -- closed form ------------------------------------------------------------

def _iep(beta, m: int, t):
    """Antiderivative of t^m exp(beta t) at t (mpmath arithmetic)."""
    total = mpmath.mpf(0)
    fact_m = mpmath.factorial(m)
    for i in range(m + 1):
        term = t**i * fact_m / (beta ** (m + 1 - i) * mpmath.factorial(i))
        total += term if (m - i) % 2 == 0 else -term
    return mpmath.exp(beta * t) * total


def _direct_dps(beta: float, n: int) -> int:
    # Largest summand is about 4^n n! / beta^(n+1) exp(|beta|); keep 20 digits beyond it.
    mag = n * math.log10(4.0) + math.lgamma(n + 1) / math.log(10) - (n + 1) * math.log10(beta)
    mag += beta / math.log(10)
    return 30 + max(0, math.ceil(mag))


def u_direct(req: ExpIntegralRequest) -> ExpIntegralResult:
    """U_0..U_N from the power-series form of P_n and the exact antiderivative.

    Raises :class:`InstabilityError` beyond degree 25.
    """
    n_max = req.n_max
    if n_max > DIRECT_MAX_DEGREE:
        raise InstabilityError(
            f"direct formula requested for n_max={n_max} > {DIRECT_MAX_DEGREE}: "
            "instability regime (binomial sum cancels); use u_olver"
        )
    out = np.empty(n_max + 1)
    with mpmath.workdps(_direct_dps(req.beta, n_max)):
        alpha = mpmath.mpf(req.alpha)
        beta = mpmath.mpf(req.beta)
        one = mpmath.mpf(1)
        diff = [_iep(beta, m, one) - _iep(beta, m, alpha) for m in range(n_max + 1)]
        for n in range(n_max + 1):
            s = mpmath.mpf(0)
            for k in range(n // 2 + 1):
                coef = math.comb(n, k) * math.comb(2 * n - 2 * k, n)
                s += (-1) ** k * coef * diff[n - 2 * k]
            out[n] = float(s / mpmath.mpf(2) ** n)
    return ExpIntegralResult(out, "direct", _EPS * np.abs(out))


# -- forward recurrence -----------------------------------------------------

def u_forward(req: ExpIntegralRequest) -> ExpIntegralResult:
    """Forward recurrence seeded with exact U_0, U_1.

    No accuracy guarantee once n exceeds about beta; ``est_error`` grows with
    the dominant homogeneous solution and flags the divergence.
    """
    alpha, beta, n_max = req.alpha, req.beta, req.n_max
    seed = u_direct(ExpIntegralRequest(alpha, beta, min(n_max, 1))).u
    w = w_terms(alpha, beta, n_max)
    u = np.empty(n_max + 1)
    u[: len(seed)] = seed
    growth = np.zeros(n_max + 1)
    if n_max >= 1:
        growth[1] = 1.0
    # Overflow to inf at large n is the expected outcome here, not a bug.
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(2, n_max + 1):
            u[n] = w[n] - (2 * n - 1) / beta * u[n - 1] + u[n - 2] - w[n - 2]
            growth[n] = -(2 * n - 1) / beta * growth[n - 1] + growth[n - 2]
        scale = np.max(np.abs(w)) + np.max(np.abs(seed))
        est = _EPS * scale * (1.0 + np.abs(growth))
    return ExpIntegralResult(u, "forward", est)


# -- Olver's boundary-value method ---------------------------------------------

def u_olver(
    req: ExpIntegralRequest,
    tol: float = 1e-14,
    n_prime_max: int | None = None,
    formulation: str = "u",
) -> ExpIntegralResult:
    """U_0..U_N by Olver's method.

    The recurrence is treated as a boundary-value problem: the value at n = 0
    is fixed, the unknown at a truncation index N' is set to zero, and the
    tridiagonal system is solved by forward elimination (no pivoting; every
    pivot is positive here) and back substitution. N' grows until one more
    step would change every U_n, n <= N, by less than ``tol`` relative.

    ``formulation="y"`` solves for Y_n = U_n - W_n with Y_0 = 0, Y_N' = 0.
    ``formulation="u"`` (default) solves the same difference operator for
    U_n itself, whose right-hand side W_{n-1} - W_{n+1} no longer carries
    the exp(beta) term; this keeps relative accuracy when |U_n| << exp(beta).

    ``info`` holds the truncation index ``n_prime`` and the array ``y``.
    """
    if tol < 1e-14:
        raise DomainError(f"tol must be >= 1e-14, got {tol}")
    if formulation not in ("u", "y"):
        raise ValueError(f"formulation must be 'u' or 'y', got {formulation!r}")
    alpha, beta, n_max = req.alpha, req.beta, req.n_max
    if n_prime_max is None:
        n_prime_max = 16 * n_max + 200

    p = legendre_eval_all(n_prime_max + 2, alpha)
    e_alpha = math.exp(beta * alpha)
    w = (math.exp(beta) - e_alpha * p) / beta
    n = np.arange(n_prime_max + 1)
    if formulation == "y":
        rhs = (2 * n + 1) / beta * w[: n_prime_max + 1]
        start = 0.0
    else:
        rhs = np.concatenate(([0.0], e_alpha * (p[2 : n_prime_max + 2] - p[:n_prime_max]) / beta))
        start = e_alpha * math.expm1(beta * (1.0 - alpha)) / beta

    # Homogeneous solution p_0 = 0, p_1 = 1 is carried as r[n] = p_n / p_{n+1};
    # eps[n] = e_n / p_{n+1}, so that x_n = eps[n] + r[n] x_{n+1}.
    r = np.zeros(n_prime_max + 1)
    eps = np.zeros(n_prime_max + 1)
    eps[0] = start
    # prod_{j=N}^{m-1} |r_j|: how much a change at index m moves index N.
    prod_n = 1.0
    m = 0
    while True:
        m += 1
        if m > n_prime_max:
            raise ConvergenceError("Olver forward elimination did not converge", m - 1)
        b = (2 * m + 1) / beta
        r[m] = -1.0 / (b - r[m - 1])
        eps[m] = r[m] * (rhs[m] - eps[m - 1])
        if m <= n_max:
            continue
        prod_n *= abs(r[m - 1])
        change = abs(eps[m]) * prod_n
        if change > tol * abs(eps[n_max]) and change > 1e-300:
            continue
        x = _back_substitute(r, eps, m)
        est = abs(eps[m]) * _tail_products(r, n_max, m)
        u = x[: n_max + 1] + (w[: n_max + 1] if formulation == "y" else 0.0)
        bad = (est > tol * np.abs(u)) & (np.abs(u) > 1e-250)
        if not np.any(bad):
            break
    y = u - w[: n_max + 1]
    return ExpIntegralResult(u, "olver", est, info={"n_prime": m, "y": y, "formulation": formulation})


def _back_substitute(r: np.ndarray, eps: np.ndarray, m: int) -> np.ndarray:
    x = np.zeros(m + 1)
    x[0] = eps[0]
    for n in range(m - 1, 0, -1):
        x[n] = eps[n] + r[n] * x[n + 1]
    return x


def _tail_products(r: np.ndarray, n_max: int, m: int) -> np.ndarray:
    """prod_{j=n}^{m-1} |r_j| for n = 0..n_max (zero at n = 0 since r_0 = 0)."""
    out = np.empty(n_max + 1)
    acc = float(np.prod(np.abs(r[n_max:m])))
    out[n_max] = acc
    for n in range(n_max - 1, -1, -1):
        acc *= abs(r[n])
        out[n] = acc
    return out


# -- quadrature oracle ------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = leggauss(16)


def _composite_gl(alpha: float, beta: float, n_max: int, panels: int) -> np.ndarray:
    edges = np.linspace(alpha, 1.0, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    p = legendre_eval_all(n_max, t)
    return p @ (np.exp(beta * t) * wts)


def u_quadrature(req: ExpIntegralRequest) -> ExpIntegralResult:
    """U_n by composite 16-point Gauss-Legendre on max(32, 2N) panels."""
    alpha, beta, n_max = req.alpha, req.beta, req.n_max
    if alpha == 1.0:
        z = np.zeros(n_max + 1)
        return ExpIntegralResult(z, "quadrature", z.copy())
    panels = max(32, 2 * n_max)
    u = _composite_gl(alpha, beta, n_max, panels)
    coarse = _composite_gl(alpha, beta, n_max, panels // 2)
    floor = 1e-13 * math.exp(beta) * (1.0 - alpha)
    est = np.maximum(np.abs(u - coarse), floor)
    return ExpIntegralResult(u, "quadrature", est)
