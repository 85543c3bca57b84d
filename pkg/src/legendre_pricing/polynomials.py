"""Legendre polynomials on [-1, 1] and their tail integrals.

Degrees are evaluated with the three-term recurrence

    (n + 1) P_{n+1}(x) = (2n + 1) x P_n(x) - n P_{n-1}(x),

which is forward-stable on [-1, 1]. The power-series form is kept only as a
test oracle (see :func:`legendre_power_series`).
"""

from __future__ import annotations

from math import comb

import numpy as np

from .errors import DomainError

#: Points this far outside [-1, 1] are clamped instead of rejected; they come
#: from rounding in the affine map y -> t.
DOMAIN_TOL = 1e-12


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + DOMAIN_TOL) or np.any(np.isnan(x)):
        raise DomainError(f"Legendre argument outside [-1, 1]: {x}")
    return np.clip(x, -1.0, 1.0)


def legendre_eval_all(n_max: int, x):
    """Return ``[P_0(x), ..., P_{n_max}(x)]`` in one recurrence pass.

    ``x`` may be a scalar or an array; the result has shape
    ``(n_max + 1,) + np.shape(x)``.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    x = _check_x(x)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x
    for n in range(1, n_max):
        out[n + 1] = ((2 * n + 1) * x * out[n] - n * out[n - 1]) / (n + 1)
    return out


def legendre_eval(n: int, x):
    """P_n(x) by the three-term recurrence."""
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    val = legendre_eval_all(n, x)[n]
    return float(val) if val.ndim == 0 else val


def legendre_tail_integrals(n_max: int, alpha: float) -> np.ndarray:
    """Vector of ``int_alpha^1 P_n(t) dt`` for n = 0..n_max.

    Uses ``(P_{n-1}(alpha) - P_{n+1}(alpha)) / (2n + 1)`` with P_{-1} = 1.
    """
    p = legendre_eval_all(n_max + 1, alpha)
    lower = np.concatenate(([1.0], p[:n_max]))
    n = np.arange(n_max + 1)
    return (lower - p[1:n_max + 2]) / (2 * n + 1)


def legendre_integral_tail(n: int, alpha: float) -> float:
    """Exact ``int_alpha^1 P_n(t) dt``."""
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    return float(legendre_tail_integrals(n, alpha)[n])


def legendre_power_series(n: int, x: float) -> float:
    """P_n(x) from the explicit binomial sum.

    Cancels badly beyond n of about 20; only used to cross-check the
    recurrence at low degree.
    """
    total = 0.0
    for k in range(n // 2 + 1):
        total += (-1) ** k * comb(n, k) * comb(2 * n - 2 * k, n) * x ** (n - 2 * k)
    return total / 2 ** n
