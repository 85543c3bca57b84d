"""Legendre-series recovery of the density of X = log(S_T / K).

On [a, b] with t = (2y - (a + b)) / (b - a),

    f(y) ~ sum_{n=0}^{N} A_n P_n(t),

where A_n is obtained from the characteristic function through

    A_n = (2n+1)/(b-a) [ B_0 C_0^n + 2 Re sum_{k=1}^{M} B_k C_k^n ],
    B_k = phi(-2 pi k / (b-a)) / (b-a),
    C_k^n = i^n (b-a) exp(i pi k (a+b)/(b-a)) j_n(pi k),   C_0^n = (b-a) delta_{n0}.

The negative-k half of the Fourier sum is folded in by conjugation, so the
coefficients are real by construction.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .bessel import spherical_bessel_table
from .errors import DomainError, ModelEvaluationError
from .models import MarketParams, ModelSpec, TruncationRange, char_fn
from .polynomials import DOMAIN_TOL, legendre_eval_all


@dataclass(frozen=True)
class LegendreExpansion:
    range: TruncationRange
    coeffs: np.ndarray
    n_terms: int
    fourier_terms: int
    #: largest imaginary part of the unfolded (signed-k) sum, a realness check
    imag_residual: float = 0.0

    @property
    def tail_ratio(self) -> float:
        """|A_N| / max_n |A_n|; small once the expansion has converged."""
        return float(abs(self.coeffs[-1]) / np.max(np.abs(self.coeffs)))


def compute_coefficients(
    model: ModelSpec,
    market: MarketParams,
    range: TruncationRange,
    N: int,
    M: int,
) -> LegendreExpansion:
    """Legendre coefficients A_0..A_N from M Fourier terms."""
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    a, b = range.a, range.b
    width = b - a
    k = np.arange(1, M + 1)
    try:
        phi = char_fn(model, market, -2.0 * np.pi * k / width)
    except ModelEvaluationError as exc:
        raise ModelEvaluationError(f"{exc} (Fourier terms k=1..{M})") from exc
    phi0 = complex(char_fn(model, market, 0.0))

    # j[n, k-1] = j_n(pi k)
    j = spherical_bessel_table(N, np.pi * k)
    shifted = phi * np.exp(1j * np.pi * k * (a + b) / width)
    s = j @ shifted  # sum_k phi_k e^{i theta k} j_n(pi k), per n
    n = np.arange(N + 1)
    i_pow = 1j ** (n % 4)
    delta = (n == 0).astype(float)

    coeffs = (2 * n + 1) / width * (phi0.real * delta + 2.0 * (i_pow * s).real)

    # Unfolded sum: the k < 0 terms use phi(+u) and j_n(-x) = (-1)^n j_n(x).
    phi_neg = char_fn(model, market, 2.0 * np.pi * k / width)
    s_neg = j @ (phi_neg * np.exp(-1j * np.pi * k * (a + b) / width))
    two_sided = (2 * n + 1) / width * (phi0 * delta + i_pow * (s + (-1.0) ** n * s_neg))
    imag_residual = float(np.max(np.abs(two_sided.imag)))

    coeffs.setflags(write=False)
    return LegendreExpansion(range, coeffs, N, M, imag_residual)


def density_eval(exp: LegendreExpansion, y):
    """sum_n A_n P_n(t(y)); not clipped, so may be slightly negative at low N."""
    rng = exp.range
    y_arr = np.asarray(y, dtype=float)
    tol = DOMAIN_TOL * max(1.0, abs(rng.a), abs(rng.b))
    if np.any(y_arr < rng.a - tol) or np.any(y_arr > rng.b + tol) or np.any(np.isnan(y_arr)):
        raise DomainError(f"y outside the truncation range [{rng.a}, {rng.b}]")
    t = np.clip(rng.to_unit(y_arr), -1.0, 1.0)
    p = legendre_eval_all(exp.n_terms, t)
    val = np.tensordot(exp.coeffs, p, axes=1)
    return float(val) if val.ndim == 0 else val


def density_grid(exp: LegendreExpansion, n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """(y, f(y)) on a uniform grid of ``n_points`` covering [a, b]."""
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points}")
    y = np.linspace(exp.range.a, exp.range.b, n_points)
    return y, density_eval(exp, y)


def density_csv(y, f, extra: dict | None = None) -> str:
    """CSV text with header ``y,f`` (plus any extra columns), 17 significant digits."""
    cols = {"y": np.asarray(y), "f": np.asarray(f)}
    if extra:
        cols.update({k: np.asarray(v) for k, v in extra.items()})
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for row in zip(*cols.values()):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _fmt(v) -> str:
    v = float(v)
    return repr(v) if not math.isfinite(v) else f"{v:.17g}"
