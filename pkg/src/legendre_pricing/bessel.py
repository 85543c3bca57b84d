"""Spherical Bessel functions j_n(x) by Miller's backward recurrence.

The coefficient formula needs J_{n+1/2}(pi k) for n = 0..N and k = 1..M. With
``J_{n+1/2}(x) = sqrt(2x/pi) j_n(x)`` this reduces to spherical Bessel values
at the integer multiples of pi. Upward recurrence from j_0, j_1 is unstable
once n exceeds x, so the whole table is generated downward from an index
well past max(n_max, x) and normalised against the closed forms of j_0 and
j_1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_RESCALE_AT = 1e250
_NORMALISATION_TOL = 1e-13
_MAX_RETRIES = 8


@dataclass(frozen=True)
class SphericalBesselTable:
    """Values j_0(x)..j_{n_max}(x) at a single positive argument."""

    x: float
    values: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.values) - 1


def _start_extra(m: int) -> int:
    return max(20, math.ceil(math.sqrt(40 * max(m, 1))))


def _downward(n_max: int, x: np.ndarray, start: int) -> np.ndarray:
    """Unnormalised minimal solution of the recurrence, rows 0..n_max."""
    f = np.zeros((start + 2, x.size))
    f[start] = 1.0
    inv_x = 1.0 / x
    for n in range(start, 0, -1):
        f[n - 1] = (2 * n + 1) * inv_x * f[n] - f[n + 1]
        big = np.abs(f[n - 1]) > _RESCALE_AT
        if np.any(big):
            f[n - 1:, big] /= _RESCALE_AT

    # Least-squares fit to (j_0, j_1): j_0 vanishes at x = k*pi, j_1 does not.
    s, c = np.sin(x), np.cos(x)
    j0 = s / x
    j1 = s / x**2 - c / x
    size = np.maximum(np.abs(f[0]), np.abs(f[1]))
    g0, g1 = f[0] / size, f[1] / size
    scale = (j0 * g0 + j1 * g1) / (g0**2 + g1**2) / size
    out = f[: n_max + 1] * scale
    out[0] = j0
    if n_max >= 1:
        out[1] = j1
    return out


def spherical_bessel_table(n_max: int, x) -> np.ndarray:
    """j_n(x) for n = 0..n_max and every x in a 1-d array.

    Returns an array of shape ``(n_max + 1, len(x))``. Values that underflow
    are returned as exact zeros.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise DomainError("x must be scalar or 1-d")
    if np.any(~(x > 0)):
        raise DomainError("spherical Bessel argument must be > 0")
    if x.size == 0:
        return np.zeros((n_max + 1, 0))

    m = max(n_max, math.ceil(float(x.max())))
    extra = _start_extra(m)
    table = _downward(n_max, x, m + extra)
    for _ in range(_MAX_RETRIES):
        extra *= 2
        refined = _downward(n_max, x, m + extra)
        if np.all(np.abs(refined - table) <= _NORMALISATION_TOL * _local_scale(refined) + 1e-280):
            return refined
        table = refined
    return table


def _local_scale(v: np.ndarray) -> np.ndarray:
    # Neighbour magnitudes stand in at isolated zeros such as j_0(k pi).
    a = np.abs(v)
    out = a.copy()
    out[1:] = np.maximum(out[1:], a[:-1])
    out[:-1] = np.maximum(out[:-1], a[1:])
    return out


def spherical_bessel_all(n_max: int, x: float) -> SphericalBesselTable:
    """j_0(x)..j_{n_max}(x) for one positive argument."""
    if not x > 0:
        raise DomainError(f"spherical Bessel argument must be > 0, got {x}")
    values = spherical_bessel_table(n_max, [x])[:, 0]
    values.setflags(write=False)
    return SphericalBesselTable(x=float(x), values=values)


def bessel_half_integer(n: int, k: int) -> float:
    """J_{n+1/2}(pi k) = sqrt(2k) j_n(pi k) for integer k >= 1."""
    if n < 0:
        raise DomainError(f"order must be >= 0, got {n}")
    if k < 1 or int(k) != k:
        raise DomainError(f"k must be a positive integer, got {k}")
    return math.sqrt(2 * k) * float(spherical_bessel_all(n, math.pi * k).values[n])
