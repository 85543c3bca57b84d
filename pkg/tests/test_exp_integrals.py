import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legendre_pricing.errors import ConvergenceError, DomainError, InstabilityError
from legendre_pricing.exp_integrals import (
    ExpIntegralRequest,
    u_direct,
    u_forward,
    u_olver,
    u_quadrature,
    w_terms,
)

R = ExpIntegralRequest
FIG1_ALPHA = 1.0 / 56.0  # strike point of the range [-1.78125, 1.71875]


def _mp_u(alpha, beta, n):
    """High-precision reference: mpmath quadrature split at the zeros' scale."""
    with mpmath.workdps(50):
        f = lambda t: mpmath.exp(beta * t) * mpmath.legendre(n, t)  # noqa: E731
        pts = mpmath.linspace(alpha, 1, max(2, n + 2))
        return float(mpmath.quad(f, pts))


def _rel(x, ref):
    return np.abs(np.asarray(x) - ref) / np.abs(ref)


# -- request validation ---------------------------------------------------------

def test_request_validation():
    with pytest.raises(DomainError):
        R(0.0, 0.0, 3)
    with pytest.raises(DomainError):
        R(1.5, 1.0, 3)
    with pytest.raises(DomainError):
        R(0.0, 1.0, -1)


# -- direct formula ---------------------------------------------------------------

def test_direct_examples():
    assert u_direct(R(0.0, 1.0, 0)).u[0] == pytest.approx(math.e - 1, rel=1e-15)
    assert u_direct(R(-1.0, 2.0, 0)).u[0] == pytest.approx((math.exp(2) - math.exp(-2)) / 2, rel=1e-15)
    d = u_direct(R(0.2, 3.0, 4)).u
    q = u_quadrature(R(0.2, 3.0, 4)).u
    np.testing.assert_allclose(d, q, rtol=1e-11)


def test_direct_cap():
    u_direct(R(0.1, 1.0, 25))
    with pytest.raises(InstabilityError, match="instability"):
        u_direct(R(0.1, 1.0, 26))


@pytest.mark.parametrize("alpha,beta,n", [(0.3, 1.0, 20), (-0.9, 10.0, 20), (0.5, 40.0, 25)])
def test_direct_matches_mpmath_quadrature(alpha, beta, n):
    assert u_direct(R(alpha, beta, n)).u[n] == pytest.approx(_mp_u(alpha, beta, n), rel=1e-13)


# -- forward recurrence -------------------------------------------------------

def test_forward_low_degree_agrees_with_direct():
    np.testing.assert_allclose(u_forward(R(0.0, 5.0, 5)).u, u_direct(R(0.0, 5.0, 5)).u, rtol=1e-10)


def test_forward_seed_is_exact():
    for alpha, beta in [(0.3, 2.0), (-0.7, 0.5)]:
        assert u_forward(R(alpha, beta, 1)).u[1] == u_direct(R(alpha, beta, 1)).u[1]


def test_forward_diverges():
    n = 60
    f = u_forward(R(0.0, 5.0, n))
    q = u_quadrature(R(0.0, 5.0, n)).u
    assert _rel(f.u[n], q[n]) > 1e3
    # and the error estimate flags it
    assert f.est_error[n] > abs(q[n])


# -- Olver ------------------------------------------------------------------------

def test_olver_degree_zero():
    for alpha, beta in [(0.3, 2.0), (-0.99, 30.0), (0.0, 1e-3)]:
        res = u_olver(R(alpha, beta, 0))
        # W_0 = (e^beta - e^{beta alpha}) / beta, written without cancellation
        w0 = math.exp(beta * alpha) * math.expm1(beta * (1 - alpha)) / beta
        assert res.u[0] == pytest.approx(w0, rel=1e-14)
        # Y_0 = U_0 - W_0 vanishes up to rounding: cancellation in the plain
        # W_0 formula at small beta, exp() argument rounding at large beta
        eps = np.finfo(float).eps
        assert abs(res.info["y"][0]) <= eps * (4 * math.exp(beta) / beta + 8 * (1 + beta) * w0)


def test_olver_integration_by_parts_value():
    # Y_1 = U_1 - W_1 = -U_0 / beta at alpha = 0, beta = 1
    res = u_olver(R(0.0, 1.0, 1))
    assert res.info["y"][1] == pytest.approx(-(math.e - 1), rel=1e-14)


@pytest.mark.parametrize("alpha", [0.46875, FIG1_ALPHA])
def test_olver_matches_quadrature_on_fig1_range(alpha):
    o = u_olver(R(alpha, 1.75, 120)).u
    q = u_quadrature(R(alpha, 1.75, 120)).u
    mask = np.abs(q) > 1e-250
    assert np.max(_rel(o[mask], q[mask])) < 1e-10


@pytest.mark.parametrize(
    "alpha,beta,n",
    [(-0.9, 40.0, 30), (-0.9, 40.0, 120), (FIG1_ALPHA, 5.0, 80), (0.9, 10.0, 100), (-0.5, 0.05, 40)],
)
def test_olver_matches_high_precision(alpha, beta, n):
    # includes cases where |U_n| is many orders below exp(beta)
    assert u_olver(R(alpha, beta, n)).u[n] == pytest.approx(_mp_u(alpha, beta, n), rel=1e-12)


def test_y_formulation_agrees_where_well_conditioned():
    u = u_olver(R(0.2, 1.5, 60)).u
    y = u_olver(R(0.2, 1.5, 60), formulation="y").u
    np.testing.assert_allclose(y, u, rtol=1e-10)


def test_olver_info_and_estimates():
    res = u_olver(R(0.1, 3.0, 40))
    assert res.method == "olver"
    assert res.info["n_prime"] > 40
    np.testing.assert_allclose(res.info["y"], res.u - w_terms(0.1, 3.0, 40), atol=1e-15 * math.exp(3))
    assert np.all(res.est_error <= 1e-14 * np.abs(res.u))


def test_olver_convergence_failure_reports_index():
    with pytest.raises(ConvergenceError) as info:
        u_olver(R(0.1, 50.0, 10), n_prime_max=12)
    assert info.value.last_index == 12


def test_olver_rejects_tight_tolerance():
    with pytest.raises(DomainError):
        u_olver(R(0.1, 1.0, 5), tol=1e-16)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 12.0))
def test_olver_monotone_decay_on_full_interval(beta):
    start = math.ceil(3 * beta)
    u = np.abs(u_olver(R(-1.0, beta, start + 60)).u)[start:]
    u = u[u > 1e-250]
    assert np.all(np.diff(u) < 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.95, 0.95), st.floats(0.2, 12.0))
def test_olver_decay_envelope_interior_alpha(alpha, beta):
    # With alpha inside (-1, 1) the endpoint term e^{beta alpha} P_n(alpha)-type
    # oscillation dominates: |U_n| is not monotone but stays under an
    # n^{-3/2} envelope.
    start = math.ceil(3 * beta)
    n_max = start + 100
    u = np.abs(u_olver(R(alpha, beta, n_max)).u)
    n = np.arange(n_max + 1)
    bound = 2 * math.exp(beta * alpha) / (1 - alpha**2) ** 0.25
    assert np.all((n**1.5 * u)[start:] <= bound)


# -- oracle triangle ----------------------------------------------------------

GRID = [(a, b) for a in (-0.9, 0.0, 0.9) for b in (0.1, 1.0, 10.0, 40.0)]


@pytest.mark.parametrize("alpha,beta", GRID)
def test_direct_and_olver_agree(alpha, beta):
    d = u_direct(R(alpha, beta, 20)).u
    o = u_olver(R(alpha, beta, 20)).u
    assert np.max(_rel(o, d)) < 1e-9


@pytest.mark.parametrize("alpha,beta", GRID)
def test_quadrature_agrees_within_its_conditioning(alpha, beta):
    # The quadrature sums terms of size exp(beta) to reach |U_n| that can be
    # far smaller, so its attainable accuracy is set by its own est_error.
    d = u_direct(R(alpha, beta, 20)).u
    q = u_quadrature(R(alpha, beta, 20))
    well = q.est_error < 1e-11 * np.abs(d)
    assert np.max(_rel(q.u, d)[well], initial=0.0) < 1e-9
    assert np.all(np.abs(q.u - d) <= 10 * q.est_error + 1e-9 * np.abs(d))


# -- quadrature ---------------------------------------------------------------------

def test_quadrature_examples():
    assert u_quadrature(R(0.0, 0.001, 0)).u[0] == pytest.approx(1.0005, rel=1e-6)
    assert u_quadrature(R(-1.0, 1.0, 1)).u[1] == pytest.approx(2 / math.e, rel=1e-14)
    q = u_quadrature(R(0.5, 10.0, 7)).u[7]
    assert q == pytest.approx(u_direct(R(0.5, 10.0, 7)).u[7], rel=1e-9)


def test_quadrature_error_floor():
    res = u_quadrature(R(0.0, 2.0, 10))
    assert np.all(res.est_error >= 1e-13 * math.exp(2.0))
