import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BS, EXPERIMENTS, HESTON, KOU, MERTON, market
from legendre_pricing.errors import DomainError, ModelEvaluationError
from legendre_pricing.models import (
    BlackScholes,
    Heston,
    Kou,
    MarketParams,
    Merton,
    TruncationRange,
    char_fn,
    cumulant_check,
    cumulants,
    log_char_fn,
    truncation_range,
)

ALL_MODELS = [BS, MERTON, KOU, HESTON]
U_GRID = np.concatenate([np.linspace(-60, 60, 241), [-500.0, 1e3]])


def test_market_validation():
    for bad in [dict(spot=0), dict(strike=-1), dict(maturity=0)]:
        kw = dict(spot=1.0, rate=0.0, maturity=1.0, strike=1.0) | bad
        with pytest.raises(DomainError):
            MarketParams(**kw)


def test_model_validation():
    with pytest.raises(DomainError):
        BlackScholes(0.0)
    with pytest.raises(DomainError):
        Merton(0.2, -0.1, 0.0, 0.1)
    with pytest.raises(DomainError):
        Kou(0.2, 1.0, 0.4, 1.0, 5.0)  # eta1 must exceed 1
    with pytest.raises(DomainError):
        Kou(0.2, 1.0, 1.4, 10.0, 5.0)
    with pytest.raises(DomainError):
        Heston(1.0, 0.1, 0.3, -1.5, 0.1)
    # Feller condition 2 lam ubar >= eta^2 is not required
    Heston(0.1, 0.01, 1.0, 0.0, 0.01)


def test_bs_char_fn_examples():
    m = market(1.0)
    assert char_fn(BS, m, 1.0) == pytest.approx(cmath.exp(-0.03125 - 0.03125j), rel=1e-15)
    assert char_fn(BS, m, -1j) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.name)
@pytest.mark.parametrize("S0,K,r,T", [(1.0, 1.0, 0.0, 1.0), (1.3, 0.9, 0.05, 2.0), (0.7, 1.2, -0.01, 0.25)])
def test_characteristic_function_invariants(model, S0, K, r, T):
    m = market(T, K=K, S0=S0, r=r)
    assert char_fn(model, m, 0.0) == pytest.approx(1.0, abs=1e-15)
    phi = char_fn(model, m, U_GRID)
    assert np.all(np.abs(phi) <= 1.0 + 1e-15)
    np.testing.assert_allclose(char_fn(model, m, -U_GRID), np.conj(phi), rtol=1e-13, atol=1e-300)
    # martingale identity E[S_T] = S0 e^{rT}
    assert abs(char_fn(model, m, -1j) / (S0 * math.exp(r * T) / K) - 1) < 1e-10


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.name)
def test_strike_shift(model):
    u = np.linspace(-20, 20, 41)
    base = char_fn(model, market(1.0, K=1.0), u)
    shifted = char_fn(model, market(1.0, K=1.25), u)
    np.testing.assert_allclose(shifted, base * (1.0 / 1.25) ** (1j * u), rtol=1e-13)


def test_heston_matches_textbook_form():
    # the cancellation-free rewrite must equal the formula in its usual form
    m = market(0.1)
    lam, ub, eta, rho, u0 = HESTON.lam, HESTON.ubar, HESTON.eta, HESTON.rho, HESTON.u0
    for x in [0.3, -2.0, 15.0, 80.0]:
        q = lam - 1j * rho * eta * x
        d = cmath.sqrt(q * q + (x * x + 1j * x) * eta**2)
        g = (q - d) / (q + d)
        e = cmath.exp(-d * 0.1)
        ref = u0 / eta**2 * (1 - e) / (1 - g * e) * (q - d) + lam * ub / eta**2 * (
            0.1 * (q - d) - 2 * cmath.log((1 - g * e) / (1 - g))
        )
        assert complex(log_char_fn(HESTON, m, x)) == pytest.approx(ref, rel=1e-12)


def test_non_finite_char_fn_raises():
    with pytest.raises(ModelEvaluationError):
        char_fn(BS, market(1.0), np.array([0.0, 1e200]) * 1j)


def test_cumulant_examples():
    c1, c2, c4 = cumulants(BS, market(1.0))
    assert (c1, c2, c4) == (pytest.approx(-0.03125), pytest.approx(0.0625), 0.0)
    no_jumps = Merton(0.25, 0.0, -0.5, 0.3)
    assert cumulants(no_jumps, market(1.0)) == pytest.approx(tuple(cumulants(BS, market(1.0))))
    assert cumulants(KOU, market(1.0)).c2 == pytest.approx(0.0816, rel=1e-14)
    assert cumulants(HESTON, market(0.1)).c4 is None


@pytest.mark.parametrize("name", sorted(EXPERIMENTS))
def test_cumulant_check_experiments(name):
    model, T = EXPERIMENTS[name]
    assert cumulant_check(model, market(T)) < 1e-6


@settings(max_examples=40, deadline=None)
@given(
    lam=st.floats(0.2, 5.0),
    ubar=st.floats(0.01, 0.5),
    eta=st.floats(0.1, 1.5),
    rho=st.floats(-0.95, 0.95),
    u0=st.floats(0.01, 0.5),
    T=st.floats(0.05, 5.0),
)
def test_heston_c2_against_finite_differences(lam, ubar, eta, rho, u0, T):
    assert cumulant_check(Heston(lam, ubar, eta, rho, u0), market(T)) < 1e-5


@settings(max_examples=40, deadline=None)
@given(
    sigma=st.floats(0.05, 0.6),
    lam=st.floats(0.0, 3.0),
    p=st.floats(0.0, 1.0),
    eta1=st.floats(1.5, 30.0),
    eta2=st.floats(0.5, 30.0),
    T=st.floats(0.1, 5.0),
    r=st.floats(-0.02, 0.1),
)
def test_kou_cumulants_and_martingale(sigma, lam, p, eta1, eta2, T, r):
    model = Kou(sigma, lam, p, eta1, eta2)
    m = market(T, r=r)
    assert cumulant_check(model, m) < 1e-6
    assert abs(char_fn(model, m, -1j) / math.exp(r * T) - 1) < 1e-10


def test_fig1_range():
    rng = truncation_range(BS, market(1.0), L=7)
    assert rng.a == pytest.approx(-1.78125, abs=1e-15)
    assert rng.b == pytest.approx(1.71875, abs=1e-15)
    # printed to 4 decimals in the reference as -1.7813 and 1.7188
    assert abs(rng.a - -1.7813) <= 0.5e-4 + 1e-12
    assert abs(rng.b - 1.7188) <= 0.5e-4 + 1e-12
    assert rng.alpha == pytest.approx(1 / 56, rel=1e-14)
    assert rng.beta == pytest.approx(1.75)


def test_default_multipliers():
    m = market(1.0)
    assert truncation_range(BS, m) == truncation_range(BS, m, 7.0)
    assert truncation_range(MERTON, m) == truncation_range(MERTON, m, 10.0)
    assert truncation_range(KOU, m) == truncation_range(KOU, m, 10.0)
    rng = truncation_range(HESTON, market(0.1))
    c1, c2, _ = cumulants(HESTON, market(0.1))
    assert 0.5 * (rng.a + rng.b) == pytest.approx(c1, abs=1e-15)
    assert rng.beta == pytest.approx(12 * math.sqrt(abs(c2)), rel=1e-14)


def test_range_widens_with_sigma():
    widths = [truncation_range(BlackScholes(s), market(1.0)).width for s in (0.1, 0.2, 0.4)]
    assert widths == sorted(widths)


def test_range_validation():
    with pytest.raises(DomainError):
        TruncationRange(1.0, 1.0)
    with pytest.raises(DomainError):
        truncation_range(BS, market(1.0), L=0)
    rng = TruncationRange(-2.0, 1.0)
    assert -1 <= rng.alpha <= 1 and rng.contains_strike()
    assert not TruncationRange(0.5, 1.0).contains_strike()
