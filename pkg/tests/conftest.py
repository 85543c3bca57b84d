"""Shared model parameter sets (the calibrated sets used in the experiments)."""

import pytest

from legendre_pricing.models import BlackScholes, Heston, Kou, MarketParams, Merton

BS = BlackScholes(sigma=0.25)
MERTON = Merton(sigma=0.1765, lam=0.089, mu=-0.8898, gamma=0.4505)
KOU = Kou(sigma=0.16, lam=1.0, p=0.4, eta1=10.0, eta2=5.0)
HESTON = Heston(lam=0.9626, ubar=0.2957, eta=0.7544, rho=-0.2919, u0=0.0983)

# (model, maturity) pairs of the four experiments
EXPERIMENTS = {
    "black_scholes": (BS, 10.0),
    "merton": (MERTON, 3.0),
    "kou": (KOU, 1.0),
    "heston": (HESTON, 0.1),
}


def market(T: float, K: float = 1.0, S0: float = 1.0, r: float = 0.0) -> MarketParams:
    return MarketParams(spot=S0, rate=r, maturity=T, strike=K)


@pytest.fixture(params=sorted(EXPERIMENTS))
def experiment(request):
    model, T = EXPERIMENTS[request.param]
    return model, market(T)


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion."""
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS.values():
        terminalreporter.write_line(line)
