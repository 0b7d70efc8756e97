import math

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import norm

from basketpoly import benchmark, conditional_law


@pytest.fixture
def bench():
    return benchmark(-0.3)


def tilted_expectation(model, contract, fn, a=-math.inf, b=math.inf):
    """w1 exp(A) E[exp(q Y2) fn(Y2) 1_[a,b](Y2)] by adaptive quadrature in the standardized variable."""
    law = conditional_law(model, contract)
    za = max((a - law.mean_y2) / law.sd_y2, -14.0)
    zb = min((b - law.mean_y2) / law.sd_y2, 14.0)

    def integrand(z):
        y = law.mean_y2 + law.sd_y2 * z
        return math.exp(law.A + law.mu_slope * y) * float(fn(y)) * norm.pdf(z)

    pts = [p for p in (-3.0, 0.0, 3.0) if za < p < zb]
    val, _ = integrate.quad(integrand, za, zb, points=pts or None, limit=400, epsabs=1e-12, epsrel=1e-12)
    return contract.w1 * val


@pytest.fixture
def tilted():
    return tilted_expectation


def mc_tilted(model, contract, fn, n=1_000_000, seed=7):
    """Monte Carlo estimate of the same tilted expectation; returns (mean, std_error)."""
    law = conditional_law(model, contract)
    rng = np.random.default_rng(seed)
    y = law.mean_y2 + law.sd_y2 * rng.standard_normal(n)
    x = contract.w1 * np.exp(law.A + law.mu_slope * y) * fn(y)
    return x.mean(), x.std(ddof=1) / math.sqrt(n)


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record and print a one-line PASS/FAIL outcome, then assert it."""
    lines = request.config.stash[_VERDICTS]

    def report(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        lines.append(line)
        print(line, flush=True)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
