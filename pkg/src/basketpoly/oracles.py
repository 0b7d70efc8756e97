"""Reference pricers that do not go through the conditional reduction.

* ``mc_price``: terminal sampling of the correlated log-returns.
* ``quad_price``: deterministic 2-D quadrature of the discounted payoff.
* ``margrabe_price``: closed form for the zero-strike spread.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from numpy.polynomial.legendre import leggauss

from .errors import ConvergenceError, ParameterError
from .gauss_moments import norm_cdf, norm_pdf
from .model import BasketContract, MarketModel

BLOCK = 1 << 18


@dataclass(frozen=True)
class McConfig:
    paths: int = 1_000_000
    seed: int = 42
    antithetic: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.paths < 2:
            raise ParameterError("paths must be >= 2")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")


@dataclass(frozen=True)
class McResult:
    price: float
    std_error: float
    paths_used: int


def _cholesky_2x2(model: MarketModel) -> np.ndarray:
    # explicit factor so that |rho| = 1 does not trip a PD check
    s1, s2, rho = model.sigma1, model.sigma2, model.rho
    return np.array([[s1, 0.0], [rho * s2, s2 * math.sqrt(max(0.0, 1.0 - rho * rho))]])


def _block_rng(seed: int, block: int) -> np.random.Generator:
    # Philox is counter based; one substream per block keeps results independent of scheduling
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def simulate_log_returns(model: MarketModel, maturity: float, n: int, seed: int, block: int = 0) -> np.ndarray:
    """Draw ``n`` terminal log-return pairs (Y1, Y2), shape (n, 2)."""
    z = _block_rng(seed, block).standard_normal((n, 2))
    return _to_log_returns(model, maturity, z)


def _to_log_returns(model, maturity, z):
    drift = (model.r - 0.5 * np.array([model.sigma1**2, model.sigma2**2])) * maturity
    return drift + math.sqrt(maturity) * z @ _cholesky_2x2(model).T


def _payoff(model, contract, y):
    basket = contract.w1 * model.s1 * np.exp(y[:, 0]) + contract.w2 * model.s2 * np.exp(y[:, 1])
    return np.maximum(basket - contract.strike, 0.0)


def _run_block(model, contract, cfg, block, n):
    z = _block_rng(cfg.seed, block).standard_normal((n, 2))
    x = _payoff(model, contract, _to_log_returns(model, contract.maturity, z))
    if cfg.antithetic:
        x = 0.5 * (x + _payoff(model, contract, _to_log_returns(model, contract.maturity, -z)))
    mean = x.mean()
    return n, mean, float(((x - mean) ** 2).sum())


def mc_price(model: MarketModel, contract: BasketContract, cfg: McConfig = McConfig()) -> McResult:
    """Discounted Monte Carlo mean of the basket payoff.

    With antithetic variates each pair is averaged into one sample, so
    ``paths // 2`` independent samples enter the standard error.
    """
    samples = cfg.paths // 2 if cfg.antithetic else cfg.paths
    sizes = [BLOCK] * (samples // BLOCK)
    if samples % BLOCK:
        sizes.append(samples % BLOCK)
    jobs = list(enumerate(sizes))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(lambda j: _run_block(model, contract, cfg, *j), jobs))
    else:
        parts = [_run_block(model, contract, cfg, *j) for j in jobs]
    # Chan et al. pairwise merge, in block order
    count, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in parts:
        tot = count + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta * delta * count * nb / tot
        count = tot
    disc = math.exp(-model.r * contract.maturity)
    var = m2 / (count - 1) if count > 1 else 0.0
    return McResult(float(disc * mean), disc * math.sqrt(var / count), count * (2 if cfg.antithetic else 1))


@dataclass(frozen=True)
class QuadSpec:
    nodes: int = 64
    tol: float = 1e-9
    max_nodes: int = 1024
    span: float = 12.0  # standard deviations covered by the inner and windowed rules

    def __post_init__(self):
        if self.nodes < 64:
            raise ParameterError("quadrature needs at least 64 nodes per dimension")


def _outer_rule(n, spec, z_window):
    if z_window is None:
        x, w = hermegauss(n)
        return x, w / math.sqrt(2 * math.pi)
    lo, hi = max(z_window[0], -spec.span), min(z_window[1], spec.span)
    if lo >= hi:
        return np.zeros(0), np.zeros(0)
    x, w = leggauss(n)
    z = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    return z, 0.5 * (hi - lo) * w * norm_pdf(z)


def _quad_once(model, contract, n, spec, z_window):
    T = contract.maturity
    sq = math.sqrt(T)
    rho = model.rho
    rc = math.sqrt(max(0.0, 1.0 - rho * rho))
    m1 = (model.r - 0.5 * model.sigma1**2) * T
    m2 = (model.r - 0.5 * model.sigma2**2) * T
    z2, w2 = _outer_rule(n, spec, z_window)
    if z2.size == 0:
        return 0.0
    y2 = m2 + model.sigma2 * sq * z2
    base1 = m1 + model.sigma1 * sq * rho * z2  # Y1 = base1 + sigma1 sqrt(T) rc Z1
    a1 = contract.w1 * model.s1
    c = contract.strike - contract.w2 * model.s2 * np.exp(y2)  # exercise iff a1 e^{Y1} > c
    vol1 = model.sigma1 * sq * rc
    if vol1 == 0.0:
        inner = np.maximum(a1 * np.exp(base1) - c, 0.0)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            zstar = np.where(c > 0, (np.log(np.where(c > 0, c, 1.0) / a1) - base1) / vol1, -np.inf)
        lo = np.clip(zstar, -spec.span, spec.span)
        x, w = leggauss(n)
        half = 0.5 * (spec.span - lo)
        z1 = half[:, None] * (x[None, :] + 1.0) + lo[:, None]
        integrand = (a1 * np.exp(base1[:, None] + vol1 * z1) - c[:, None]) * norm_pdf(z1)
        inner = half * (integrand @ w)
        inner = np.where(zstar >= spec.span, 0.0, inner)
    return math.exp(-model.r * T) * float(inner @ w2)


def quad_price(model: MarketModel, contract: BasketContract, grid: QuadSpec = QuadSpec(), window=None) -> float:
    """Discounted expected payoff by nested quadrature over (Z2, Z1).

    Z2 (driving asset 2) uses Gauss-Hermite nodes, or Gauss-Legendre on the
    standardized window when ``window=(a, b)`` restricts Y2.  The inner Z1
    integral runs Gauss-Legendre over the exercise region only, so the payoff
    kink sits on the boundary.  Node counts double until successive values
    agree to ``grid.tol`` (relative above 1).
    """
    z_window = None
    if window is not None:
        a, b = window
        if not a < b:
            raise ParameterError(f"inverted window [{a}, {b}]")
        m2 = (model.r - 0.5 * model.sigma2**2) * contract.maturity
        sd = model.sigma2 * math.sqrt(contract.maturity)
        z_window = ((a - m2) / sd, (b - m2) / sd)
    n = grid.nodes
    prev = _quad_once(model, contract, n, grid, z_window)
    while n < grid.max_nodes:
        n *= 2
        cur = _quad_once(model, contract, n, grid, z_window)
        if abs(cur - prev) <= grid.tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ConvergenceError(f"quadrature did not converge to {grid.tol} with {grid.max_nodes} nodes")


def margrabe_price(model: MarketModel, contract: BasketContract) -> float:
    """Exchange option s1 -> s2 (spread with zero strike)."""
    if not contract.is_spread:
        raise ParameterError("Margrabe formula needs spread weights (1, -1)")
    if contract.strike != 0:
        raise ParameterError("Margrabe formula needs a zero strike")
    s1, s2, T = model.s1, model.s2, contract.maturity
    var = model.sigma1**2 + model.sigma2**2 - 2 * model.rho * model.sigma1 * model.sigma2
    vol = math.sqrt(max(var, 0.0) * T)
    if vol < 1e-14:
        return max(s1 - s2, 0.0)
    d1 = (math.log(s1 / s2) + 0.5 * vol * vol) / vol
    return float(s1 * norm_cdf(d1) - s2 * norm_cdf(d1 - vol))
