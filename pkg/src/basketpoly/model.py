"""Market/contract parameters and the conditional-law reduction.

Conditioning the basket payoff on the log-return ``Y2`` of the second asset
turns the two-asset price into

    price = w1 * exp(A) * E[exp(q * Y2) * C(Y2)],      q = rho * sigma1 / sigma2

where ``C(y)`` is a one-dimensional Black-Scholes call on ``s1`` with
volatility ``sqrt(1 - rho**2) * sigma1`` and strike ``K(y)``.  Everything in
this module is cheap and pure; the pricers evaluate ``strike_map`` in their
inner loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ParameterError


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParameterError(msg)


@dataclass(frozen=True)
class MarketModel:
    """Risk-neutral bivariate GBM: spots, volatilities, Brownian correlation, rate."""

    s1: float
    s2: float
    sigma1: float
    sigma2: float
    rho: float
    r: float

    def __post_init__(self):
        for name in ("s1", "s2", "sigma1", "sigma2", "rho", "r"):
            v = getattr(self, name)
            _require(math.isfinite(v), f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        _require(self.s1 > 0, "s1 must be positive")
        _require(self.s2 > 0, "s2 must be positive")
        _require(self.sigma1 > 0, "sigma1 must be positive")
        _require(self.sigma2 > 0, "sigma2 must be positive")
        _require(abs(self.rho) <= 1.0, "rho must lie in [-1, 1]")
        _require(self.r >= 0, "r must be nonnegative")

    @property
    def degenerate(self) -> bool:
        """True when |rho| = 1, i.e. the conditional law of Y1 given Y2 is a point mass."""
        return abs(self.rho) == 1.0

    def covariance(self) -> np.ndarray:
        """Annualized covariance of the log-returns (positive semidefinite for |rho| <= 1)."""
        c = self.rho * self.sigma1 * self.sigma2
        return np.array([[self.sigma1**2, c], [c, self.sigma2**2]])

    def replace(self, **changes: Any) -> "MarketModel":
        d = {k: getattr(self, k) for k in ("s1", "s2", "sigma1", "sigma2", "rho", "r")}
        d.update(changes)
        return MarketModel(**d)


@dataclass(frozen=True)
class BasketContract:
    """Payoff (w1*S1_T + w2*S2_T - strike)_+ paid at ``maturity``."""

    w1: float
    w2: float
    strike: float
    maturity: float

    def __post_init__(self):
        for name in ("w1", "w2", "strike", "maturity"):
            v = getattr(self, name)
            _require(math.isfinite(v), f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        _require(self.w1 > 0, "w1 must be positive")
        _require(self.strike >= 0, "strike must be nonnegative")
        _require(self.maturity > 0, "maturity must be positive")

    @classmethod
    def spread(cls, strike: float, maturity: float) -> "BasketContract":
        return cls(1.0, -1.0, strike, maturity)

    @property
    def is_spread(self) -> bool:
        return self.w1 == 1.0 and self.w2 == -1.0

    def replace(self, **changes: Any) -> "BasketContract":
        d = {k: getattr(self, k) for k in ("w1", "w2", "strike", "maturity")}
        d.update(changes)
        return BasketContract(**d)


@dataclass(frozen=True)
class ConditionalLaw:
    """Constants of the reduction to a one-dimensional call.

    ``mu(y) = mu_intercept + mu_slope * y`` is the conditional mean of Y1
    given Y2 = y; ``mean_y2`` and ``sd_y2`` describe Y2 itself.
    """

    A: float
    sigma_cond: float
    mu_intercept: float
    mu_slope: float
    mean_y2: float
    sd_y2: float
    degenerate: bool = field(default=False)

    def mu(self, y):
        return self.mu_intercept + self.mu_slope * y


@dataclass(frozen=True)
class Window:
    """Truncation interval [a, b] for Y2 and its image under standardization."""

    a: float
    b: float
    a_std: float
    b_std: float

    @property
    def width(self) -> float:
        return self.b - self.a


@dataclass
class PriceResult:
    value: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)


def conditional_law(model: MarketModel, contract: BasketContract) -> ConditionalLaw:
    s1, s2, rho, r, T = model.sigma1, model.sigma2, model.rho, model.r, contract.maturity
    q = s1 / s2 * rho
    A = -0.5 * q * (rho * s1 * s2 + 2 * r - s2**2) * T
    sigma_cond = math.sqrt(max(0.0, 1.0 - rho * rho)) * s1
    intercept = (r * (1 - q) + 0.5 * s1 * s2 * rho - 0.5 * s1**2) * T
    return ConditionalLaw(
        A=A,
        sigma_cond=sigma_cond,
        mu_intercept=intercept,
        mu_slope=q,
        mean_y2=(r - 0.5 * s2**2) * T,
        sd_y2=s2 * math.sqrt(T),
        degenerate=model.degenerate,
    )


def strike_map(law: ConditionalLaw, model: MarketModel, contract: BasketContract, y):
    """Random strike K(y) of the conditional call; accepts scalars or arrays.

    Negative values are legitimate for baskets with w2 > 0.
    """
    q = law.mu_slope
    y = np.asarray(y, dtype=float)
    k = (
        np.exp(-law.A)
        / contract.w1
        * (contract.strike * np.exp(-q * y) - contract.w2 * model.s2 * np.exp((1.0 - q) * y))
    )
    return k[()] if k.ndim == 0 else k


def strike_map_dy(law: ConditionalLaw, model: MarketModel, contract: BasketContract, y):
    """dK/dy, used by the Taylor pricer."""
    q = law.mu_slope
    y = np.asarray(y, dtype=float)
    dk = (
        np.exp(-law.A)
        / contract.w1
        * (-q * contract.strike * np.exp(-q * y) - (1.0 - q) * contract.w2 * model.s2 * np.exp((1.0 - q) * y))
    )
    return dk[()] if dk.ndim == 0 else dk


def make_window(a: float, b: float, law: ConditionalLaw) -> Window:
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ParameterError("window endpoints must be finite")
    if not a < b:
        raise ParameterError(f"inverted window [{a}, {b}]")
    return Window(a, b, (a - law.mean_y2) / law.sd_y2, (b - law.mean_y2) / law.sd_y2)


def benchmark(rho: float = -0.3) -> tuple[MarketModel, BasketContract]:
    """The reference spread: s1=100, s2=96, K=1, T=1, r=3%, sigma=(0.3, 0.1)."""
    return MarketModel(100.0, 96.0, 0.3, 0.1, rho, 0.03), BasketContract.spread(1.0, 1.0)
