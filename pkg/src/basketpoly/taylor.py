"""Second-order Taylor pricer: expand C(y) at one point, integrate exactly."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bs_core import ConditionalPriceEvaluator, _d2_or_inf
from .errors import ParameterError
from .gauss_moments import mixed_exp_moments, norm_cdf
from .model import BasketContract, MarketModel, PriceResult, conditional_law, strike_map_dy


@dataclass(frozen=True)
class TaylorExpansion:
    center: float
    c0: float
    c1: float
    c2: float

    def __call__(self, y):
        dy = np.asarray(y, dtype=float) - self.center
        return self.c0 + self.c1 * dy + 0.5 * self.c2 * dy * dy


def conditional_price_dy(ev: ConditionalPriceEvaluator, y):
    """dC/dy = -exp(-rT) N(d2) K'(y)."""
    _, d2 = _d2_or_inf(ev, y)
    dk = strike_map_dy(ev.law, ev.model, ev.contract, y)
    return -math.exp(-ev.model.r * ev.contract.maturity) * norm_cdf(d2) * dk


def taylor_coeffs(ev: ConditionalPriceEvaluator, y_star: float, h: float = 1e-5) -> TaylorExpansion:
    if ev.law.sigma_cond == 0:
        raise ParameterError("Taylor expansion needs sigma_cond > 0 (|rho| < 1)")
    c0 = float(ev(y_star))
    c1 = float(conditional_price_dy(ev, y_star))
    c2 = float((conditional_price_dy(ev, y_star + h) - conditional_price_dy(ev, y_star - h)) / (2 * h))
    return TaylorExpansion(float(y_star), c0, c1, c2)


def taylor_price(model: MarketModel, contract: BasketContract, y_star: float | None = None) -> PriceResult:
    """Price with C replaced by its quadratic at ``y_star`` (default: mean of Y2).

    No truncation window: the moments are taken over the whole line.
    """
    ev = ConditionalPriceEvaluator.build(model, contract)
    law = ev.law
    if y_star is None:
        y_star = law.mean_y2
    tx = taylor_coeffs(ev, y_star)
    u = model.sigma1 * model.rho * math.sqrt(contract.maturity)
    M = mixed_exp_moments(u, 2, -math.inf, math.inf)
    delta, sd = law.mean_y2 - y_star, law.sd_y2
    # E[exp(uZ) (delta + sd Z)^m] for m = 0, 1, 2
    e0 = M[0]
    e1 = delta * M[0] + sd * M[1]
    e2 = delta**2 * M[0] + 2 * delta * sd * M[1] + sd**2 * M[2]
    pref = contract.w1 * math.exp(law.A + law.mu_slope * law.mean_y2)
    value = pref * (tx.c0 * e0 + tx.c1 * e1 + 0.5 * tx.c2 * e2)
    return PriceResult(value, "taylor2", {"center": tx.center, "c0": tx.c0, "c1": tx.c1, "c2": tx.c2})
