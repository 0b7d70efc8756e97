"""One-dimensional Black-Scholes kernel and the conditional call C(y)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .gauss_moments import norm_cdf
from .model import BasketContract, ConditionalLaw, MarketModel, conditional_law, strike_map


def _d1_d2(s, k, sigma, r, T):
    vol = sigma * math.sqrt(T)
    d1 = (np.log(s / k) + (r + 0.5 * sigma * sigma) * T) / vol
    return d1, d1 - vol


def bs_call(s, k, sigma, r, T):
    """European call; vectorized over ``s`` and ``k``.

    A nonpositive strike means certain exercise and the value is the
    forward ``s - k*exp(-rT)``; ``sigma == 0`` gives the discounted
    deterministic payoff.
    """
    s = np.asarray(s, dtype=float)
    k = np.asarray(k, dtype=float)
    disc = math.exp(-r * T)
    forward = s - k * disc
    if sigma == 0:
        out = np.maximum(forward, 0.0)
    else:
        pos = k > 0
        k_safe = np.where(pos, k, 1.0)
        d1, d2 = _d1_d2(s, k_safe, sigma, r, T)
        bs = s * norm_cdf(d1) - k_safe * disc * norm_cdf(d2)
        out = np.where(pos, np.maximum(bs, 0.0), forward)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class ConditionalPriceEvaluator:
    """C(y): the call on s1 with strike K(y) and volatility sigma_cond."""

    law: ConditionalLaw
    model: MarketModel
    contract: BasketContract

    @classmethod
    def build(cls, model: MarketModel, contract: BasketContract) -> "ConditionalPriceEvaluator":
        return cls(conditional_law(model, contract), model, contract)

    def strike(self, y):
        return strike_map(self.law, self.model, self.contract, y)

    def __call__(self, y):
        return conditional_price(self, y)

    def delta_s1(self, y):
        return conditional_delta_s1(self, y)

    def delta_s2(self, y):
        return conditional_delta_s2(self, y)


def conditional_price(ev: ConditionalPriceEvaluator, y):
    m = ev.model
    return bs_call(m.s1, ev.strike(y), ev.law.sigma_cond, m.r, ev.contract.maturity)


def _d2_or_inf(ev, y):
    if ev.law.sigma_cond == 0:
        raise ParameterError("closed-form deltas need sigma_cond > 0 (|rho| < 1)")
    k = np.asarray(ev.strike(y), dtype=float)
    pos = k > 0
    d1, d2 = _d1_d2(ev.model.s1, np.where(pos, k, 1.0), ev.law.sigma_cond, ev.model.r, ev.contract.maturity)
    return np.where(pos, d1, np.inf), np.where(pos, d2, np.inf)


def conditional_delta_s1(ev: ConditionalPriceEvaluator, y):
    """dC/ds1 = N(d1); the f_Z terms of the raw derivative cancel."""
    d1, _ = _d2_or_inf(ev, y)
    out = norm_cdf(d1)
    return out[()] if np.ndim(out) == 0 else out


def conditional_delta_s2(ev: ConditionalPriceEvaluator, y):
    """dC/ds2 = -exp(-rT) N(d2) dK/ds2 with dK/ds2 = -(w2/w1) exp(-A) exp((1-q) y)."""
    _, d2 = _d2_or_inf(ev, y)
    law, c = ev.law, ev.contract
    y = np.asarray(y, dtype=float)
    factor = c.w2 / c.w1 * np.exp(-law.A + (1.0 - law.mu_slope) * y)
    out = factor * math.exp(-ev.model.r * c.maturity) * norm_cdf(d2)
    return out[()] if np.ndim(out) == 0 else out
