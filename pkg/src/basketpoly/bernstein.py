"""Bernstein expansion of the conditional price on [a, b] and its basket price.

Each node value C(a + (b-a) v/n) is weighted by the exact tilted expectation
of the v-th Bernstein polynomial of Y2, built from truncated mixed moments:

    E[exp(qY) (Y-a)^v (Y-b)^(n-v) 1]
      = sum_k C(v,k) (b-a)^(v-k) E[exp(qY) (Y-b)^(n-v+k) 1]
      = sum_k C(v,k) (b-a)^(v-k) sum_m C(n-v+k, m) (mean-b)^(n-v+k-m) sd^m
                                         * exp(q*mean) * E[exp(uZ) Z^m 1]

The alternating sums lose about n*log10(2) digits, so the whole assembly runs
in mpmath at a precision that grows with n; only the final weights are
rounded to float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.stats import binom

from .bs_core import ConditionalPriceEvaluator
from .errors import ParameterError
from .gauss_moments import mixed_moments_mp, working_dps
from .model import BasketContract, MarketModel, PriceResult, Window, conditional_law, make_window

ORDER_CAP = 256


@dataclass(frozen=True)
class BernsteinExpansion:
    order: int
    window: Window
    node_values: np.ndarray


def bernstein_basis(nu: int, n: int, y, window: Window):
    """b_{nu,n}(y; a, b), zero outside [a, b]."""
    if not 0 <= nu <= n:
        raise ParameterError(f"Bernstein index {nu} outside [0, {n}]")
    y = np.asarray(y, dtype=float)
    t = (y - window.a) / window.width
    inside = (t >= 0.0) & (t <= 1.0)
    out = np.where(inside, binom.pmf(nu, n, np.clip(t, 0.0, 1.0)), 0.0)
    return out[()] if out.ndim == 0 else out


def expand(evaluator, n: int, window: Window) -> BernsteinExpansion:
    if n < 1:
        raise ParameterError("Bernstein order must be >= 1")
    nodes = window.a + window.width * np.arange(n + 1) / n
    return BernsteinExpansion(n, window, np.asarray(evaluator(nodes), dtype=float))


def eval_expansion(exp: BernsteinExpansion, y):
    y = np.asarray(y, dtype=float)
    w = exp.window
    t = np.clip((y - w.a) / w.width, 0.0, 1.0)
    basis = binom.pmf(np.arange(exp.order + 1)[:, None], exp.order, np.atleast_1d(t)[None, :])
    out = exp.node_values @ basis
    out = np.where((np.atleast_1d(y) >= w.a) & (np.atleast_1d(y) <= w.b), out, 0.0)
    return out[0] if y.ndim == 0 else out


def bernstein_weights(model: MarketModel, contract: BasketContract, n: int, window: Window) -> np.ndarray:
    """exp(A) E[exp(qY2) b_{v,n}(Y2) 1_[a,b](Y2)] for v = 0..n."""
    law = conditional_law(model, contract)
    u = model.sigma1 * model.rho * math.sqrt(contract.maturity)
    with mp.workdps(working_dps(2 * n)):
        a, b = mp.mpf(window.a), mp.mpf(window.b)
        width = b - a
        mean, sd = mp.mpf(law.mean_y2), mp.mpf(law.sd_y2)
        M = mixed_moments_mp(u, n, window.a_std, window.b_std)
        # J[l] = E[exp(qY) (Y - b)^l 1] / exp(q*mean)
        d = mean - b
        J = [mp.fsum(math.comb(l, m) * d ** (l - m) * sd**m * M[m] for m in range(l + 1)) for l in range(n + 1)]
        pref = mp.exp(mp.mpf(law.A) + mp.mpf(law.mu_slope) * mean)
        widths = [width**p for p in range(n + 1)]
        out = np.empty(n + 1)
        for v in range(n + 1):
            inner = mp.fsum(math.comb(v, k) * widths[v - k] * J[n - v + k] for k in range(v + 1))
            sign = -1 if (n - v) % 2 else 1
            out[v] = float(sign * math.comb(n, v) * pref * inner / widths[n])
    return out


def bernstein_price(model: MarketModel, contract: BasketContract, n: int, window, cap: int = ORDER_CAP) -> PriceResult:
    if n < 1:
        raise ParameterError("Bernstein order must be >= 1")
    if n > cap:
        raise ParameterError(f"Bernstein order {n} exceeds cap {cap}")
    if not isinstance(window, Window):
        window = make_window(*window, conditional_law(model, contract))
    ev = ConditionalPriceEvaluator.build(model, contract)
    exp = expand(ev, n, window)
    weights = bernstein_weights(model, contract, n, window)
    value = contract.w1 * float(exp.node_values @ weights)
    return PriceResult(value, "bernstein", {"order": n, "window": (window.a, window.b)})
