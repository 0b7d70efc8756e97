"""Chebyshev expansion of the conditional price and the resulting basket price.

The coefficients are estimated with the trapezoidal rule on the angle
variable (``N`` equal steps on [0, pi]); the expectation of each
``T_k^{a,b}(Y2)`` under the tilted law of Y2 is then exact, via the
power-basis form of ``T_k`` and truncated mixed moments.  Because the price
is linear in the coefficients, the same functional prices the deltas once the
node values are replaced by node deltas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .bs_core import ConditionalPriceEvaluator
from .errors import ParameterError
from .gauss_moments import mixed_moments_mp, norm_cdf, working_dps
from .model import BasketContract, MarketModel, PriceResult, Window, conditional_law, make_window

DEFAULT_ORDER = 15
DEFAULT_QUAD_POINTS = 100
DEFAULT_WINDOW = (-4.0, 0.25)
ORDER_CAP = 64


def cheb_T(k: int, x):
    """First-kind Chebyshev polynomial by the three-term recurrence."""
    if k < 0:
        raise ParameterError("Chebyshev index must be nonnegative")
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    t_prev, t = np.ones_like(x), x.copy()
    if k == 0:
        t = t_prev
    for _ in range(k - 1):
        t_prev, t = t, 2.0 * x * t - t_prev
    return t[()] if t.ndim == 0 else t


@lru_cache(maxsize=None)
def _power_coeffs_exact(k: int) -> tuple[int, ...]:
    out = []
    for l in range(k // 2 + 1):
        if 2 * l == k:
            out.append((-1) ** (k // 2))
        else:
            c = Fraction((-1) ** l * 2 ** (k - 2 * l - 1) * k, k - l) * math.comb(k - l, l)
            assert c.denominator == 1
            out.append(int(c))
    return tuple(out)


def cheb_power_coeffs(k: int, cap: int = ORDER_CAP) -> list[float]:
    """Coefficients b_l with T_k(x) = sum_l b_l x^(k-2l), l = 0..k//2."""
    if k < 0 or k > cap:
        raise ParameterError(f"Chebyshev index {k} outside [0, {cap}]")
    return [float(c) for c in _power_coeffs_exact(k)]


@dataclass(frozen=True)
class ChebyshevExpansion:
    order: int
    window: Window
    coeffs: np.ndarray
    quad_points: int
    flat_extension: bool = False
    edge_values: tuple[float, float] = (0.0, 0.0)  # C(a), C(b)


def angle_nodes(window: Window, N: int) -> tuple[np.ndarray, np.ndarray]:
    """theta_j = pi j / N and the matching abscissae; j = 0 maps to b, j = N to a."""
    theta = np.pi * np.arange(N + 1) / N
    y = window.a + window.width * (np.cos(theta) + 1.0) / 2.0
    return theta, y


def _check_orders(n, N):
    if n < 1:
        raise ParameterError("Chebyshev order must be >= 1")
    if n > ORDER_CAP:
        raise ParameterError(f"Chebyshev order {n} exceeds cap {ORDER_CAP}")
    if N < n:
        raise ParameterError(f"need quad_points >= order, got N={N} < n={n}")


def trapezoid_coeffs(node_values: np.ndarray, n: int, endpoint_terms: bool = True) -> np.ndarray:
    """c_k = (2/N) sum_j'' f(y_j) cos(k theta_j), k = 0..n (half weight at both ends)."""
    N = len(node_values) - 1
    theta = np.pi * np.arange(N + 1) / N
    w = np.ones(N + 1)
    w[0] = w[-1] = 0.5 if endpoint_terms else 0.0
    k = np.arange(n + 1)[:, None]
    return 2.0 / N * (np.cos(k * theta[None, :]) @ (w * node_values))


def fit(evaluator, n: int, N: int, window: Window, flat_extension: bool = False) -> ChebyshevExpansion:
    _check_orders(n, N)
    _, y = angle_nodes(window, N)
    values = np.asarray(evaluator(y), dtype=float)
    coeffs = trapezoid_coeffs(values, n)
    edges = (float(values[-1]), float(values[0]))
    return ChebyshevExpansion(n, window, coeffs, N, flat_extension, edges)


def eval_expansion(exp: ChebyshevExpansion, y, flat_extension: bool | None = None):
    flat = exp.flat_extension if flat_extension is None else flat_extension
    w = exp.window
    y = np.asarray(y, dtype=float)
    x = -1.0 + 2.0 * (y - w.a) / w.width
    total = 0.5 * exp.coeffs[0] * np.ones_like(x)
    for k in range(1, exp.order + 1):
        total = total + exp.coeffs[k] * cheb_T(k, x)
    inside = (y >= w.a) & (y <= w.b)
    if flat:
        out = np.where(y < w.a, exp.edge_values[0], np.where(y > w.b, exp.edge_values[1], total))
    else:
        out = np.where(inside, total, 0.0)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class _PriceFunctional:
    """price = w1 * (sum_k coeffs[k] * weights[k] + C(a)*tail_lo + C(b)*tail_hi)."""

    weights: np.ndarray
    tail_lo: float
    tail_hi: float


def _functional(model: MarketModel, contract: BasketContract, n: int, window: Window) -> _PriceFunctional:
    law = conditional_law(model, contract)
    u = model.sigma1 * model.rho * math.sqrt(contract.maturity)
    a_t, b_t = window.a_std, window.b_std
    weights = np.empty(n + 1)
    with mp.workdps(working_dps(2 * n)):
        M = mixed_moments_mp(u, n, a_t, b_t)
        shift = (2 * mp.mpf(law.mean_y2) - window.a - window.b) / (2 * mp.mpf(law.sd_y2))
        # G[k] = E[exp(uZ) (Z + shift)^k 1_window] exp(-u^2/2) folded in below
        G = [mp.fsum(math.comb(k, m) * shift**m * M[k - m] for m in range(k + 1)) for k in range(n + 1)]
        ratio = 2 * mp.mpf(law.sd_y2) / window.width
        damp = mp.exp(-mp.mpf(u) ** 2 / 2)
        weights[0] = 0.5 * float(damp * M[0])
        for k in range(1, n + 1):
            b = _power_coeffs_exact(k)
            s = mp.fsum(b[l] * ratio ** (k - 2 * l) * G[k - 2 * l] for l in range(k // 2 + 1))
            weights[k] = float(damp * s)
    # exp(-u^2/2) M[0] equals N(b~ - u) - N(a~ - u)
    tail_lo = float(norm_cdf(a_t - u))
    tail_hi = float(norm_cdf(-(b_t - u)))
    return _PriceFunctional(weights, tail_lo, tail_hi)


def _resolve_window(window, model, contract) -> Window:
    if isinstance(window, Window):
        return window
    a, b = DEFAULT_WINDOW if window is None else window
    return make_window(a, b, conditional_law(model, contract))


def cheb_price(
    model: MarketModel,
    contract: BasketContract,
    n: int = DEFAULT_ORDER,
    N: int = DEFAULT_QUAD_POINTS,
    window=None,
    flat_extension: bool = False,
) -> PriceResult:
    window = _resolve_window(window, model, contract)
    ev = ConditionalPriceEvaluator.build(model, contract)
    exp = fit(ev, n, N, window, flat_extension)
    fn = _functional(model, contract, n, window)
    value = float(exp.coeffs @ fn.weights)
    if flat_extension:
        value += exp.edge_values[0] * fn.tail_lo + exp.edge_values[1] * fn.tail_hi
    value *= contract.w1
    return PriceResult(
        value,
        "chebyshev",
        {"order": n, "quad_points": N, "window": (window.a, window.b), "coeffs": exp.coeffs.tolist(),
         "flat_extension": flat_extension},
    )


def cheb_delta(
    j: int,
    model: MarketModel,
    contract: BasketContract,
    n: int = DEFAULT_ORDER,
    N: int = DEFAULT_QUAD_POINTS,
    window=None,
    flat_extension: bool = False,
    endpoint_terms: bool = False,
) -> float:
    """Delta w.r.t. spot ``j`` (1 or 2) through differentiated coefficients.

    By default the two trapezoid end nodes carry no weight in the coefficient
    derivatives; ``endpoint_terms=True`` makes this the exact derivative of
    ``cheb_price``.
    """
    if j not in (1, 2):
        raise ParameterError("asset index must be 1 or 2")
    _check_orders(n, N)
    window = _resolve_window(window, model, contract)
    ev = ConditionalPriceEvaluator.build(model, contract)
    _, y = angle_nodes(window, N)
    d = np.asarray(ev.delta_s1(y) if j == 1 else ev.delta_s2(y), dtype=float)
    dc = trapezoid_coeffs(d, n, endpoint_terms)
    fn = _functional(model, contract, n, window)
    value = float(dc @ fn.weights)
    if flat_extension:
        value += d[-1] * fn.tail_lo + d[0] * fn.tail_hi
    return contract.w1 * value
