"""Truncated standard-normal moments.

    mu_{a,b}(k)      = E[Z^k 1{a <= Z <= b}]
    M(u, m; a, b)    = E[exp(uZ) Z^m 1{a <= Z <= b}]
                     = exp(u^2/2) sum_v C(m, v) u^(m-v) mu_{a-u,b-u}(v)

The second line is the m-th u-derivative of the truncated moment generating
function.  Endpoints may be +-inf.

Both the two-term recursion for ``mu`` and the binomial shift for ``M`` cancel
catastrophically in double precision on narrow or off-centre windows (the
recursion amplifies rounding by roughly (k-1)!!).  They are therefore carried
out in mpmath with guard digits scaled to the order, and rounded to float at
the end.  Callers that need to keep cancelling downstream (high-order
Bernstein) can ask for the mpmath values directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.special import ndtr

from .errors import ParameterError

DEFAULT_CAP = 64
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return out[()] if out.ndim == 0 else out


def norm_cdf(x):
    out = ndtr(np.asarray(x, dtype=float))
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class MomentTable:
    """``values[k] = E[Z^k 1{a <= Z <= b}]`` for k = 0..order_max."""

    order_max: int
    window: tuple[float, float]
    values: tuple[float, ...]

    def __getitem__(self, k: int) -> float:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


def working_dps(order: int) -> int:
    """Decimal digits that absorb the cancellation of order-``order`` sums."""
    return 30 + order


def _check_window(a, b):
    if math.isnan(a) or math.isnan(b):
        raise ParameterError("window endpoints must not be NaN")
    if not a < b:
        raise ParameterError(f"inverted window [{a}, {b}]")


def _check_order(k, cap):
    if k < 0:
        raise ParameterError("moment order must be nonnegative")
    if cap is not None and k > cap:
        raise ParameterError(f"moment order {k} exceeds cap {cap}")


def _endpoint(x, k):
    # x^(k-1) phi(x), zero at +-inf
    if mp.isinf(x):
        return mp.mpf(0)
    return x ** (k - 1) * mp.npdf(x)


def power_moments_mp(k_max: int, a, b) -> list:
    """Truncated power moments as mpf at the current mpmath precision."""
    a = mp.mpf(a)
    b = mp.mpf(b)
    vals = [mp.ncdf(b) - mp.ncdf(a)]
    if k_max >= 1:
        vals.append(_endpoint(a, 1) - _endpoint(b, 1))
    for k in range(2, k_max + 1):
        vals.append((k - 1) * vals[k - 2] + _endpoint(a, k) - _endpoint(b, k))
    return vals


def mixed_moments_mp(u, m_max: int, a, b) -> list:
    """E[exp(uZ) Z^m 1{a<=Z<=b}] for m = 0..m_max as mpf, current precision."""
    u = mp.mpf(u)
    shifted = power_moments_mp(m_max, mp.mpf(a) - u, mp.mpf(b) - u)
    scale = mp.exp(u * u / 2)
    out = []
    for m in range(m_max + 1):
        acc = mp.fsum(math.comb(m, v) * u ** (m - v) * shifted[v] for v in range(m + 1))
        out.append(scale * acc)
    return out


def truncated_power_moments(k_max: int, a: float, b: float, cap: int | None = DEFAULT_CAP) -> MomentTable:
    a, b = float(a), float(b)
    _check_window(a, b)
    _check_order(k_max, cap)
    with mp.workdps(working_dps(k_max)):
        vals = tuple(float(v) for v in power_moments_mp(k_max, a, b))
    return MomentTable(k_max, (a, b), vals)


def mixed_exp_moments(u: float, m_max: int, a: float, b: float, cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """Vector of mixed exponential-power moments for m = 0..m_max."""
    a, b = float(a), float(b)
    _check_window(a, b)
    _check_order(m_max, cap)
    with mp.workdps(working_dps(m_max) + int(abs(u) * abs(u))):
        vals = mixed_moments_mp(u, m_max, a, b)
        return np.array([float(v) for v in vals])


def mixed_exp_moment(u: float, m: int, a: float, b: float, cap: int | None = DEFAULT_CAP) -> float:
    return float(mixed_exp_moments(u, m, a, b, cap)[m])
