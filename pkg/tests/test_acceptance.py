"""End-to-end acceptance checks on the benchmark spread option.

Each test prints one PASS/FAIL line; the lines are repeated in the terminal summary.
"""

import functools
import math
import time

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import norm

from basketpoly import (
    BasketContract,
    ConditionalPriceEvaluator,
    MarketModel,
    McConfig,
    bernstein_price,
    cheb_delta,
    cheb_price,
    conditional_law,
    make_window,
    margrabe_price,
    mc_price,
    quad_price,
    taylor_price,
)
from basketpoly.bernstein import bernstein_basis, eval_expansion, expand
from basketpoly.chebyshev import cheb_T, fit
from basketpoly.gauss_moments import mixed_exp_moments, truncated_power_moments

RHOS = (-0.1, 0.1, -0.3, 0.3, -0.5, 0.5, -0.7, 0.7)
# reference columns: Monte Carlo, second-order Taylor at y* = 0, Chebyshev n = 15
REF_MC = dict(zip(RHOS, (14.292128, 13.56278, 14.9734, 12.8085, 15.6273, 11.9525, 16.2421, 11.03146)))
REF_TAYLOR = dict(zip(RHOS, (13.87090, 14.78882, 15.0065, 12.7901, 15.9238, 11.9646, 17.5217, 11.194724)))
REF_CHEB = dict(zip(RHOS, (14.29060779, 13.5649, 14.96293, 12.790289, 15.63157, 11.9566, 16.25209, 11.05286)))

SPREAD = BasketContract.spread(1.0, 1.0)


def market(rho):
    return MarketModel(100.0, 96.0, 0.3, 0.1, rho, 0.03)


@functools.lru_cache(maxsize=None)
def mc_run(rho):
    t0 = time.perf_counter()
    res = mc_price(market(rho), SPREAD, McConfig(10_000_000, 42))
    return res, time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def quad_ref(rho):
    return quad_price(market(rho), SPREAD)


def rows(items):
    return "; ".join(items)


def test_c1_chebyshev_reference_column(verdict):
    bad, slowest = [], 0.0
    for rho in RHOS:
        t0 = time.perf_counter()
        value = cheb_price(market(rho), SPREAD, 15, 100, (-4.0, 0.25)).value
        slowest = max(slowest, time.perf_counter() - t0)
        err = value - REF_CHEB[rho]
        if abs(err) > 0.02:
            bad.append(f"rho={rho:+.1f} got {value:.5f} ref {REF_CHEB[rho]} err {err:+.4f}")
    ok = not bad and slowest < 1.0
    detail = f"slowest {slowest * 1e3:.1f} ms; " + (rows(bad) if bad else "all 8 rows within 0.02")
    verdict("1 chebyshev n=15 vs reference", ok, detail)


def test_c2_monte_carlo_reference_column(verdict):
    bad, slowest = [], 0.0
    for rho in RHOS:
        res, dt = mc_run(rho)
        slowest = max(slowest, dt)
        tol = max(3 * res.std_error, 0.02)
        if abs(res.price - REF_MC[rho]) > tol:
            bad.append(f"rho={rho:+.1f} got {res.price:.5f} ref {REF_MC[rho]} tol {tol:.4f}")
    ok = not bad and slowest < 60.0
    detail = f"slowest {slowest:.2f} s; " + (rows(bad) if bad else "all 8 rows within max(3se, 0.02)")
    verdict("2 monte carlo 1e7 paths vs reference", ok, detail)


def test_c3_taylor_reference_column(verdict):
    bad = []
    for rho in RHOS:
        value = taylor_price(market(rho), SPREAD, 0.0).value
        if abs(value - REF_TAYLOR[rho]) > 0.03:
            bad.append(f"rho={rho:+.1f} got {value:.5f} ref {REF_TAYLOR[rho]}")
    verdict("3 taylor y*=0 vs reference", not bad, rows(bad) if bad else "all 8 rows within 0.03")


def test_c4_oracle_cross_agreement(verdict):
    bad = []
    for rho in RHOS:
        q = quad_ref(rho)
        res, _ = mc_run(rho)
        if abs(q - res.price) > 3 * res.std_error:
            bad.append(f"rho={rho:+.1f} quad-mc {q - res.price:+.4f} > 3se")
        ch = cheb_price(market(rho), SPREAD, 15, 100, (-4.0, 0.25)).value
        if abs(ch - q) > 0.02:
            bad.append(f"rho={rho:+.1f} cheb-quad {ch - q:+.4f}")
    verdict("4 quad/mc and chebyshev/quad agreement", not bad, rows(bad) if bad else "all rows agree")


def test_c5_margrabe(verdict):
    m, c = market(-0.3), BasketContract.spread(0.0, 1.0)
    exact = margrabe_price(m, c)
    dq = quad_price(m, c) - exact
    dc = cheb_price(m, c, 20, 100, (-6.0, 2.0)).value - exact
    ok = abs(dq) < 1e-6 and abs(dc) < 1e-2
    verdict("5 margrabe at K=0", ok, f"margrabe {exact:.6f}; quad err {dq:+.2e}; chebyshev n=20 err {dc:+.4f}")


def _quad(f, a, b):
    pts = [p for p in (-2.0, 0.0, 2.0) if a < p < b]
    val, _ = integrate.quad(lambda x: f(x) * norm.pdf(x), a, b, points=pts or None, limit=400,
                            epsabs=1e-14, epsrel=1e-13)
    return val


def test_c6_moment_engine(verdict):
    # relative tolerance once the reference exceeds one in magnitude
    def miss(x, ref, tol):
        return abs(x - ref) > tol * max(1.0, abs(ref))

    windows = [(-6.0, 6.0), (-6.0, -2.0), (-1.0, 1.0), (0.3, 0.7), (-2.5, 4.0), (2.0, 6.0)]
    worst_p = worst_m = 0.0
    bad = []
    for a, b in windows:
        table = truncated_power_moments(20, a, b)
        for k in range(21):
            ref = _quad(lambda x: x**k, a, b)
            worst_p = max(worst_p, abs(table[k] - ref) / max(1.0, abs(ref)))
            if miss(table[k], ref, 1e-10):
                bad.append(f"power k={k} [{a},{b}]")
        for u in (-3.0, -1.0, 0.0, 0.5, 3.0):
            vals = mixed_exp_moments(u, 15, a, b)
            for mm in range(16):
                ref = _quad(lambda x: math.exp(u * x) * x**mm, a, b)
                worst_m = max(worst_m, abs(vals[mm] - ref) / max(1.0, abs(ref)))
                if miss(vals[mm], ref, 1e-9):
                    bad.append(f"mixed u={u} m={mm} [{a},{b}]")
    detail = f"worst power {worst_p:.1e}, worst mixed {worst_m:.1e}" + (f"; {rows(bad[:5])}" if bad else "")
    verdict("6 moment engine vs quadrature", not bad, detail)


def test_c7_bernstein(verdict):
    m = market(-0.3)
    ev = ConditionalPriceEvaluator.build(m, SPREAD)
    w = make_window(-1.5, 1.5, ev.law)
    ys = np.linspace(-1.5, 1.5, 1201)
    errs = [float(np.max(np.abs(eval_expansion(expand(ev, n, w), ys) - ev(ys)))) for n in (4, 10, 100)]
    improving = errs[0] > errs[1] > errs[2]
    price = bernstein_price(m, SPREAD, 100, (-4.0, 0.25)).value
    ref = quad_price(m, SPREAD, window=(-4.0, 0.25))
    ok = improving and abs(price - ref) < 0.05
    detail = (f"sup errors n=4,10,100: {errs[0]:.3e}, {errs[1]:.3e}, {errs[2]:.3e}; "
              f"price n=100 {price:.5f} vs windowed quad {ref:.5f} (diff {price - ref:+.4f})")
    verdict("7 bernstein fit and price", ok, detail)


def test_c8_greeks(verdict):
    c = SPREAD
    worst = 0.0
    h = 1e-2
    for s1 in range(96, 107):
        for s2 in range(96, 107):
            m = MarketModel(float(s1), float(s2), 0.3, 0.1, -0.3, 0.03)
            for j, key in ((1, "s1"), (2, "s2")):
                up = cheb_price(m.replace(**{key: getattr(m, key) + h}), c).value
                dn = cheb_price(m.replace(**{key: getattr(m, key) - h}), c).value
                worst = max(worst, abs(cheb_delta(j, m, c) - (up - dn) / (2 * h)))
    m = market(-0.3)
    ys = np.linspace(-1.0, 0.5, 31)
    ev = ConditionalPriceEvaluator.build(m, c)
    worst_cond = 0.0
    hc = 1e-4
    for key, analytic in (("s1", ev.delta_s1(ys)), ("s2", ev.delta_s2(ys))):
        up = ConditionalPriceEvaluator.build(m.replace(**{key: getattr(m, key) + hc}), c)(ys)
        dn = ConditionalPriceEvaluator.build(m.replace(**{key: getattr(m, key) - hc}), c)(ys)
        worst_cond = max(worst_cond, float(np.max(np.abs(analytic - (up - dn) / (2 * hc)))))
    ok = worst < 5e-3 and worst_cond < 1e-6
    verdict("8 greeks vs finite differences", ok,
            f"chebyshev delta worst {worst:.2e} on 11x11 grid; conditional worst {worst_cond:.2e}")


def test_c9_identity_suite(verdict):
    rng = np.random.default_rng(2024)
    worst_exp = 0.0
    for _ in range(500):
        s1, s2 = rng.uniform(0.05, 0.8, 2)
        rho, r, T, y = rng.uniform(-0.99, 0.99), rng.uniform(0.0, 0.1), rng.uniform(0.1, 5.0), rng.uniform(-3, 3)
        law = conditional_law(MarketModel(100, 90, s1, s2, rho, r), BasketContract.spread(1.0, T))
        lhs = -(r - 0.5 * law.sigma_cond**2) * T + law.mu(y) - law.mu_slope * y
        worst_exp = max(worst_exp, abs(lhs - law.A))

    w = make_window(-4.0, 0.25, conditional_law(market(-0.3), SPREAD))
    ys = np.linspace(-4.0, 0.25, 301)
    worst_pou = max(
        float(np.max(np.abs(sum(bernstein_basis(nu, n, ys, w) for nu in range(n + 1)) - 1.0)))
        for n in (1, 4, 10, 50, 100)
    )

    worst_orth = 0.0
    n = 15
    for k in range(n + 1):
        exp = fit(lambda y, k=k: cheb_T(k, -1 + 2 * (y - w.a) / w.width), n, 100, w)
        target = np.zeros(n + 1)
        target[k] = 2.0 if k == 0 else 1.0
        worst_orth = max(worst_orth, float(np.max(np.abs(exp.coeffs - target))))

    worst_u0 = 0.0
    for a, b in ((-6.0, 6.0), (-1.0, 2.0), (0.5, 3.0), (-math.inf, 0.7)):
        p = truncated_power_moments(15, a, b).as_array()
        worst_u0 = max(worst_u0, float(np.max(np.abs(mixed_exp_moments(0.0, 15, a, b) - p) / np.maximum(1.0, np.abs(p)))))

    ok = worst_exp < 1e-12 and worst_pou < 1e-12 and worst_orth < 1e-10 and worst_u0 < 1e-12
    verdict("9 identity suite", ok,
            f"exponent {worst_exp:.1e}, partition {worst_pou:.1e}, orthogonality {worst_orth:.1e}, u=0 {worst_u0:.1e}")
