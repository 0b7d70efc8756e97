"""Command-line front end.

    basketpoly price  --method chebyshev --rho -0.3
    basketpoly greeks --rho -0.3
    basketpoly table1 [--paths N]
    basketpoly sweep  strike_maturity|spot_surface|delta2_surface|converge|cond_fit

Unset flags fall back to ``--config file.json`` and then to the benchmark
spread.  Exit codes: 0 ok, 2 invalid arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, fields

import numpy as np

from . import bernstein, chebyshev
from .bs_core import ConditionalPriceEvaluator
from .errors import ConvergenceError, ParameterError
from .model import BasketContract, MarketModel, PriceResult, make_window
from .oracles import McConfig, mc_price, quad_price
from .taylor import taylor_coeffs, taylor_price

METHODS = ("chebyshev", "bernstein", "taylor2", "mc", "quad")
SWEEPS = ("strike_maturity", "spot_surface", "delta2_surface", "converge", "cond_fit")
TABLE1_RHOS = (-0.1, 0.1, -0.3, 0.3, -0.5, 0.5, -0.7, 0.7)


@dataclass
class RunConfig:
    s1: float = 100.0
    s2: float = 96.0
    sigma1: float = 0.3
    sigma2: float = 0.1
    rho: float = -0.3
    r: float = 0.03
    w1: float = 1.0
    w2: float = -1.0
    strike: float = 1.0
    maturity: float = 1.0
    method: str = "chebyshev"
    order: int = chebyshev.DEFAULT_ORDER
    quad_points: int = chebyshev.DEFAULT_QUAD_POINTS
    window_a: float = chebyshev.DEFAULT_WINDOW[0]
    window_b: float = chebyshev.DEFAULT_WINDOW[1]
    paths: int | None = None  # per-command default: 10**6 for price, 10**7 for table1
    seed: int = 42
    flat_ext: bool = False
    y_star: float | None = 0.0
    output: str = "human"

    def market(self) -> MarketModel:
        return MarketModel(self.s1, self.s2, self.sigma1, self.sigma2, self.rho, self.r)

    def contract(self) -> BasketContract:
        return BasketContract(self.w1, self.w2, self.strike, self.maturity)

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ParameterError(f"unknown method {self.method!r}")
        if self.output not in ("human", "csv"):
            raise ParameterError(f"unknown output {self.output!r}")
        self.market()
        self.contract()
        if self.method in ("chebyshev", "bernstein"):
            if self.order < 1:
                raise ParameterError("order must be >= 1")
            if not self.window_a < self.window_b:
                raise ParameterError("window-a must be < window-b")
        if self.method == "chebyshev" and self.quad_points < self.order:
            raise ParameterError("quad-points must be >= order")
        if self.paths is not None and self.paths < 2:
            raise ParameterError("paths must be >= 2")


def fmt(x) -> str:
    return f"{x:.9g}"


def run_method(cfg: RunConfig) -> PriceResult:
    m, c = cfg.market(), cfg.contract()
    window = (cfg.window_a, cfg.window_b)
    if cfg.method == "chebyshev":
        return chebyshev.cheb_price(m, c, cfg.order, cfg.quad_points, window, cfg.flat_ext)
    if cfg.method == "bernstein":
        return bernstein.bernstein_price(m, c, cfg.order, window)
    if cfg.method == "taylor2":
        return taylor_price(m, c, cfg.y_star)
    if cfg.method == "mc":
        res = mc_price(m, c, McConfig(cfg.paths or 1_000_000, cfg.seed))
        return PriceResult(res.price, "mc", {"std_error": res.std_error, "paths": res.paths_used})
    return PriceResult(quad_price(m, c), "quad", {})


def _write_csv(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def cmd_price(cfg: RunConfig, out=sys.stdout) -> PriceResult:
    t0 = time.perf_counter()
    res = run_method(cfg)
    elapsed = time.perf_counter() - t0
    se = res.diagnostics.get("std_error")
    if cfg.output == "csv":
        _write_csv(out, ["method", "price", "std_error"], [[res.method, res.value, "" if se is None else se]])
    else:
        line = f"{res.method}: {fmt(res.value)}"
        if se is not None:
            line += f"  (std error {fmt(se)})"
        print(line, file=out)
        print(f"time: {elapsed * 1e3:.1f} ms", file=out)
    return res


def cmd_greeks(cfg: RunConfig, out=sys.stdout) -> tuple[float, float]:
    m, c = cfg.market(), cfg.contract()
    args = (m, c, cfg.order, cfg.quad_points, (cfg.window_a, cfg.window_b), cfg.flat_ext)
    d1 = chebyshev.cheb_delta(1, *args)
    d2 = chebyshev.cheb_delta(2, *args)
    if cfg.output == "csv":
        _write_csv(out, ["delta_s1", "delta_s2"], [[d1, d2]])
    else:
        print(f"delta_s1: {fmt(d1)}\ndelta_s2: {fmt(d2)}", file=out)
    return d1, d2


def cmd_table1(cfg: RunConfig, out=sys.stdout) -> list[list[float]]:
    """Benchmark spread across the correlation grid: MC, Taylor at y*=0, Chebyshev n=15."""
    rows = []
    for rho in TABLE1_RHOS:
        m, c = cfg.market().replace(rho=rho), cfg.contract()
        mc = mc_price(m, c, McConfig(cfg.paths or 10_000_000, cfg.seed))
        ty = taylor_price(m, c, 0.0).value
        ch = chebyshev.cheb_price(m, c, 15, 100, (-4.0, 0.25)).value
        rows.append([rho, mc.price, ty, ch])
    _write_csv(out, ["rho", "mc", "taylor2", "cheb15"], rows)
    return rows


def _sweep_rows(kind: str, cfg: RunConfig):
    m, c = cfg.market(), cfg.contract()
    if kind == "strike_maturity":
        header = ["strike", "maturity", "price"]
        rows = []
        for T in np.arange(1, 13) / 12.0:
            for K in np.linspace(0.0, 10.0, 11):
                p = chebyshev.cheb_price(m, c.replace(strike=K, maturity=T), 10, cfg.quad_points,
                                         (cfg.window_a, cfg.window_b), cfg.flat_ext).value
                rows.append([float(K), float(T), p])
        return header, rows
    if kind in ("spot_surface", "delta2_surface"):
        grid = np.linspace(96.0, 106.0, 11)
        header = ["s1", "s2", "price" if kind == "spot_surface" else "delta_s2"]
        rows = []
        for a in grid:
            for b in grid:
                mm = m.replace(s1=float(a), s2=float(b))
                args = (mm, c, cfg.order, cfg.quad_points, (cfg.window_a, cfg.window_b), cfg.flat_ext)
                v = chebyshev.cheb_price(*args).value if kind == "spot_surface" else chebyshev.cheb_delta(2, *args)
                rows.append([float(a), float(b), v])
        return header, rows
    if kind == "converge":
        ref = quad_price(m, c)
        window = (cfg.window_a, cfg.window_b)
        rows = []
        for n in (2, 4, 6, 8, 10, 12, 15, 20, 25, 30):
            p = chebyshev.cheb_price(m, c, n, max(cfg.quad_points, n), window, cfg.flat_ext).value
            rows.append(["chebyshev", n, p, ref, p - ref])
        for n in (4, 10, 25, 50, 100, 200):
            p = bernstein.bernstein_price(m, c, n, window).value
            rows.append(["bernstein", n, p, ref, p - ref])
        return ["method", "order", "price", "reference", "error"], rows
    if kind == "cond_fit":
        ev = ConditionalPriceEvaluator.build(m, c)
        win = make_window(-1.5, 1.5, ev.law)
        ys = np.linspace(-1.5, 1.5, 301)
        cols = {"C": ev(ys)}
        for n in (4, 10, 100, 200):
            cols[f"bernstein_{n}"] = bernstein.eval_expansion(bernstein.expand(ev, n, win), ys)
        for n in (4, 10, 15):
            cols[f"chebyshev_{n}"] = chebyshev.eval_expansion(chebyshev.fit(ev, n, 100, win), ys)
        tx = taylor_coeffs(ev, ev.law.mean_y2)
        cols["taylor1"] = tx.c0 + tx.c1 * (ys - tx.center)
        cols["taylor2"] = tx(ys)
        rows = [[float(y)] + [float(v[i]) for v in cols.values()] for i, y in enumerate(ys)]
        return ["y"] + list(cols), rows
    raise ParameterError(f"unknown sweep {kind!r}")


def cmd_sweep(kind: str, cfg: RunConfig, out=sys.stdout):
    header, rows = _sweep_rows(kind, cfg)
    _write_csv(out, header, rows)
    return header, rows


_FLAG_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    # every flag defaults to None so config-file values survive unless overridden
    for name in ("s1", "s2", "sigma1", "sigma2", "rho", "r", "w1", "w2", "strike", "maturity"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--method", choices=METHODS, default=None)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--quad-points", dest="quad_points", type=int, default=None)
    p.add_argument("--window-a", dest="window_a", type=float, default=None)
    p.add_argument("--window-b", dest="window_b", type=float, default=None)
    p.add_argument("--paths", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--y-star", dest="y_star", type=float, default=None)
    p.add_argument("--flat-ext", dest="flat_ext", action="store_true", default=None)
    p.add_argument("--output", choices=("human", "csv"), default=None)
    p.add_argument("--config", default=None, help="JSON file with RunConfig keys")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="basketpoly", description="Two-asset basket/spread option pricer")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("price", "greeks", "table1"):
        _add_run_flags(sub.add_parser(name))
    sp = sub.add_parser("sweep")
    sp.add_argument("kind", choices=SWEEPS)
    _add_run_flags(sp)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(data) - set(_FLAG_TYPES)
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for name in _FLAG_TYPES:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "price":
            cmd_price(cfg, out)
        elif args.command == "greeks":
            cmd_greeks(cfg, out)
        elif args.command == "table1":
            cmd_table1(cfg, out)
        else:
            cmd_sweep(args.kind, cfg, out)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
