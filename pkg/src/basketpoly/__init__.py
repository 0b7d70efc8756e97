"""Two-asset basket and spread options priced by polynomial approximation of a conditional call."""

from .bernstein import bernstein_price
from .bs_core import ConditionalPriceEvaluator, bs_call
from .chebyshev import cheb_delta, cheb_price
from .errors import ConvergenceError, ParameterError
from .model import BasketContract, MarketModel, PriceResult, Window, benchmark, conditional_law, make_window
from .oracles import McConfig, McResult, margrabe_price, mc_price, quad_price
from .taylor import taylor_price

__all__ = [
    "BasketContract",
    "ConditionalPriceEvaluator",
    "ConvergenceError",
    "MarketModel",
    "McConfig",
    "McResult",
    "ParameterError",
    "PriceResult",
    "Window",
    "benchmark",
    "bernstein_price",
    "bs_call",
    "cheb_delta",
    "cheb_price",
    "conditional_law",
    "make_window",
    "margrabe_price",
    "mc_price",
    "quad_price",
    "taylor_price",
]
