"""Scalar constants used by the density comparisons and distortion bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "RootResult",
    "solve_bracketed",
    "solve_t0",
    "solve_log_reciprocal",
    "solve_midpoint_eq",
    "bp_constant_k",
    "lemma8_bound",
    "monotone_f",
    "c1_bound",
    "alpha",
    "grotzsch_lambda",
    "lemma2_anchors",
    "C0",
]

#: comparison constant between lambda and lambda''
C0 = 2.15


@dataclass(frozen=True)
class RootResult:
    value: float
    residual: float
    iterations: int


def solve_bracketed(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    bisect_tol: float = 1e-6,
    newton_tol: float = 1e-14,
    max_newton: int = 50,
) -> RootResult:
    """Bisection down to ``bisect_tol``, then Newton until |f| <= ``newton_tol``.

    ``f`` must change sign on [lo, hi].  Newton steps that leave the final
    bracket are replaced by a bisection step.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return RootResult(lo, 0.0, 0)
    if fhi == 0:
        return RootResult(hi, 0.0, 0)
    if flo * fhi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    it = 0
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        it += 1
        if fm == 0:
            return RootResult(mid, 0.0, it)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    fx = f(x)
    for _ in range(max_newton):
        if abs(fx) <= newton_tol:
            break
        step = fx / df(x)
        xn = x - step
        if not lo <= xn <= hi:
            xn = 0.5 * (lo + hi)
        fn = f(xn)
        it += 1
        if (fn < 0) == (flo < 0):
            lo = xn
        else:
            hi = xn
        if xn == x:
            break
        x, fx = xn, fn
    return RootResult(x, fx, it)


def solve_t0() -> RootResult:
    """Root of e^t = 2 + t on [1, 1.5] (t0 ~ 1.14619)."""
    return solve_bracketed(lambda t: math.exp(t) - 2 - t, lambda t: math.exp(t) - 1, 1.0, 1.5)


def solve_log_reciprocal() -> RootResult:
    """Root of log x = 1/x on [1, 3] (~ 1.76322)."""
    return solve_bracketed(
        lambda x: math.log(x) - 1 / x, lambda x: 1 / x + 1 / x**2, 1.0, 3.0
    )


def solve_midpoint_eq() -> RootResult:
    """Root of x (2 - log x) = 1 in (0, 1) (~ 0.317844)."""
    return solve_bracketed(
        lambda x: x * (2 - math.log(x)) - 1, lambda x: 1 - math.log(x), 1e-3, 1.0
    )


def bp_constant_k() -> float:
    return 4 + math.log(3 + 2 * math.sqrt(2))


def lemma8_bound(t: float) -> float:
    """(1 + log(1/(1-t))) / (1-t): bound on lambda'(x0)/lambda'(y) for
    |y - x0| < t d(x0)."""
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")
    return (1 + math.log(1 / (1 - t))) / (1 - t)


def monotone_f(T: float, y: float) -> float:
    """y (1 + |log(T/y)|), strictly increasing in y for fixed T > 0."""
    if T <= 0 or y <= 0:
        raise ValueError("T and y must be positive")
    return y * (1 + abs(math.log(T / y)))


def c1_bound(n: int, K: float, lambda_n: float) -> float:
    """Distortion constant for lambda(z) d(z) under a K-quasiconformal map."""
    if lambda_n < 4:
        raise ValueError(f"lambda_n must be >= 4, got {lambda_n}")
    if n < 2 or K < 1:
        raise ValueError("need n >= 2 and K >= 1")
    q = K ** (1.0 / (n - 1))
    return q + (1 + q * (math.log(8 * lambda_n**2) - 1)) / (
        1 + math.log(10) + 2 * math.log(lambda_n)
    )


def alpha(n: int, K: float) -> float:
    """Hoelder exponent K^(1/(1-n))."""
    if n < 2 or K < 1:
        raise ValueError("need n >= 2 and K >= 1")
    return K ** (1.0 / (1 - n))


def grotzsch_lambda(n: int) -> float:
    """Value used for the Groetzsch ring constant: exactly 4 in the plane and
    the upper end 2 e^(n-1) of its known range otherwise.  Larger values only
    enlarge ``c1_bound``, so the bound stays valid."""
    return 4.0 if n == 2 else 2 * math.exp(n - 1)


def lemma2_anchors() -> dict:
    t0 = solve_t0().value
    f_t0 = (math.log(t0 + 1) + 1) / (t0 + 1)
    return {
        "t0": t0,
        "ratio_small_ring": (1 + t0) / (1 + t0 - math.log(2)),
        "f_t0": f_t0,
        "inverse_f_t0": 1 / f_t0,
        "one_plus_t0": 1 + t0,
    }
