"""Bracketed scalar root finding: bisection followed by a Newton/secant polish."""
from __future__ import annotations

import math
from typing import Callable


class RootNotBracketed(ValueError):
    pass


def expand_bracket(func: Callable[[float], float], lo: float, hi: float = 1.0,
                   cap: float = 100.0) -> tuple[float, float]:
    """Double ``hi`` until ``func`` changes sign on ``[lo, hi]`` or ``hi > cap``."""
    flo = func(lo)
    while func(hi) * flo > 0:
        if hi >= cap:
            raise RootNotBracketed(f"no sign change on [{lo}, {cap}]")
        hi = min(2.0 * hi, cap)
    return lo, hi


def bisect_newton(func: Callable[[float], float], lo: float, hi: float, *,
                  dfunc: Callable[[float], float] | None = None,
                  width: float = 1e-8, ftol: float = 1e-12,
                  max_polish: int = 50) -> float:
    """Root of ``func`` on ``[lo, hi]``.

    Bisects until the bracket is narrower than ``width`` and then polishes
    with Newton steps (secant steps when ``dfunc`` is None), never leaving
    the bracket.  Stops once ``|func| < ftol`` or the iterate stalls.
    """
    flo, fhi = func(lo), func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise RootNotBracketed(f"f({lo})={flo} and f({hi})={fhi} have the same sign")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    # start from the better end
    x, fx = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    x_prev, f_prev = (hi, fhi) if x == lo else (lo, flo)
    for _ in range(max_polish):
        if abs(fx) < ftol:
            break
        if dfunc is not None:
            d = dfunc(x)
        else:
            d = (fx - f_prev) / (x - x_prev) if x != x_prev else 0.0
        if d == 0.0 or not math.isfinite(d):
            break
        x_new = x - fx / d
        if not lo <= x_new <= hi:
            x_new = 0.5 * (lo + hi)
        if x_new == x:
            break
        f_new = func(x_new)
        # keep the bracket valid for the fallback
        if (f_new < 0) == (flo < 0):
            lo, flo = x_new, f_new
        else:
            hi, fhi = x_new, f_new
        x_prev, f_prev, x, fx = x, fx, x_new, f_new
    return x
