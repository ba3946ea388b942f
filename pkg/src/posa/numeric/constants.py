"""Critical constants and the per-vertex exponent functions.

Throughout, ``f`` is the generating function of the degree support (``f_3``
for the default support) and ``f'``, ``f''`` its derivatives, which for
``D = {3, 4, ...}`` are the tails ``f_2`` and ``f_1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .poisson import conditioned_mean
from .roots import RootNotBracketed, bisect_newton
from .special import DegreeSupport, as_support

__all__ = [
    "CriticalConstants",
    "ExponentFunctions",
    "critical_constants",
    "exponent_functions",
    "split_entropy",
    "log_end_ratio",
    "log_h1_peak",
    "d_series",
    "d_coeff",
    "d_taylor",
]


def log_end_ratio(lam: float, support: DegreeSupport | None = None) -> float:
    """``ln(lam^3 f''(lam) / f'(lam)^2)``; strictly decreasing in ``lam``.

    This is the per-vertex exponent at ``t = 2s`` and changes sign at
    ``lambda**``.
    """
    support = as_support(support)
    return 3 * math.log(lam) + support.log_f(lam, 2) - 2 * support.log_f(lam, 1)


def log_h1_peak(lam: float, support: DegreeSupport | None = None) -> float:
    """``ln[lam^2 / f'(lam) * (1 + lam f''(lam)/f'(lam))]``, the peak of H1."""
    support = as_support(support)
    r = lam * support.ratio(lam, 2, 1)
    return 2 * math.log(lam) - support.log_f(lam, 1) + math.log1p(r)


@dataclass(frozen=True)
class CriticalConstants:
    lambda_star_star: float
    c_star_star: float
    a_star: float
    lambda_star: float


def _root(func, lo: float = 1e-6, hi: float = 100.0) -> float:
    try:
        return bisect_newton(func, lo, hi, width=1e-12, ftol=1e-14)
    except RootNotBracketed as exc:
        raise RootNotBracketed(f"critical constant not bracketed in [{lo}, {hi}]: {exc}") from None


def critical_constants(support: DegreeSupport | None = None) -> CriticalConstants:
    """``lambda**``, ``c**``, ``a* = c**/2`` and ``lambda*`` for a degree support.

    Both roots are located on ``[1e-6, 100]`` in log form.
    """
    support = as_support(support)
    lss = _root(lambda x: log_end_ratio(x, support))
    ls = _root(lambda x: log_h1_peak(x, support))
    css = conditioned_mean(lss, support)
    return CriticalConstants(lambda_star_star=lss, c_star_star=css, a_star=css / 2.0, lambda_star=ls)


def split_entropy(s, t):
    """``H(s,t) = (2s-t) ln(s/(2s-t)) + (t-s) ln(s/(t-s))`` for ``s <= t <= 2s``.

    Uses ``0 ln(s/0) = 0``.  Accepts scalars or arrays.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s <= 0) or np.any(t < s) or np.any(t > 2 * s):
        raise ValueError("split_entropy needs 0 < s <= t <= 2s")
    a = 2 * s - t
    b = t - s
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = np.where(a > 0, a * np.log(s / np.where(a > 0, a, 1.0)), 0.0)
        tb = np.where(b > 0, b * np.log(s / np.where(b > 0, b, 1.0)), 0.0)
    out = ta + tb
    return float(out) if out.ndim == 0 else out


def _xlogy_pos(a, y):
    # a * ln(y) with 0 * ln(anything) = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a > 0, a * np.log(np.where(a > 0, y, 1.0)), 0.0)


class ExponentFunctions:
    """Per-vertex exponents for ``t = x s`` at a fixed tilt ``lam``.

    ``h1`` comes from the plain extension count, ``h2`` from the sharper
    count used inside the band ``1 < x < 2``; the two coincide at ``x = 2``.
    """

    def __init__(self, lam: float, support: DegreeSupport | None = None):
        if not lam > 0:
            raise ValueError("lam must be positive")
        self.lam = float(lam)
        self.support = as_support(support)
        self.log_lam = math.log(lam)
        self.log_f1 = self.support.log_f(lam, 2)  # f'' (f_1 for the default support)
        self.log_f2 = self.support.log_f(lam, 1)  # f'  (f_2)
        self.r = self.lam * math.exp(self.log_f1 - self.log_f2)

    H = staticmethod(split_entropy)

    def _check_x(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0) or np.any(x > 2) or np.any(np.isnan(x)):
            raise ValueError("x must lie in (0, 2]")
        return x

    def _linear(self, x):
        return (1 + x) * self.log_lam - x * self.log_f2 + (x - 1) * self.log_f1

    def h2(self, x):
        x = self._check_x(x)
        out = self._linear(x)
        return float(out) if out.ndim == 0 else out

    def h1(self, x):
        x = self._check_x(x)
        xp = np.maximum(x - 1.0, 0.0)
        out = (self._linear(x)
               - _xlogy_pos(2 - x, 2 - x)
               - (x - 1) * np.log(x)
               + _xlogy_pos(xp, x) - _xlogy_pos(xp, xp))
        return float(out) if out.ndim == 0 else out

    @property
    def x_star(self) -> float:
        """Maximiser of ``h1`` on ``(0, 2)``: ``(1 + 2r)/(1 + r)``."""
        return (1 + 2 * self.r) / (1 + self.r)

    def h1_peak(self) -> float:
        return 2 * self.log_lam - self.log_f2 + math.log1p(self.r)

    def end_value(self) -> float:
        return 3 * self.log_lam + self.log_f1 - 2 * self.log_f2


def exponent_functions(lam: float, support: DegreeSupport | None = None) -> ExponentFunctions:
    return ExponentFunctions(lam, support)


def d_series(lam: float) -> float:
    """``(3-lam) e^{2 lam} - (6 + lam^2) e^lam + lam + 3``.

    Its sign is the sign of the derivative of ``lam^3 f_1/f_2^2`` for the
    default support (negative for every ``lam > 0``).
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    e = math.exp(lam)
    return (3 - lam) * e * e - (6 + lam * lam) * e + lam + 3


def d_coeff(j: int) -> int:
    """Taylor coefficient: ``d_series(lam) = sum_{j>=4} d_coeff(j) lam^j / j!``."""
    j = int(j)
    if j < 4:
        raise ValueError("coefficients are defined for j >= 4")
    return 3 * 2**j - j * 2 ** (j - 1) - j * (j - 1) - 6


def d_taylor(lam: float, terms: int = 80) -> float:
    """Truncated factorial-scaled series for :func:`d_series`."""
    total = 0.0
    term = 1.0
    for j in range(1, terms + 1):
        term *= lam / j
        if j >= 4:
            total += d_coeff(j) * term
    return total
