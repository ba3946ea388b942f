"""Counting bounds and expected numbers of sparse Pósa pairs, in log space.

Unspecified ``O(.)`` remainders are instantiated as an explicit multiplier
``C`` (default 1) times their order; every report shows the explicit-term
value next to the remainder budget so that signs can be judged honestly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .numeric.constants import ExponentFunctions, split_entropy
from .numeric.poisson import log_double_factorial, model_params
from .numeric.roots import bisect_newton
from .numeric.special import DegreeSupport, as_support

__all__ = [
    "BoundQuery",
    "BandError",
    "SweepReport",
    "log_n1",
    "log_n2",
    "log_multinomial",
    "log_trinomial_bound",
    "log_e_full",
    "log_e_stt1",
    "log_e_star",
    "estar_exponent",
    "expectation_sweep",
    "locate_sign_flip",
]


class BandError(ValueError):
    """``t`` lies outside the band where the sharper count applies."""


@dataclass(frozen=True)
class BoundQuery:
    """Sizes of one decomposition class: ``|S|, |T|, |T1|, |S2|, |T2|`` and the excesses."""

    n: int
    m: int
    s: int
    t: int
    t1: int
    s2: int
    t2: int
    xi1: int = 0
    xi2: int = 0

    def __post_init__(self):
        if not (self.s > 0 and 0 <= self.t < 2 * self.s):
            raise ValueError(f"need s > 0 and 0 <= t < 2s, got s={self.s}, t={self.t}")
        if not 0 <= self.t1 <= min(self.s, self.t):
            raise ValueError("need 0 <= t1 <= min(s, t)")
        if not 0 <= self.s2 <= self.s or not 0 <= self.t2 <= self.t - self.t1:
            raise ValueError("s2 or t2 out of range")
        if self.xi1 < 0 or self.xi2 < 0:
            raise ValueError("excesses must be nonnegative")

    @property
    def s3(self) -> int:
        return self.s - self.s2

    @property
    def t3(self) -> int:
        return self.t - self.t1 - self.t2

    @property
    def mu1(self) -> float:
        return self.s - self.t + self.t1 + (self.xi1 - self.xi2) / 2

    @property
    def mu2(self) -> float:
        return 2 * (self.t - self.t1) + self.xi2

    def min_sigma(self) -> float:
        """Smallest ``sigma`` for which the sparse-class constraints hold."""
        worst = max(self.s - self.t1, self.s3 + self.t3, self.xi1 + self.xi2)
        return worst / (2.0 * (self.s + self.t))

    def admissible(self, sigma_n: float) -> bool:
        return self.min_sigma() <= sigma_n and self.mu1 >= 0


def _sigma(q: BoundQuery, sigma):
    return q.min_sigma() if sigma is None else float(sigma)


def log_n1(q: BoundQuery, C: float = 1.0, sigma: float | None = None) -> float:
    """``ln[2^(-s2-t2-mu1) (2 mu1 + mu2)! / mu1!] + C sigma (s+t)``."""
    mu1, mu2 = q.mu1, q.mu2
    if mu1 < 0 or mu2 < 0:
        raise ValueError(f"mu1={mu1}, mu2={mu2} must be nonnegative")
    sig = _sigma(q, sigma)
    return (-(q.s2 + q.t2 + mu1) * math.log(2.0)
            + math.lgamma(2 * mu1 + mu2 + 1) - math.lgamma(mu1 + 1)
            + C * sig * (q.s + q.t))


def log_n2(q: BoundQuery, C: float = 1.0, sigma: float | None = None) -> float:
    """Sharper count inside ``(1 + sqrt(sigma)) s <= t <= 2 (1 - sqrt(sigma)) s``.

    ``log_n1 + 2 ln(s+t) - H(s,t) + C sqrt(sigma) (s+t)``.
    """
    sig = _sigma(q, sigma)
    r = math.sqrt(sig)
    s, t = q.s, q.t
    if not (1 + r) * s <= t <= 2 * (1 - r) * s:
        raise BandError(f"t={t} outside [{(1 + r) * s:.4g}, {2 * (1 - r) * s:.4g}]; use log_n1")
    return (log_n1(q, C, sig) + 2 * math.log(s + t) - split_entropy(s, t)
            + C * r * (s + t))


def log_multinomial(*parts) -> float:
    parts = [float(p) for p in parts]
    if any(p < 0 for p in parts):
        raise ValueError("multinomial parts must be nonnegative")
    return math.lgamma(sum(parts) + 1) - sum(math.lgamma(p + 1) for p in parts)


def log_trinomial_bound(a: float, b: float, c: float) -> float:
    """``ln[(a+b+c)^(a+b+c) / (a^a b^b c^c)]`` with ``0^0 = 1``."""
    def xl(x):
        return x * math.log(x) if x > 0 else 0.0
    return xl(a + b + c) - xl(a) - xl(b) - xl(c)


class _Model:
    # cached per-(n, m) logs shared by the expected-number formulas
    def __init__(self, n, m, support, lam):
        support = as_support(support)
        if lam is None:
            lam = model_params(n, m, support).lam
        if not lam > 0:
            raise ValueError("expected-number bounds need lam > 0")
        self.n, self.m, self.lam, self.support = n, m, lam, support
        self.log_lam = math.log(lam)
        self.lf = [support.log_f(lam, k) for k in range(4)]
        # per-vertex weight ln n + 2 ln lam - ln 2m - ln f(lam)
        self.w = math.log(n) + 2 * self.log_lam - math.log(2 * m) - self.lf[0]


def log_e_full(q: BoundQuery, support: DegreeSupport | None = None, lam: float | None = None) -> float:
    """Log of the expected number of pairs of one decomposition class, remainder dropped."""
    md = _Model(q.n, q.m, support, lam)
    s, t, t1, t2, t3 = q.s, q.t, q.t1, q.t2, q.t3
    mu1, mu2 = q.mu1, q.mu2
    D = mu1 + mu2 + t1
    if D > q.m or mu1 < 0:
        raise ValueError("class does not fit in m edges")
    out = (s + t) * math.log(q.n)
    out += math.lgamma(2 * mu1 + mu2 + 1) - mu1 * math.log(2.0) - math.lgamma(mu1 + 1)
    out += log_double_factorial_real(q.m - D) - log_double_factorial(q.m)
    out += 2 * D * md.log_lam - (q.s2 + q.t2) * math.log(2.0) - (s + t) * md.lf[0]
    out += t1 * md.lf[1] + t2 * md.lf[2] + t3 * md.lf[3]
    out += (q.s3 + t3) * md.support.log_f(1.0)
    out += -math.lgamma(s + 1) - math.lgamma(t + 1) + math.lgamma(t1 + 1)
    out += _log_binom(s, t1) + _log_binom(t, t1) + _log_binom(s, q.s2) + _log_binom(t - t1, t2)
    return out


def log_double_factorial_real(a: float) -> float:
    # ln (2a-1)!! for real a >= 0, via the gamma function
    return math.lgamma(2 * a + 1) - a * math.log(2.0) - math.lgamma(a + 1)


def _log_binom(a, b):
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def _entropy_terms(s, t):
    # (2s-t) ln(2s/(2s-t)) + t ln(2s/t), with 0 ln(./0) = 0
    a = 2 * s - t
    out = a * math.log(2 * s / a) if a > 0 else 0.0
    if t > 0:
        out += t * math.log(2 * s / t)
    return out


def log_e_stt1(n: int, m: int, s: float, t: float, t1: float,
               support: DegreeSupport | None = None, lam: float | None = None) -> float:
    """Log of the bound on classes with given ``s, t, t1`` after summing out the rest."""
    if not 0 <= t1 <= min(s, t) or not 0 < t < 2 * s:
        raise ValueError("need 0 < t < 2s and 0 <= t1 <= min(s, t)")
    md = _Model(n, m, support, lam)
    return ((s + t) * md.w - 2 * s * math.log(2.0) + s * md.lf[1] + (t - t1) * md.lf[2]
            + _entropy_terms(s, t) + log_multinomial(s - t1, t1, t - t1))


def log_e_star(n: int, m: int, s: float, t: float,
               support: DegreeSupport | None = None, lam: float | None = None) -> float:
    """Log of the envelope bound ``E*(s, t)`` with prefactor ``t``.

    ``ln t + (s+t) w - 2s ln 2 + s ln f'(lam) + (t-s) ln f''(lam)
    + (2s-t) ln(2s/(2s-t)) + t ln(2s/t) + s ln(t/s) + (t-s)+ ln(t/(t-s)+)``
    where ``w = ln n + 2 ln lam - ln 2m - ln f(lam)``.
    """
    if not 0 < t < 2 * s:
        raise ValueError("need 0 < t < 2s")
    md = _Model(n, m, support, lam)
    out = (math.log(t) + (s + t) * md.w - 2 * s * math.log(2.0) + s * md.lf[1]
           + (t - s) * md.lf[2] + _entropy_terms(s, t) + s * math.log(t / s))
    if t > s:
        out += (t - s) * math.log(t / (t - s))
    return out


def estar_exponent(x, lam: float, support: DegreeSupport | None = None, band: bool = False):
    """Per-``s`` exponent of ``E*``: ``H2(x)`` inside the band, ``H1(x)`` outside."""
    ef = ExponentFunctions(lam, support)
    return ef.h2(x) if band else ef.h1(x)


@dataclass
class SweepReport:
    c: float
    lam: float
    n: int
    m: int
    sigma: float
    rho: float
    eps0: float
    s: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    band: np.ndarray = field(repr=False)
    exponent: np.ndarray = field(repr=False)
    log_estar: np.ndarray = field(repr=False)
    remainder_budget: np.ndarray = field(repr=False)
    max_exponent: float = 0.0
    argmax_x: float = 0.0
    max_exponent_at_sigma: float = 0.0
    argmax_x_at_sigma: float = 0.0
    argmax_st: tuple = (0.0, 0.0)
    total_log_bound: float = 0.0

    @property
    def inconclusive(self) -> bool:
        return not self.max_exponent < 0

    def summary(self) -> dict:
        return {
            "c": self.c, "lambda": self.lam, "n": self.n, "m": self.m,
            "max_exponent": self.max_exponent, "argmax_x": self.argmax_x,
            "total_log_bound": self.total_log_bound,
            "max_exponent_at_sigma": self.max_exponent_at_sigma,
            "argmax_x_at_sigma": self.argmax_x_at_sigma,
            "argmax_s": self.argmax_st[0], "argmax_t": self.argmax_st[1],
            "sigma": self.sigma, "rho": self.rho, "eps0": self.eps0,
            "inconclusive": self.inconclusive,
        }

    def rows(self):
        for i in range(len(self.s)):
            yield (float(self.s[i]), float(self.t[i]), float(self.x[i]),
                   "band" if self.band[i] else "outside",
                   float(self.exponent[i]), float(self.remainder_budget[i]))


def expectation_sweep(n: int, m: int, support: DegreeSupport | None = None, C: float = 1.0,
                      n_x: int = 400, s_ratio: float = 1.1) -> SweepReport:
    """Evaluate ``E*`` over ``t = x s`` on a grid of admissible ``(s, t)``.

    ``s`` runs geometrically (ratio ``s_ratio``) and ``x = 2i/(n_x+1)``.
    Inside the band ``1 + sqrt(sigma) <= x <= 2(1 - sqrt(sigma))`` the
    sharper envelope ``s^3 x (1+x)^2 exp(s H2(x))`` is used, elsewhere
    ``s x exp(s H1(x))``.

    ``max_exponent`` is the leading order as ``sigma -> 0``: the larger of
    ``H1`` over ``x < 1`` and ``H2`` over ``[1, 2]``, which is ``H2(2)``.
    ``max_exponent_at_sigma`` is the maximum over the grid with the band
    at the actual ``sigma_n``; at desk-scale ``n`` the band can be empty.
    """
    support = as_support(support)
    p = model_params(n, m, support)
    if p.eps0 is None:
        raise ValueError(f"thresholds unavailable for n={n}, m={m}")
    ef = ExponentFunctions(p.lam, support)
    sig, rho = p.sigma_n, p.rho_n
    r = math.sqrt(sig)
    lo = p.eps0 * math.log(n)
    hi = n ** (1.0 - rho)
    x = 2.0 * np.arange(1, n_x + 1) / (n_x + 1)
    s_lo = max(1.0, lo / 3.0)
    s_vals = s_lo * s_ratio ** np.arange(int(math.floor(math.log(hi / s_lo) / math.log(s_ratio))) + 1)
    S, X = np.meshgrid(s_vals, x, indexing="ij")
    S, X = S.ravel(), X.ravel()
    T = S * X
    keep = (S + T >= lo) & (S + T <= hi)
    S, X, T = S[keep], X[keep], T[keep]
    band = (X >= 1 + r) & (X <= 2 * (1 - r))
    h1 = ef.h1(X)
    h2 = ef.h2(X)
    expo = np.where(band, h2, h1)
    log_e = np.where(band, 3 * np.log(S) + np.log(X) + 2 * np.log1p(X) + S * h2,
                     np.log(S) + np.log(X) + S * h1)
    rem_rate = np.where(band, r, r * math.log(1.0 / sig))
    budget = C * (S + T) * rem_rate

    lead = max(float(np.max(ef.h1(x[x < 1]))) if np.any(x < 1) else -math.inf,
               float(np.max(ef.h2(x[x >= 1]))) if np.any(x >= 1) else -math.inf,
               ef.end_value())
    if lead == ef.end_value():
        lead_x = 2.0
    else:
        cand = np.where(x < 1, ef.h1(x), ef.h2(x))
        lead_x = float(x[int(np.argmax(cand))])
    if len(S):
        k = int(np.argmax(expo))
        j = int(np.argmax(log_e))
        at_sig, at_x = float(expo[k]), float(X[k])
        arg_st = (float(S[j]), float(T[j]))
        total = float(logsumexp(log_e))
    else:
        at_sig, at_x, arg_st, total = -math.inf, math.nan, (math.nan, math.nan), -math.inf
    return SweepReport(
        c=p.c, lam=p.lam, n=n, m=m, sigma=sig, rho=rho, eps0=p.eps0,
        s=S, t=T, x=X, band=band, exponent=expo, log_estar=log_e, remainder_budget=budget,
        max_exponent=lead, argmax_x=lead_x, max_exponent_at_sigma=at_sig,
        argmax_x_at_sigma=at_x, argmax_st=arg_st, total_log_bound=total,
    )


def locate_sign_flip(n: int = 10**6, c_lo: float = 5.0, c_hi: float = 5.4,
                     support: DegreeSupport | None = None, tol: float = 1e-4) -> float:
    """Average degree where the sweep's headline exponent changes sign.

    Bisection on ``c`` with ``m = round(c n / 2)``; the headline exponent is
    strictly decreasing in ``c``, so the sign change is unique.
    """
    def f(c):
        m = int(round(c * n / 2.0))
        return expectation_sweep(n, m, support).max_exponent

    return bisect_newton(f, c_lo, c_hi, width=tol, ftol=0.0, max_polish=0)
