"""Truncated-Poisson degree statistics and model parameters for G3(n, m).

The degree of a vertex in the uniform min-degree-3 graph behaves like
``Z ~ Poisson(lam)`` conditioned on ``Z >= 3`` (or ``Z in D``), where ``lam``
is tilted so that ``E[Z] = 2m/n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .roots import RootNotBracketed, bisect_newton, expand_bracket
from .special import AT_LEAST_3, DegreeSupport, as_support

__all__ = [
    "TruncPoissonStats",
    "Thresholds",
    "ModelParams",
    "NoRootError",
    "conditioned_mean",
    "solve_lambda",
    "trunc_poisson_stats",
    "thresholds",
    "model_params",
    "log_double_factorial",
    "log_c_nm",
]


class NoRootError(ValueError):
    """Raised when the mean equation has no positive root."""


@dataclass(frozen=True)
class TruncPoissonStats:
    mean: float
    variance: float
    eta: float
    # E[Z(Z-1)]
    factorial2: float


def _moments(lam: float, support: DegreeSupport) -> tuple[float, float, float]:
    """(mean, variance, E[Z(Z-1)]) of Poisson(lam) conditioned on the support."""
    k = support.min_degree
    if lam == 0.0:
        return float(k), 0.0, float(k * (k - 1))
    if support.values is None and lam > k:
        mean = lam * support.ratio(lam, 1, 0)
        fact2 = lam * lam * support.ratio(lam, 2, 0)
        return mean, fact2 + mean - mean * mean, fact2
    # shifted direct summation: Y = Z - k keeps small-lam variance accurate
    if support.values is not None:
        lx = math.log(lam)
        logs = [j * lx - math.lgamma(j + 1) for j in support.values]
        top = max(logs)
        pairs = [(j - k, math.exp(v - top)) for j, v in zip(support.values, logs)]
    else:
        pairs = []
        w, j = 1.0, k
        total = 0.0
        while True:
            pairs.append((j - k, w))
            total += w
            j += 1
            w *= lam / j
            if w < 1e-18 * total:
                break
    wsum = math.fsum(w for _, w in pairs)
    a = math.fsum(y * w for y, w in pairs) / wsum
    b = math.fsum(y * y * w for y, w in pairs) / wsum
    var = b - a * a
    mean = k + a
    fact2 = b + (2 * k - 1) * a + k * (k - 1)
    return mean, var, fact2


def conditioned_mean(lam: float, support: DegreeSupport | None = None) -> float:
    """``lam f_D'(lam) / f_D(lam)``, the mean of the conditioned Poisson."""
    support = as_support(support)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if lam == 0.0:
        return float(support.min_degree)
    if support.values is None and lam > support.min_degree:
        return lam * support.ratio(lam, 1, 0)
    return _moments(lam, support)[0]


def trunc_poisson_stats(lam: float, support: DegreeSupport | None = None) -> TruncPoissonStats:
    support = as_support(support)
    if not lam >= 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    mean, var, fact2 = _moments(float(lam), support)
    return TruncPoissonStats(mean=mean, variance=var, eta=fact2 / (2.0 * mean), factorial2=fact2)


def solve_lambda(c: float, support: DegreeSupport | None = None) -> float:
    """Unique ``lam > 0`` with ``lam f_D'(lam)/f_D(lam) = c``.

    Bisection on a bracket whose upper end doubles from 1 up to 100, then
    Newton polish using ``d mean / d lam = Var / lam``.
    """
    support = as_support(support)
    c = float(c)
    if not math.isfinite(c):
        raise ValueError("c must be finite")
    if c <= support.min_degree:
        raise NoRootError(f"no root: c={c} <= infimum mean {support.min_degree}")
    if c >= support.max_degree:
        raise NoRootError(f"no root: c={c} >= supremum mean {support.max_degree}")

    def resid(lam: float) -> float:
        return conditioned_mean(lam, support) - c

    def dresid(lam: float) -> float:
        return _moments(lam, support)[1] / lam

    try:
        lo, hi = expand_bracket(resid, 0.0, 1.0, cap=100.0)
    except RootNotBracketed as exc:
        raise NoRootError(f"no root for c={c}: {exc}") from None
    return bisect_newton(resid, lo, hi, dfunc=dresid, width=1e-8, ftol=1e-12)


@dataclass(frozen=True)
class Thresholds:
    eps0: float
    sigma_n: float
    rho_n: float
    delta_n: float


def _log_eps0_bracket(lam: float, support: DegreeSupport) -> float:
    # ln[27 f_D(8 lam) / (2^10 lam f_D'(lam))]
    if lam == 0.0:
        k = support.min_degree
        return math.log(27.0) - 10 * math.log(2.0) + k * math.log(8.0) - math.log(k)
    return (math.log(27.0) + support.log_f(8.0 * lam) - 10 * math.log(2.0)
            - math.log(lam) - support.log_f(lam, 1))


def thresholds(n: int, lam: float, support: DegreeSupport | None = None) -> Thresholds:
    """Size thresholds for the density lemma and the main theorem.

    ``sigma_n = (ln ln n)^2 / ln n`` is the schedule used throughout; it
    tends to 0 while ``sigma_n ln n / ln ln n = ln ln n`` diverges.
    """
    support = as_support(support)
    if n < 16:
        raise ValueError(f"n must be >= 16 so that ln ln n > 0, got {n}")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    log_b = _log_eps0_bracket(float(lam), support)
    if log_b <= 0:
        raise ValueError(f"eps0 undefined for this lambda ({lam}): bracket log {log_b} <= 0")
    ln_n = math.log(n)
    lnln = math.log(ln_n)
    sigma = lnln**2 / ln_n
    return Thresholds(
        eps0=1.0 / (3.0 * log_b),
        sigma_n=sigma,
        rho_n=(sigma * ln_n) ** -0.5,
        delta_n=lnln**-0.5,
    )


@dataclass(frozen=True)
class ModelParams:
    """One (n, m) configuration with its tilt and thresholds.

    ``lam == 0`` marks the regular boundary ``2m = k_min n`` where the
    conditioned law is a point mass.  Thresholds are None for ``n < 16``.
    """

    n: int
    m: int
    c: float
    lam: float
    support: DegreeSupport = AT_LEAST_3
    eps0: float | None = None
    sigma_n: float | None = None
    rho_n: float | None = None
    delta_n: float | None = None

    @property
    def is_regular_boundary(self) -> bool:
        return self.lam == 0.0


def model_params(n: int, m: int, support: DegreeSupport | None = None) -> ModelParams:
    support = as_support(support)
    n, m = int(n), int(m)
    if n <= 0 or m <= 0:
        raise ValueError("n and m must be positive")
    c = 2.0 * m / n
    if 2 * m == support.min_degree * n:
        lam = 0.0
    else:
        lam = solve_lambda(c, support)
    th = None
    if n >= 16:
        try:
            th = thresholds(n, lam, support)
        except ValueError:
            th = None
    return ModelParams(
        n=n, m=m, c=c, lam=lam, support=support,
        eps0=th.eps0 if th else None,
        sigma_n=th.sigma_n if th else None,
        rho_n=th.rho_n if th else None,
        delta_n=th.delta_n if th else None,
    )


def log_double_factorial(m: int) -> float:
    """``ln (2m-1)!!`` via log-gamma."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return math.lgamma(2 * m + 1) - m * math.log(2.0) - math.lgamma(m + 1)


def log_c_nm(params: ModelParams) -> float:
    """Log of the asymptotic count of min-degree graphs with n vertices, m edges.

    ``(2 pi n Var Z)^(-1/2) (2m-1)!! f(lam)^n / lam^(2m) exp(-eta - eta^2/2)``.
    At the regular boundary the degree sum is deterministic, so the local
    limit prefactor is 1 and ``f(lam)^n / lam^(2m)`` is replaced by its limit
    ``(1/k!)^n``.
    """
    n, m, lam, support = params.n, params.m, params.lam, params.support
    st = trunc_poisson_stats(lam, support)
    eta = st.eta
    tail = -eta - 0.5 * eta * eta
    if params.is_regular_boundary:
        k = support.min_degree
        return log_double_factorial(m) - n * math.lgamma(k + 1) + tail
    return (-0.5 * math.log(2.0 * math.pi * n * st.variance)
            + log_double_factorial(m)
            + n * support.log_f(lam)
            - 2 * m * math.log(lam)
            + tail)
