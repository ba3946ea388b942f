"""Truncated exponential series and degree supports.

``f_k(x) = sum_{j >= k} x**j / j!`` is the tail of the exponential series.
For an explicit finite degree set ``D`` the analogue is
``f_D(x) = sum_{j in D} x**j / j!``.  Both are wrapped by
:class:`DegreeSupport`, which also exposes derivatives (``f_k' = f_{k-1}``)
and log-space evaluation for arguments where ``e**x`` overflows.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DegreeSupport",
    "AT_LEAST_3",
    "tail_exp",
    "log_tail_exp",
]

# exp overflows a double just above 709.78
_EXP_MAX = 709.0
_EPS = 2.0**-60


def _check_x(x: float) -> float:
    x = float(x)
    if not x >= 0.0:  # also rejects nan
        raise ValueError(f"argument must be nonnegative, got {x!r}")
    return x


def _series_from(k: int, x: float) -> float:
    """Direct summation of sum_{j>=k} x^j/j!, for 0 < x <= k."""
    term = 1.0
    for j in range(1, k + 1):
        term *= x / j
    total = 0.0
    j = k
    while True:
        total += term
        j += 1
        term *= x / j
        if term <= _EPS * total:
            return total


def _partial_sum(k: int, x: float) -> float:
    """sum_{1 <= j < k} x^j/j!."""
    term = 1.0
    total = 0.0
    for j in range(1, k):
        term *= x / j
        total += term
    return total


def tail_exp(k: int, x: float, deriv: int = 0) -> float:
    """Return ``f_{k-deriv}(x)``, i.e. the ``deriv``-th derivative of ``f_k``.

    Uses the complement ``e**x - partial sum`` when ``x > k`` and direct
    summation otherwise.  Raises :class:`OverflowError` when the value does
    not fit in a double; use :func:`log_tail_exp` there.
    """
    if isinstance(k, DegreeSupport):
        return k.f(x, deriv)
    x = _check_x(x)
    k = int(k) - int(deriv)
    if k <= 0:
        if x > _EXP_MAX:
            raise OverflowError("e**x overflows; use log_tail_exp")
        return math.exp(x)
    if x == 0.0:
        return 0.0
    if x > k:
        if x > _EXP_MAX:
            raise OverflowError("e**x overflows; use log_tail_exp")
        return math.expm1(x) - _partial_sum(k, x)
    return _series_from(k, x)


def _log_series_from(k: int, x: float) -> float:
    # log-space direct summation, for x <= k with k large
    log_term = k * math.log(x) - math.lgamma(k + 1)
    rel = 1.0
    total = 0.0
    j = k
    while rel > _EPS * total or total == 0.0:
        total += rel
        j += 1
        rel *= x / j
    return log_term + math.log(total)


def log_tail_exp(k: int, x: float, deriv: int = 0) -> float:
    """Natural log of ``f_{k-deriv}(x)``; finite for any ``x > 0``."""
    if isinstance(k, DegreeSupport):
        return k.log_f(x, deriv)
    x = _check_x(x)
    k = int(k) - int(deriv)
    if k <= 0:
        return x
    if x == 0.0:
        return -math.inf
    if x <= k:
        if k < 700:
            return math.log(_series_from(k, x))
        return _log_series_from(k, x)
    if x <= _EXP_MAX:
        return math.log(tail_exp(k, x))
    # P(Poisson(x) < k), tiny when x is this large relative to k
    lx = math.log(x)
    head = math.fsum(math.exp(j * lx - math.lgamma(j + 1) - x) for j in range(k))
    return x + math.log1p(-head)


_SUPPORT_RE = re.compile(r"^\s*(?:>=|≥|at-least\s*)\s*(\d+)\s*$|^\s*(\d+)\s*\+\s*$")


@dataclass(frozen=True)
class DegreeSupport:
    """Allowed vertex degrees: ``{k, k+1, ...}`` or an explicit finite set.

    ``values is None`` means the unbounded support ``j >= min_degree``.
    """

    min_degree: int
    values: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.values is None:
            if self.min_degree < 3:
                raise ValueError(f"minimum degree must be >= 3, got {self.min_degree}")
            return
        vals = tuple(sorted(set(int(v) for v in self.values)))
        if not vals:
            raise ValueError("degree set must be nonempty")
        if vals[0] < 3:
            raise ValueError(f"degrees below 3 are not allowed: {vals}")
        if 3 not in vals:
            raise ValueError(f"explicit degree sets must contain 3: {vals}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "min_degree", vals[0])

    @classmethod
    def at_least(cls, k: int = 3) -> "DegreeSupport":
        return cls(int(k))

    @classmethod
    def explicit(cls, values: Iterable[int]) -> "DegreeSupport":
        vals = tuple(values)
        return cls(min(vals) if vals else 0, vals)

    @classmethod
    def parse(cls, text: str) -> "DegreeSupport":
        """Parse ``">=3"``, ``"3+"``, ``"at-least 4"`` or ``"3,4"`` / ``"{3,4}"``."""
        m = _SUPPORT_RE.match(text)
        if m:
            return cls.at_least(int(m.group(1) or m.group(2)))
        body = text.strip().strip("{}")
        try:
            vals = [int(tok) for tok in re.split(r"[,\s]+", body) if tok]
        except ValueError:
            raise ValueError(f"cannot parse degree support {text!r}") from None
        return cls.explicit(vals)

    @property
    def is_finite(self) -> bool:
        return self.values is not None

    @property
    def max_degree(self) -> float:
        return math.inf if self.values is None else self.values[-1]

    def __str__(self) -> str:
        if self.values is None:
            return f">={self.min_degree}"
        return "{" + ",".join(map(str, self.values)) + "}"

    # -- generating function and derivatives --------------------------------

    def f(self, x: float, order: int = 0) -> float:
        """``order``-th derivative of ``f_D`` at ``x``."""
        if self.values is None:
            return tail_exp(self.min_degree, x, deriv=order)
        x = _check_x(x)
        terms = [j - order for j in self.values if j >= order]
        if x > _EXP_MAX / 2:
            return math.exp(self.log_f(x, order))
        return math.fsum(x**r / math.factorial(r) for r in terms)

    def log_f(self, x: float, order: int = 0) -> float:
        if self.values is None:
            return log_tail_exp(self.min_degree, x, deriv=order)
        x = _check_x(x)
        terms = [j - order for j in self.values if j >= order]
        if not terms:
            return -math.inf
        if x == 0.0:
            return 0.0 if terms[0] == 0 else -math.inf
        lx = math.log(x)
        logs = np.array([r * lx - math.lgamma(r + 1) for r in terms])
        top = logs.max()
        return float(top + math.log(np.exp(logs - top).sum()))

    def ratio(self, x: float, num_order: int, den_order: int) -> float:
        """``f^(num_order)(x) / f^(den_order)(x)``, overflow-safe."""
        if x <= 300.0:
            return self.f(x, num_order) / self.f(x, den_order)
        return math.exp(self.log_f(x, num_order) - self.log_f(x, den_order))

    def pmf_table(self, lam: float, tail_tol: float = 1e-18) -> tuple[np.ndarray, np.ndarray]:
        """Degrees and probabilities of Poisson(lam) conditioned on the support.

        For unbounded supports the table is cut where the remaining mass falls
        below ``tail_tol`` and renormalised.
        """
        if self.values is not None:
            degs = np.array(self.values, dtype=np.int64)
        else:
            k = self.min_degree
            hi = k
            # conditioned pmf ratio p(j+1)/p(j) = lam/(j+1)
            logp = 0.0
            while True:
                hi += 1
                logp += math.log(lam / hi) if lam > 0 else -math.inf
                if hi > lam + 1 and logp < math.log(tail_tol):
                    break
            degs = np.arange(k, hi + 1, dtype=np.int64)
        if lam == 0.0:
            probs = np.zeros(len(degs))
            probs[0] = 1.0
            return degs, probs
        lx = math.log(lam)
        logs = np.array([d * lx - math.lgamma(d + 1) for d in degs])
        probs = np.exp(logs - logs.max())
        return degs, probs / probs.sum()


AT_LEAST_3 = DegreeSupport.at_least(3)


def as_support(support: DegreeSupport | int | str | Sequence[int] | None) -> DegreeSupport:
    if support is None:
        return AT_LEAST_3
    if isinstance(support, DegreeSupport):
        return support
    if isinstance(support, (int, np.integer)):
        return DegreeSupport.at_least(int(support))
    if isinstance(support, str):
        return DegreeSupport.parse(support)
    return DegreeSupport.explicit(support)
