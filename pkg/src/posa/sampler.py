"""Sampling G3(n, m): truncated-Poisson degrees plus the pairing model.

A degree sequence is drawn from the product of conditioned Poissons given
that the sum is ``2m``; a uniform pairing of the ``2m`` points is then
projected to a multigraph and rejected unless it is simple.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import pair_until_simple
from .graph import Graph
from .numeric.poisson import solve_lambda
from .numeric.special import DegreeSupport, as_support

__all__ = [
    "DegreeSequenceError",
    "TooManyRejections",
    "Pairing",
    "trial_rng",
    "sample_degrees",
    "random_pairing",
    "project_and_check",
    "sample_min3_graph",
]


class DegreeSequenceError(RuntimeError):
    pass


class TooManyRejections(RuntimeError):
    def __init__(self, attempts: int, msg: str | None = None):
        self.attempts = attempts
        super().__init__(msg or f"no simple graph after {attempts} pairing attempts")


def trial_rng(seed: int, n: int, m: int, trial: int = 0) -> np.random.Generator:
    """Independent counter-based stream for one (seed, n, m, trial)."""
    ss = np.random.SeedSequence([int(seed), int(n), int(m), int(trial)])
    return np.random.Generator(np.random.Philox(ss))


def _check_sum(n: int, m: int, support: DegreeSupport):
    lo = support.min_degree * n
    hi = support.max_degree * n
    if not lo <= 2 * m <= hi:
        raise DegreeSequenceError(f"2m={2 * m} outside the feasible range [{lo}, {hi}] for n={n}")


def sample_degrees(n: int, m: int, lam: float | None, rng: np.random.Generator,
                   support=None, max_attempts: int = 10**6, batch: int = 256,
                   table: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
    """n i.i.d. conditioned Poissons, conditioned on summing to ``2m``.

    Whole blocks are redrawn until the sum matches, through their degree
    histograms: a histogram is ``Multinomial(n, pmf)``, the first one with the
    right weighted sum is accepted and a uniform permutation of the
    corresponding multiset restores the exchangeable order.  This has exactly
    the law of block resampling at a fraction of the cost.  ``table`` is an
    optional precomputed ``support.pmf_table(lam)``.
    """
    return next(_degree_stream(n, m, lam, rng, support, max_attempts, batch, table))


def _degree_stream(n, m, lam, rng, support=None, max_attempts=10**6, batch=256, table=None):
    # every matching row of a batch is an independent conditioned draw, so
    # all of them are used in order before the next batch is drawn
    support = as_support(support)
    n, m = int(n), int(m)
    _check_sum(n, m, support)
    for k in (support.min_degree, support.max_degree):
        if 2 * m == k * n:
            while True:
                yield np.full(n, k, dtype=np.int64)
    if table is None:
        if lam is None:
            lam = solve_lambda(2 * m / n, support)
        table = support.pmf_table(lam)
    degs, probs = table
    target = 2 * m
    while True:
        done = 0
        while done < max_attempts:
            size = min(batch, max_attempts - done)
            hist = rng.multinomial(n, probs, size=size)
            hits = np.flatnonzero(hist @ degs == target)
            done += size
            if hits.size:
                break
        else:
            raise DegreeSequenceError(f"degree sum never hit {target} in {max_attempts} block attempts")
        for h in hits:
            yield rng.permutation(np.repeat(degs, hist[h]))


@dataclass(frozen=True)
class Pairing:
    """A perfect matching of the points; ``owner[p]`` is the cell (vertex) of point p."""

    owner: np.ndarray
    pairs: np.ndarray
    n: int

    @property
    def m(self) -> int:
        return len(self.pairs)


def random_pairing(deg, rng: np.random.Generator) -> Pairing:
    deg = np.asarray(deg, dtype=np.int64)
    total = int(deg.sum())
    if total % 2:
        raise ValueError("degree sum must be even")
    owner = np.repeat(np.arange(len(deg)), deg)
    pairs = rng.permutation(total).reshape(-1, 2)
    return Pairing(owner=owner, pairs=pairs, n=len(deg))


def project_and_check(p: Pairing) -> Graph | None:
    """The simple graph induced by the pairing, or None if it has a loop or a repeated edge."""
    u = p.owner[p.pairs[:, 0]]
    v = p.owner[p.pairs[:, 1]]
    if np.any(u == v):
        return None
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    key = lo * p.n + hi
    if np.unique(key).size != key.size:
        return None
    return Graph(p.n, np.column_stack([lo, hi]))


def sample_min3_graph(n: int, m: int, rng: np.random.Generator, max_rejects: int = 10**6,
                      support=None, pairing_retries: int = 100,
                      lam: float | None = None) -> Graph:
    """Random simple graph with n vertices, m edges and degrees in the support.

    Each degree sequence gets up to ``pairing_retries`` pairing attempts
    before it is redrawn.  With ``pairing_retries=1`` the output is exactly
    uniform over all such graphs; larger values trade a slight tilt towards
    degree sequences that pair easily for throughput.
    """
    support = as_support(support)
    n, m = int(n), int(m)
    if pairing_retries < 1:
        raise ValueError("pairing_retries must be >= 1")
    _check_sum(n, m, support)
    if lam is None and 2 * m != support.min_degree * n and 2 * m != support.max_degree * n:
        lam = solve_lambda(2 * m / n, support)
    table = support.pmf_table(lam) if lam is not None else None
    used = 0
    edges = np.empty((m, 2), dtype=np.int64)
    stream = _degree_stream(n, m, lam, rng, support, table=table)
    while used < max_rejects:
        deg = next(stream)
        owner = np.repeat(np.arange(n, dtype=np.int64), deg)
        cell_start = np.zeros(n, dtype=np.int64)
        np.cumsum(deg[:-1], out=cell_start[1:])
        tries = min(pairing_retries, max_rejects - used)
        got = pair_until_simple(owner, cell_start, deg, rng, tries, edges)
        if got > 0:
            return Graph(n, edges)
        used += tries
    raise TooManyRejections(used)
