"""Searches for small vertex sets of edge density above 1 and density profiles.

A connected set ``A`` has ``e(A) > |A|`` exactly when its induced subgraph
has cyclomatic number at least 2.  Restricting to connected sets loses
nothing: if a disconnected ``A`` has ``e(A) > |A|`` then some component
``C`` of ``G(A)`` has ``e(C) > |C|`` already, since the component counts add
up and none of them can all be at most their size.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph

__all__ = ["DenseWitness", "DensityProfile", "scan_small_dense", "density_profile",
           "two_core", "size_ladder", "K_MAX_LIMIT"]

K_MAX_LIMIT = 40


@dataclass(frozen=True)
class DenseWitness:
    vertices: tuple[int, ...]
    edges: int
    size_bound: int

    @property
    def size(self) -> int:
        return len(self.vertices)


def two_core(g: Graph) -> np.ndarray:
    """Boolean mask of the 2-core (repeatedly strip vertices of degree < 2)."""
    adj = g.adj
    deg = g.degrees.astype(np.int64).copy()
    alive = np.ones(g.n, dtype=bool)
    stack = [v for v in range(g.n) if deg[v] < 2]
    for v in stack:
        alive[v] = False
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] < 2:
                    alive[w] = False
                    stack.append(w)
    return alive


def scan_small_dense(g: Graph, k_max: int) -> DenseWitness | None:
    """A connected set ``A`` with ``|A| <= k_max`` and ``e(A) > |A|``, or None.

    Exact: every connected vertex set of the 2-core up to size ``k_max`` is
    enumerated once (extension-set enumeration rooted at its smallest
    vertex), with a branch cut when the remaining additions cannot lift the
    edge surplus to 1.  A vertex-minimal witness has internal minimum degree
    2, so it lies in the 2-core.
    """
    k_max = int(k_max)
    if k_max > K_MAX_LIMIT:
        raise ValueError(f"k_max={k_max} exceeds the search limit {K_MAX_LIMIT}")
    if k_max < 3:
        # e(A) <= C(|A|, 2) <= |A| for |A| <= 3
        return None
    core = two_core(g)
    adj = [tuple(w for w in nb if core[w]) if core[v] else () for v, nb in enumerate(g.adj)]
    dmax = max((len(a) for a in adj), default=0)
    found: list[int] = []

    def grow(sub: list, subset: set, border: set, ext: list, root: int, edges: int) -> bool:
        b = len(sub)
        if edges > b:
            found.extend(sub)
            return True
        if b == k_max:
            return False
        # each added vertex raises (edges - size) by at most dmax - 1
        if (b + 1 - edges) > (k_max - b) * (dmax - 1):
            return False
        ext = list(ext)
        while ext:
            w = ext.pop()
            new_ext = list(ext)
            added = []
            for u in adj[w]:
                if u > root and u not in subset and u not in border:
                    new_ext.append(u)
                    added.append(u)
            gain = sum(1 for u in adj[w] if u in subset)
            border.update(added)
            border.add(w)
            subset.add(w)
            sub.append(w)
            if grow(sub, subset, border, new_ext, root, edges + gain):
                return True
            sub.pop()
            subset.discard(w)
            border.difference_update(added)
        return False

    for v in range(g.n):
        if not core[v]:
            continue
        ext = [u for u in adj[v] if u > v]
        border = set(ext)
        border.add(v)
        if grow([v], {v}, border, ext, v, 0):
            verts = tuple(sorted(found))
            e = g.edges_within(verts)
            assert e > len(verts)
            return DenseWitness(vertices=verts, edges=e, size_bound=k_max)
    return None


def size_ladder(k_lo: int, k_hi: int, ratio: float = 2.0) -> list[int]:
    """Geometric ladder of distinct integer sizes from ``k_lo`` to ``k_hi``."""
    k_lo = max(1, int(k_lo))
    k_hi = int(k_hi)
    out = []
    x = float(k_lo)
    while x <= k_hi:
        k = int(round(x))
        if not out or k > out[-1]:
            out.append(k)
        x *= ratio
    if out and out[-1] != k_hi and k_hi > k_lo:
        out.append(k_hi)
    return out


@dataclass
class DensityProfile:
    sigma: float
    rows: list  # (k, max_density_found, flagged)

    @property
    def any_flagged(self) -> bool:
        return any(f for _, _, f in self.rows)


def _grow_region(adj, seed: int, size: int, n: int) -> list[int]:
    # BFS from seed; when the component runs out, continue from the lowest unseen vertex
    seen = bytearray(n)
    order = [seed]
    seen[seed] = 1
    head = 0
    nxt = 0
    while len(order) < size:
        if head == len(order):
            while seen[nxt]:
                nxt += 1
            order.append(nxt)
            seen[nxt] = 1
            continue
        v = order[head]
        head += 1
        for w in adj[v]:
            if not seen[w]:
                seen[w] = 1
                order.append(w)
                if len(order) == size:
                    break
    return order


def _peel_to(adj, region: list[int], k: int) -> tuple[int, int]:
    """Strip minimum-degree vertices until ``k`` remain; return (k, edges left)."""
    inside = set(region)
    deg = {v: sum(1 for w in adj[v] if w in inside) for v in region}
    edges = sum(deg.values()) // 2
    heap = [(d, v) for v, d in deg.items()]
    heapq.heapify(heap)
    size = len(region)
    while size > k:
        d, v = heapq.heappop(heap)
        if v not in inside or deg[v] != d:
            continue
        inside.discard(v)
        size -= 1
        edges -= d
        for w in adj[v]:
            if w in inside:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
    return size, edges


def density_profile(g: Graph, sigma: float, rho: float, samples: int = 8,
                    rng: np.random.Generator | None = None, k_min: int = 1,
                    ratio: float = 2.0) -> DensityProfile:
    """Best density found at each rung of a size ladder up to ``n^(1-rho)``.

    For every rung ``k`` and each of ``samples`` seeds, a BFS region of
    ``min(n, 2k)`` vertices is peeled down to ``k`` vertices by repeatedly
    removing a minimum-degree vertex.  Densities ``>= 1 + sigma`` are
    flagged.  This is a heuristic lower bound on the true maximum density.
    """
    n = g.n
    adj = g.adj
    k_hi = min(n, int(math.floor(n ** (1.0 - rho))))
    rows = []
    if rng is None:
        seeds = list(range(min(samples, n)))
    else:
        seeds = [int(x) for x in rng.choice(n, size=min(samples, n), replace=False)]
    for k in size_ladder(k_min, k_hi, ratio):
        best = 0.0
        for s0 in seeds:
            region = _grow_region(adj, s0, min(n, 2 * k), n)
            size, e = _peel_to(adj, region, k)
            best = max(best, e / size)
        rows.append((k, best, best >= 1.0 + sigma))
    return DensityProfile(sigma=sigma, rows=rows)
