"""Rotation-closed paths, endpoint closures and their structural decomposition.

A rotation of ``x_0 ... x_h`` along a chord ``(x_h, x_i)``, ``i < h-1``,
gives ``x_0 ... x_i x_h x_{h-1} ... x_{i+1}``: same vertices, same anchor,
new endpoint ``x_{i+1}``.  The endpoint closure ``S`` collects every
endpoint reachable by rotations and ``T = N(S) \\ S``.

Computing a longest path is out of reach, so :func:`maximal_path` builds a
path that no rotation can extend: whenever a rotated endpoint has a
neighbour off the path, the path is extended there and the closure is
started over.  The lemma checks below only use that property.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._kernels import closure_dfs, treap_append, treap_inorder
from .graph import Graph

__all__ = [
    "RotationPath",
    "PosaPair",
    "PosaStructure",
    "ViolationReport",
    "PathExtendable",
    "InvalidChord",
    "rotate",
    "greedy_path",
    "endpoint_closure",
    "maximal_path",
    "posa_pair",
    "choose_v0",
    "decompose_structure",
    "check_structure",
    "HARD_CHECKS",
]


class InvalidChord(ValueError):
    pass


class PathExtendable(Exception):
    """A rotated endpoint has a neighbour off the path."""

    def __init__(self, vertices: list[int], vertex: int):
        self.vertices = vertices
        self.vertex = vertex
        super().__init__(f"endpoint {vertices[-1]} has off-path neighbour {vertex}")


class RotationPath:
    """Simple path ``x_0 ... x_h`` with a vertex -> position table (-1 off path)."""

    __slots__ = ("vertices", "pos", "n")

    def __init__(self, vertices: Sequence[int], n: int):
        verts = np.asarray(vertices, dtype=np.int64)
        pos = np.full(n, -1, dtype=np.int64)
        if verts.size == 0:
            raise ValueError("a path needs at least one vertex")
        pos[verts] = np.arange(len(verts))
        if np.count_nonzero(pos >= 0) != len(verts):
            raise ValueError("path repeats a vertex")
        verts.setflags(write=False)
        pos.setflags(write=False)
        self.vertices = verts
        self.pos = pos
        self.n = n

    @property
    def h(self) -> int:
        """Edge length of the path."""
        return len(self.vertices) - 1

    @property
    def anchor(self) -> int:
        return int(self.vertices[0])

    @property
    def end(self) -> int:
        return int(self.vertices[-1])

    def is_path_in(self, g: Graph) -> bool:
        v = self.vertices.tolist()
        return all(g.has_edge(a, b) for a, b in zip(v, v[1:]))

    def __eq__(self, other):
        return isinstance(other, RotationPath) and np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def __repr__(self):
        return f"RotationPath({self.vertices.tolist()})"


def rotate(p: RotationPath, chord, g: Graph | None = None) -> RotationPath:
    """Rotate along ``chord``: a pivot vertex ``x_i`` or a pair ``(x_h, x_i)``.

    When ``g`` is given the chord must be one of its edges.
    """
    end = p.end
    if isinstance(chord, (tuple, list)):
        a, b = int(chord[0]), int(chord[1])
        if a == end:
            pivot = b
        elif b == end:
            pivot = a
        else:
            raise InvalidChord(f"chord {chord} does not touch the endpoint {end}")
    else:
        pivot = int(chord)
    if not 0 <= pivot < p.n or p.pos[pivot] < 0:
        raise InvalidChord(f"pivot {pivot} is not on the path")
    i = int(p.pos[pivot])
    if i >= p.h - 1:
        raise InvalidChord(f"pivot {pivot} sits at position {i}; need i < h-1 = {p.h - 1}")
    if g is not None and not g.has_edge(end, pivot):
        raise InvalidChord(f"({end}, {pivot}) is not an edge")
    v = p.vertices.tolist()
    v[i + 1:] = v[:i:-1]
    return RotationPath(v, p.n)


def _rotate_inplace(verts: np.ndarray, pos: np.ndarray, idx: np.ndarray, i: int) -> None:
    # reverse the suffix after position i; applying it twice is the identity
    seg = verts[:i:-1].copy()
    verts[i + 1:] = seg
    pos[seg] = idx[i + 1:]


def greedy_path(g: Graph, v0: int, rng: np.random.Generator | None = None) -> list[int]:
    """Walk from ``v0`` to the lowest-indexed (or a random) unvisited neighbour until stuck."""
    adj = g.adj
    on = bytearray(g.n)
    path = [int(v0)]
    on[v0] = 1
    _extend(adj, path, on, rng)
    return path


def _extend(adj, path: list, on, rng) -> None:
    while True:
        free = [w for w in adj[path[-1]] if not on[w]]
        if not free:
            return
        w = free[0] if rng is None else free[int(rng.integers(len(free)))]
        path.append(w)
        on[w] = 1


@dataclass
class PosaPair:
    """Endpoint closure of an anchor path.

    ``S`` includes the anchor path's own endpoint.  ``closed`` is False when
    the rotation budget ran out before the closure was complete.
    """

    S: frozenset
    T: frozenset
    path: RotationPath
    closed: bool
    rotations: int
    dedup: bool = True
    witnesses: dict | None = None

    @property
    def s(self) -> int:
        return len(self.S)

    @property
    def t(self) -> int:
        return len(self.T)


def endpoint_closure(g: Graph, p: RotationPath, dedup: bool = True, budget: int | None = None,
                     witnesses: bool = False) -> PosaPair:
    """Endpoints of all paths reachable from ``p`` by rotations at the far end.

    Exploration is depth first with in-place rotations that are undone on
    backtrack, so memory stays ``O(n)``.  With ``dedup`` a rotation whose
    new endpoint was already produced is not performed; without it every
    distinct path state is visited once (exponential; for small graphs).

    Raises :class:`PathExtendable` if some reachable endpoint has a
    neighbour off the path.  ``budget`` caps the number of rotations
    (default ``50 n``); running out yields ``closed=False``.
    """
    adj = g.adj
    verts = p.vertices.copy()
    pos = p.pos.copy()
    h = len(verts) - 1
    idx = np.arange(h + 1)
    if budget is None:
        budget = 50 * g.n

    # rotations never change the vertex set, so membership is fixed
    on = bytearray(g.n)
    for v in p.vertices.tolist():
        on[v] = 1

    def check(y):
        for w in adj[y]:
            if not on[w]:
                raise PathExtendable(verts.tolist(), w)

    end0 = int(verts[-1])
    check(end0)
    seen = {end0}
    states = None if dedup else {verts.tobytes()}
    wit = {end0: ()} if witnesses else None
    pivots: list[int] = []
    rotations = 0
    closed = True
    # frames: (neighbour tuple, next index, pivot that led here or -1)
    stack = [[adj[end0], 0, -1]]
    while stack:
        frame = stack[-1]
        nbrs, k, undo = frame
        if k == len(nbrs):
            stack.pop()
            if undo >= 0:
                _rotate_inplace(verts, pos, idx, undo)
                pivots.pop()
            continue
        frame[1] = k + 1
        i = int(pos[nbrs[k]])
        if i >= h - 1:
            continue
        y = int(verts[i + 1])
        if dedup and y in seen:
            continue
        if rotations >= budget:
            closed = False
            break
        _rotate_inplace(verts, pos, idx, i)
        rotations += 1
        if states is not None:
            key = verts.tobytes()
            if key in states:
                _rotate_inplace(verts, pos, idx, i)
                continue
            states.add(key)
        pivots.append(i)
        if y not in seen:
            seen.add(y)
            if wit is not None:
                wit[y] = tuple(pivots)
        check(y)
        stack.append([adj[y], 0, i])
    S = frozenset(seen)
    T = frozenset(w for v in S for w in adj[v] if w not in S)
    return PosaPair(S=S, T=T, path=p, closed=closed, rotations=rotations, dedup=dedup,
                    witnesses=wit)


def _maximal_compiled(g, v0, rng, budget):
    # same walk as _maximal; the closure runs in compiled code on a treap
    # that persists across extensions, and ``seen`` is reset by a stamp
    n = g.n
    adj = g.adj
    path = [int(v0)]
    on = np.zeros(n, dtype=np.uint8)
    on[v0] = 1
    _extend(adj, path, on, rng)
    tr = np.full((5, n), -1, dtype=np.int64)
    prio = _treap_priorities(n)
    root = -1
    for v in path:
        root = treap_append(tr, prio, root, v)
    seen = np.zeros(n, dtype=np.int64)
    if budget is None:
        budget = 50 * n
    stamp = 0
    restarts = 0
    while True:
        stamp += 1
        status, rot, w, root = closure_dfs(g.indptr, g.indices, on, tr, prio, root, seen,
                                           stamp, budget)
        if status == 1:
            restarts += 1
            tail = [int(w)]
            on[w] = 1
            _extend(adj, tail, on, rng)
            for v in tail:
                root = treap_append(tr, prio, root, v)
            continue
        verts = np.empty(int(tr[3, root]), dtype=np.int64)
        treap_inorder(tr, root, verts)
        rp = RotationPath(verts, n)
        S = frozenset(np.flatnonzero(seen == stamp).tolist())
        T = frozenset(x for v in S for x in adj[v] if x not in S)
        pair = PosaPair(S=S, T=T, path=rp, closed=status == 0, rotations=int(rot), dedup=True)
        return rp, pair, restarts


def _treap_priorities(n):
    # fixed priorities: reproducible, independent of the trial stream
    return np.random.Generator(np.random.PCG64(0x5EED)).random(n)


def _maximal(g, v0, rng, dedup, budget, witnesses, compiled=True):
    if compiled and dedup and not witnesses:
        return _maximal_compiled(g, v0, rng, budget)
    adj = g.adj
    path = [int(v0)]
    on = bytearray(g.n)
    on[v0] = 1
    _extend(adj, path, on, rng)
    restarts = 0
    while True:
        rp = RotationPath(path, g.n)
        try:
            pair = endpoint_closure(g, rp, dedup=dedup, budget=budget, witnesses=witnesses)
        except PathExtendable as ext:
            restarts += 1
            path = ext.vertices + [ext.vertex]
            on[ext.vertex] = 1
            _extend(adj, path, on, rng)
            continue
        return rp, pair, restarts


def maximal_path(g: Graph, v0: int, rng: np.random.Generator | None = None,
                 dedup: bool = True, budget: int | None = None) -> RotationPath:
    """A path from ``v0`` that no sequence of rotations can extend.

    Starts with a greedy walk, then alternates closure computation and
    extension until the closure finishes without exposing an off-path
    neighbour.  Off-path choices go to the lowest index unless ``rng`` is
    given.
    """
    return _maximal(g, v0, rng, dedup, budget, False)[0]


def posa_pair(g: Graph, v0: int, rng: np.random.Generator | None = None, dedup: bool = True,
              budget: int | None = None, witnesses: bool = False) -> tuple[RotationPath, PosaPair]:
    """:func:`maximal_path` and the closure of the returned path in one pass."""
    rp, pair, _ = _maximal(g, v0, rng, dedup, budget, witnesses)
    return rp, pair


def choose_v0(g: Graph, policy="greedy", rng: np.random.Generator | None = None) -> int:
    """Anchor vertex: ``"greedy"`` (end of a greedy walk from vertex 0),
    ``"lowest"`` (vertex 0), ``"random"`` or an explicit vertex index."""
    if isinstance(policy, (int, np.integer)):
        v = int(policy)
        if not 0 <= v < g.n:
            raise ValueError(f"v0={v} out of range")
        return v
    if policy == "greedy":
        return greedy_path(g, 0)[-1]
    if policy == "lowest":
        return 0
    if policy == "random":
        if rng is None:
            raise ValueError("random v0 needs an rng")
        return int(rng.integers(g.n))
    raise ValueError(f"unknown v0 policy {policy!r}")


# -- decomposition -------------------------------------------------------------


@dataclass
class PosaStructure:
    s: int
    t: int
    s2: int
    s3: int
    t1: int
    t2: int
    t3: int
    xi1: int
    xi2: int
    mu1: int
    mu2: int
    e_st: int
    e_t: int
    # D_S(T): edges between S and T
    d_s_t: int
    gstar_degree: dict = field(repr=False, default_factory=dict)
    T1: frozenset = field(repr=False, default=frozenset())
    S2: frozenset = field(repr=False, default=frozenset())

    @property
    def sigma(self) -> float:
        """Density excess: ``e(S u T) = (1 + sigma)(s + t)``."""
        return self.e_st / (self.s + self.t) - 1.0

    @property
    def excess2(self) -> int:
        """``2 sigma (s + t)`` as an integer."""
        return 2 * (self.e_st - self.s - self.t)

    def as_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "t1": self.t1, "t2": self.t2, "t3": self.t3,
                "s2": self.s2, "s3": self.s3, "xi1": self.xi1, "xi2": self.xi2,
                "mu1": self.mu1, "mu2": self.mu2, "e_st": self.e_st, "sigma": self.sigma}


def decompose_structure(g: Graph, pair: PosaPair) -> PosaStructure:
    """Split ``S`` and ``T`` by their degrees in the reduced graph G*.

    G* lives on ``S u (T \\ T1)`` and keeps the edges with an end in ``S``,
    except those to ``T1`` (vertices of ``T`` with a single ``S``
    neighbour).
    """
    adj = g.adj
    S, T = pair.S, pair.T
    k_s = {t: sum(1 for w in adj[t] if w in S) for t in T}
    T1 = frozenset(t for t, k in k_s.items() if k == 1)
    mu1 = mu2 = e_t = 0
    deg = {}
    for v in S:
        d = 0
        for w in adj[v]:
            if w in S:
                d += 1
                if w > v:
                    mu1 += 1
            elif w in T and w not in T1:
                d += 1
                mu2 += 1
        deg[v] = d
    for t in T:
        if t not in T1:
            deg[t] = k_s[t]
        e_t += sum(1 for w in adj[t] if w in T and w > t)
    d_s_t = sum(k_s.values())
    S2 = frozenset(v for v in S if deg[v] == 2)
    xi1 = sum(deg[v] - 2 for v in S if deg[v] != 2)
    T2 = [t for t in T if t not in T1 and deg[t] == 2]
    xi2 = sum(deg[t] - 2 for t in T if t not in T1 and deg[t] != 2)
    s, t, t1 = len(S), len(T), len(T1)
    return PosaStructure(
        s=s, t=t, s2=len(S2), s3=s - len(S2), t1=t1, t2=len(T2), t3=t - t1 - len(T2),
        xi1=xi1, xi2=xi2, mu1=mu1, mu2=mu2, e_st=mu1 + d_s_t + e_t, e_t=e_t, d_s_t=d_s_t,
        gstar_degree=deg, T1=T1, S2=S2,
    )


@dataclass
class ViolationReport:
    results: dict
    witnesses: dict

    @property
    def ok(self) -> bool:
        return all(self.results.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.results.items() if not v]

    def as_dict(self) -> dict:
        return {k: ("pass" if v else "fail") for k, v in self.results.items()}


# checks that are theorems for every closed pair in a min-degree-3 graph
HARD_CHECKS = (
    "t_lt_2s", "dense_union", "gstar_min_degree", "s2_no_mixed_neighbors",
    "xi_lower", "edge_identities",
)


def check_structure(st: PosaStructure, pair: PosaPair, g: Graph) -> ViolationReport:
    """Evaluate the deterministic consequences of rotation closure.

    All quantities are integers; ``2 sigma (s+t)`` is ``2(e(S u T) - s - t)``.
    The lower bound on ``t1`` is only informative for ``sigma <= 1/6`` and
    is evaluated only there.
    """
    adj = g.adj
    S, T = pair.S, pair.T
    s, t = st.s, st.t
    ex2 = st.excess2
    deg = st.gstar_degree
    res: dict[str, bool] = {}
    wit: dict[str, object] = {}

    res["t_lt_2s"] = t < 2 * s
    res["dense_union"] = st.e_st > s + t
    low = [v for v, d in deg.items() if d < 2]
    res["gstar_min_degree"] = not low
    if low:
        wit["gstar_min_degree"] = sorted(low)[:10]

    bad = []
    T23 = T - st.T1
    for v in st.S2:
        nb = [w for w in adj[v] if w in S or w in T23]
        if any(w in st.S2 for w in nb) and any(w in T23 for w in nb):
            bad.append(v)
    res["s2_no_mixed_neighbors"] = not bad
    if bad:
        wit["s2_no_mixed_neighbors"] = sorted(bad)[:10]

    res["t1_le_s"] = st.t1 <= s
    if 6 * (st.e_st - s - t) <= s + t:
        res["t1_lower"] = s - st.t1 <= ex2
    res["excess_le_2sigma"] = sum(d - 2 for d in deg.values()) <= ex2
    res["boundary_degree"] = st.d_s_t >= 2 * t - s
    res["xi_lower"] = st.xi1 >= st.s3 and st.xi2 >= st.t3
    two_mu1 = 2 * (s - t + st.t1) + st.xi1 - st.xi2
    res["edge_identities"] = (
        st.s == st.s2 + st.s3 and st.t == st.t1 + st.t2 + st.t3
        and 2 * st.mu1 == two_mu1
        and st.mu2 == 2 * (t - st.t1) + st.xi2
        and 2 * (st.mu1 + st.mu2) == 2 * (s + t - st.t1) + st.xi1 + st.xi2
        and 2 * st.mu1 + st.mu2 == sum(deg[v] for v in S)
    )
    res["s3_t3_bound"] = st.s3 + st.t3 <= ex2
    res["xi_sum_bound"] = st.xi1 + st.xi2 <= ex2
    special = st.t1 == s and st.e_t == 0 and all(d == 2 for d in deg.values())
    res["not_special"] = not special

    pos = pair.path.pos
    off = [w for w in T if pos[w] < 0]
    res["t_on_path"] = not off
    if off:
        wit["t_on_path"] = sorted(off)[:10]
    verts = pair.path.vertices
    h = len(verts) - 1
    lonely = []
    for w in T:
        i = pos[w]
        if i < 0:
            continue
        nb = [int(verts[j]) for j in (i - 1, i + 1) if 0 <= j <= h]
        if not any(x in S for x in nb):
            lonely.append(w)
    res["t_has_s_path_neighbor"] = not lonely
    if lonely:
        wit["t_has_s_path_neighbor"] = sorted(lonely)[:10]
    return ViolationReport(results=res, witnesses=wit)
